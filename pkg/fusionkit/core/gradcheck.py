"""
Central finite-difference gradient checking

The analytic gradient of a scalar graph is compared entry by entry with
(f(x+h) - f(x-h)) / (2h), perturbing parameter values in place.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Sequence

import numpy as np

from fusionkit.core.graph import Node, backward, zero_grad
from fusionkit.exceptions import ContractException, NumericException

logger = logging.getLogger(__name__)

RELATIVE_FLOOR = 1e-3


@dataclass
class GradCheckReport:
    """Per-parameter max relative error and the pass verdict"""
    errors: List[float]
    names: List[str]
    tolerance: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = all(error <= self.tolerance for error in self.errors)

    @property
    def max_error(self) -> float:
        return max(self.errors) if self.errors else 0.0

    def failures(self) -> List[dict]:
        return [
            {'index': i, 'name': name, 'error': error}
            for i, (name, error) in enumerate(zip(self.names, self.errors))
            if error > self.tolerance
        ]


def relative_error(analytic: float, numeric: float, floor: float = RELATIVE_FLOOR) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), floor)


def _evaluate(f: Callable[[], Node], index: int) -> float:
    value = f().item()
    if not np.isfinite(value):
        raise NumericException(
            f"Non-finite loss while probing parameter {index}",
            details={'parameter_index': index}
        )
    return value


def grad_check(f: Callable[[], Node], params: Sequence[Node], step: float = 1e-5,
               tol: float = 1e-5, floor: float = RELATIVE_FLOOR) -> GradCheckReport:
    """
    Compare analytic and central-difference gradients

    Args:
        f: Builds the graph from the current parameter values and returns a 1×1 node
        params: Trainable leaves read by f
        step: Finite-difference step h
        tol: Max allowed relative error per entry
        floor: Denominator floor; smaller gradients are compared absolutely

    Returns:
        GradCheckReport with one max error per parameter

    Raises:
        ContractException: if step is not positive
        NumericException: if f is non-finite at any perturbed point
    """
    if step <= 0:
        raise ContractException(f"Finite-difference step must be positive, got {step}")

    zero_grad(params)
    root = f()
    if not np.isfinite(root.item()):
        raise NumericException("Non-finite loss at the unperturbed point")
    backward(root)
    analytic = [param.grad.copy() for param in params]

    errors = []
    for index, param in enumerate(params):
        worst = 0.0
        param.value = np.ascontiguousarray(param.value)
        flat = param.value.reshape(-1)  # view: writes perturb the parameter
        for j in range(flat.size):
            original = flat[j]
            flat[j] = original + step
            f_plus = _evaluate(f, index)
            flat[j] = original - step
            f_minus = _evaluate(f, index)
            flat[j] = original
            numeric = (f_plus - f_minus) / (2.0 * step)
            worst = max(worst, relative_error(float(analytic[index].reshape(-1)[j]), numeric, floor))
        errors.append(worst)

    names = [param.name or f'param[{i}]' for i, param in enumerate(params)]
    report = GradCheckReport(errors=errors, names=names, tolerance=tol)
    logger.debug(f"Gradient check over {len(params)} parameters: max error {report.max_error:.3e}")
    return report
