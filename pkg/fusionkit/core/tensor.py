"""
Tensor helpers

A tensor is a dense 2-D float64 numpy array. Vectors are stored as 1×n rows.
"""

from typing import Any, Tuple

import numpy as np

from fusionkit.exceptions import DimensionException, NumericException

DTYPE = np.float64


def as_tensor(data: Any) -> np.ndarray:
    """
    Coerce data to a 2-D float64 array

    Scalars become 1×1 and 1-D sequences become a single row.

    Raises:
        DimensionException: if data has more than two axes
    """
    array = np.array(data, dtype=DTYPE)
    if array.ndim == 0:
        return array.reshape(1, 1)
    if array.ndim == 1:
        return array.reshape(1, -1)
    if array.ndim != 2:
        raise DimensionException(f"Tensor must be 2-D, got shape {array.shape}", shapes=[array.shape])
    return array


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=DTYPE)


def shape_of(array: np.ndarray) -> Tuple[int, int]:
    return int(array.shape[0]), int(array.shape[1])


def ensure_finite(array: np.ndarray, what: str = "tensor") -> np.ndarray:
    """Raise NumericException if array holds NaN or Inf"""
    if not np.all(np.isfinite(array)):
        raise NumericException(f"Non-finite values in {what}")
    return array
