"""
Loss Service
Cross-entropy, MSE and the uncertainty-weighted multi-task loss
"""

import numpy as np

from fusionkit.core import ops
from fusionkit.core.graph import Node, constant
from fusionkit.exceptions import ContractException, DimensionException
from fusionkit.models import LossKind, UncertaintyWeights


class LossService:

    @staticmethod
    def ce_loss(logits: Node, labels: np.ndarray) -> Node:
        """
        Mean over the batch of -log softmax(logits)[label]

        Raises:
            ContractException: on an empty batch or labels outside [0, C)
        """
        labels = np.asarray(labels, dtype=np.int64).reshape(-1)
        batch, num_classes = logits.shape
        if batch == 0 or labels.shape[0] == 0:
            raise ContractException("ce_loss needs a non-empty batch")
        if labels.shape[0] != batch:
            raise DimensionException(f"{labels.shape[0]} labels for {batch} logit rows",
                                     shapes=[logits.shape, (labels.shape[0], 1)])
        if labels.min() < 0 or labels.max() >= num_classes:
            raise ContractException(f"Labels must be in [0, {num_classes})")

        one_hot = np.zeros((batch, num_classes))
        one_hot[np.arange(batch), labels] = 1.0
        picked = ops.mul(ops.log_softmax_rows(logits), constant(one_hot))
        return ops.scale(ops.reduce_sum(picked), -1.0 / batch)

    @staticmethod
    def mse_loss(predictions: Node, targets: np.ndarray) -> Node:
        """
        Mean of squared differences

        Raises:
            ContractException: on an empty batch
            DimensionException: if lengths differ
        """
        targets = np.asarray(targets, dtype=np.float64).reshape(-1, 1)
        if predictions.shape[0] == 0 or targets.shape[0] == 0:
            raise ContractException("mse_loss needs a non-empty batch")
        if predictions.shape != targets.shape:
            raise DimensionException(
                f"Predictions {predictions.shape} and targets {targets.shape} differ",
                shapes=[predictions.shape, targets.shape]
            )
        return ops.reduce_mean(ops.square(ops.sub(predictions, constant(targets))))

    @staticmethod
    def uncertainty_loss(ce: Node, mse: Node, weights: UncertaintyWeights) -> Node:
        """
        L_ev = L_e / delta1^2 + L_v / (2 delta2^2) + log(1 + delta1) + log(1 + delta2)

        delta_j = exp(rho_j), so 1/delta_j^2 = exp(-2 rho_j).
        """
        weighted_ce = ops.mul(ops.exp(ops.scale(weights.rho1, -2.0)), ce)
        weighted_mse = ops.mul(ops.scale(ops.exp(ops.scale(weights.rho2, -2.0)), 0.5), mse)
        reg1 = ops.log(ops.add_scalar(ops.exp(weights.rho1), 1.0))
        reg2 = ops.log(ops.add_scalar(ops.exp(weights.rho2), 1.0))
        return ops.add(ops.add(weighted_ce, weighted_mse), ops.add(reg1, reg2))

    @staticmethod
    def fixed_equal_loss(ce: Node, mse: Node) -> Node:
        return ops.add(ce, mse)

    @staticmethod
    def total_loss(kind: LossKind, ce: Node, mse: Node, weights: UncertaintyWeights) -> Node:
        if LossKind(kind) == LossKind.UNCERTAINTY:
            return LossService.uncertainty_loss(ce, mse, weights)
        return LossService.fixed_equal_loss(ce, mse)
