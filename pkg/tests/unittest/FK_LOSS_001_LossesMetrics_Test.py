"""
Unit Tests for FK-LOSS-001: Losses and evaluation metrics
Tests cross-entropy, MSE, the uncertainty-weighted loss, weighted F1 and the combined score
"""

import math

import numpy as np
import pytest
from sklearn.metrics import f1_score

from fusionkit.core.graph import backward, constant, parameter
from fusionkit.exceptions import AlignmentException, ContractException, DimensionException
from fusionkit.models import FeatureSample, LossKind, Prediction, UncertaintyWeights
from fusionkit.services.loss_service import LossService
from fusionkit.services.metrics_service import MetricsService


def _weights(delta1, delta2):
    return UncertaintyWeights(rho1=parameter([[math.log(delta1)]]), rho2=parameter([[math.log(delta2)]]))


class TestTaskLosses:
    """Cross-entropy and mean squared error"""

    def test_ce_of_uniform_logits_is_log_c(self):
        loss = LossService.ce_loss(constant(np.zeros((3, 4))), np.array([0, 1, 3]))
        assert loss.item() == pytest.approx(math.log(4), rel=1e-12)

    def test_ce_known_value(self):
        logits = np.array([[2.0, 0.0], [0.0, 1.0]])
        loss = LossService.ce_loss(constant(logits), np.array([0, 0]))
        expected = -0.5 * (logits[0, 0] - np.log(np.exp(logits[0]).sum())
                           + logits[1, 0] - np.log(np.exp(logits[1]).sum()))
        assert loss.item() == pytest.approx(expected, rel=1e-12)

    def test_ce_saturated_correct_logits_vanish(self):
        loss = LossService.ce_loss(constant([[50.0, 0.0], [0.0, 50.0]]), np.array([0, 1]))
        assert loss.item() < 1e-20

    def test_ce_label_out_of_range(self):
        with pytest.raises(ContractException):
            LossService.ce_loss(constant(np.zeros((2, 3))), np.array([0, 3]))

    def test_ce_empty_batch(self):
        with pytest.raises(ContractException):
            LossService.ce_loss(constant(np.zeros((0, 3))), np.array([], dtype=np.int64))

    def test_ce_count_mismatch(self):
        with pytest.raises(DimensionException):
            LossService.ce_loss(constant(np.zeros((2, 3))), np.array([0]))

    def test_mse_known_value(self):
        loss = LossService.mse_loss(constant([[1.0], [2.0]]), np.array([0.0, 0.0]))
        assert loss.item() == pytest.approx(2.5)

    def test_mse_symmetric_errors(self):
        assert LossService.mse_loss(constant([[0.0], [0.0]]), np.array([1.0, -1.0])).item() == 1.0
        assert LossService.mse_loss(constant([[0.3], [-2.0]]), np.array([0.3, -2.0])).item() == 0.0

    def test_mse_shape_mismatch(self):
        with pytest.raises(DimensionException):
            LossService.mse_loss(constant([[1.0], [2.0]]), np.array([0.0, 0.0, 1.0]))


class TestUncertaintyLoss:
    """L_e / delta1^2 + L_v / (2 delta2^2) + log(1 + delta1) + log(1 + delta2)"""

    def test_unit_weights(self):
        loss = LossService.uncertainty_loss(constant([[1.0]]), constant([[2.0]]), _weights(1.0, 1.0))
        assert loss.item() == pytest.approx(3.38629, abs=1e-5)

    def test_zero_task_losses_leave_regularizer(self):
        loss = LossService.uncertainty_loss(constant([[0.0]]), constant([[0.0]]), _weights(1.0, 1.0))
        assert loss.item() == pytest.approx(2 * math.log(2), rel=1e-12)

    def test_unequal_weights(self):
        loss = LossService.uncertainty_loss(constant([[1.0]]), constant([[1.0]]), _weights(2.0, 0.5))
        assert loss.item() == pytest.approx(3.754077, abs=1e-6)

    def test_rho_gradient(self):
        weights = _weights(1.0, 1.0)
        backward(LossService.uncertainty_loss(constant([[1.0]]), constant([[1.0]]), weights))
        # d/drho1 = -2 L_e exp(-2 rho1) + sigmoid(rho1)
        assert weights.rho1.grad[0, 0] == pytest.approx(-1.5, rel=1e-12)
        assert weights.rho2.grad[0, 0] == pytest.approx(-0.5, rel=1e-12)

    def test_deltas_stay_positive(self):
        weights = UncertaintyWeights(rho1=parameter([[-40.0]]), rho2=parameter([[3.0]]))
        assert weights.delta1 > 0
        assert weights.delta2 == pytest.approx(math.exp(3.0))

    def test_strictly_increasing_in_task_losses(self):
        weights = _weights(1.5, 0.7)
        base = LossService.uncertainty_loss(constant([[1.0]]), constant([[1.0]]), weights).item()
        assert LossService.uncertainty_loss(constant([[1.1]]), constant([[1.0]]), weights).item() > base
        assert LossService.uncertainty_loss(constant([[1.0]]), constant([[1.1]]), weights).item() > base

    def test_fixed_equal_is_plain_sum(self):
        assert LossService.fixed_equal_loss(constant([[0.7]]), constant([[0.4]])).item() == pytest.approx(1.1)

    def test_total_loss_dispatch(self):
        ce, mse = constant([[1.0]]), constant([[2.0]])
        weights = _weights(1.0, 1.0)
        assert LossService.total_loss(LossKind.FIXED_EQUAL, ce, mse, weights).item() == pytest.approx(3.0)
        assert LossService.total_loss('uncertainty', ce, mse, weights).item() == pytest.approx(3.38629, abs=1e-5)


class TestWeightedF1:
    """Weighted F1 and per-class scores"""

    def setup_method(self, method):
        self.labels = [0, 0, 0, 1, 1, 2, 2, 2, 2, 3]
        self.predicted = [0, 1, 0, 1, 2, 2, 2, 0, 3, 3]

    def test_matches_sklearn(self):
        cm = MetricsService.confusion_matrix(self.labels, self.predicted, 4)
        expected = f1_score(self.labels, self.predicted, average='weighted')
        assert MetricsService.weighted_f1(cm) == pytest.approx(expected, abs=1e-12)

    def test_class_without_predictions_scores_zero(self):
        labels, predicted = [0, 1, 2, 2], [0, 1, 1, 1]
        cm = MetricsService.confusion_matrix(labels, predicted, 3)
        expected = f1_score(labels, predicted, average='weighted', zero_division=0)
        assert MetricsService.weighted_f1(cm) == pytest.approx(expected, abs=1e-12)
        assert MetricsService.per_class_scores(cm)[2].f1 == 0.0

    def test_perfect_predictions(self):
        cm = MetricsService.confusion_matrix([0, 1, 2, 1], [0, 1, 2, 1], 3)
        assert MetricsService.weighted_f1(cm) == 1.0

    def test_confusion_rows_are_support(self):
        cm = MetricsService.confusion_matrix(self.labels, self.predicted, 5)
        assert cm.shape == (5, 5)
        assert cm.sum(axis=1).tolist() == [3, 2, 4, 1, 0]

    def test_equals_accuracy_when_precision_equals_recall(self):
        cm = np.array([[3, 1], [1, 3]])
        assert MetricsService.weighted_f1(cm) == pytest.approx(0.75, abs=1e-12)

    def test_invalid_confusion(self):
        with pytest.raises(ContractException):
            MetricsService.weighted_f1(np.zeros((2, 3)))
        with pytest.raises(ContractException):
            MetricsService.weighted_f1(np.zeros((2, 2)))
        with pytest.raises(ContractException):
            MetricsService.weighted_f1(np.array([[1, -1], [0, 1]]))


class TestCombinedScore:
    """com = dis - 0.25 * dim"""

    def test_published_row(self):
        assert MetricsService.combined(0.7811, 0.6176) == pytest.approx(0.6267, abs=5e-5)

    def test_fused_and_visual_jdev_rows(self):
        assert MetricsService.combined(0.7936, 0.6138) == pytest.approx(0.64015, abs=1e-9)
        assert MetricsService.combined(0.6170, 1.1890) == pytest.approx(0.31975, abs=1e-9)

    def test_custom_weight(self):
        assert MetricsService.combined(0.8, 0.4, dim_weight=0.5) == pytest.approx(0.6)

    def test_reference_rows_reproduce(self):
        rows = MetricsService.reproduce_reference()
        assert len(rows) == 12
        failing = [triple for triple, _, ok in rows if not ok]
        assert len(failing) == 1
        assert failing[0].strategy == '1+2+3 fused'
        assert failing[0].decoder == 'baseline'

    def test_build_report(self):
        report = MetricsService.build_report([0, 1, 1], [0, 1, 0], [0.5, -0.5, 0.0], [0.5, 0.5, 0.0], num_classes=2)
        assert report.dim == pytest.approx(1.0 / 3)
        assert report.com == pytest.approx(report.dis - 0.25 * report.dim)
        assert report.num_samples == 3
        assert report.to_dict()['confusion'] == [[1, 0], [1, 1]]


class TestScorePredictions:
    """Matching predictions to labeled samples"""

    def setup_method(self, method):
        self.samples = [
            FeatureSample('a', {'MR': np.zeros(1)}, emotion=0, valence=0.5),
            FeatureSample('b', {'MR': np.zeros(1)}, emotion=1, valence=-0.5),
        ]

    def test_perfect_predictions_in_any_order(self):
        predictions = [Prediction('b', np.array([0.1, 0.9]), -0.5), Prediction('a', np.array([0.8, 0.2]), 0.5)]
        report = MetricsService.score_predictions(predictions, self.samples)
        assert report.dis == 1.0
        assert report.dim == 0.0
        assert report.com == 1.0

    def test_id_mismatch(self):
        predictions = [Prediction('a', np.array([0.8, 0.2]), 0.5), Prediction('c', np.array([0.1, 0.9]), 0.0)]
        with pytest.raises(AlignmentException) as exc_info:
            MetricsService.score_predictions(predictions, self.samples)
        assert set(exc_info.value.details['ids']) == {'b', 'c'}

    def test_unlabeled_samples(self):
        samples = [FeatureSample('a', {'MR': np.zeros(1)})]
        with pytest.raises(ContractException):
            MetricsService.score_predictions([Prediction('a', np.array([0.5, 0.5]), 0.0)], samples)

    def test_empty_predictions(self):
        with pytest.raises(ContractException):
            MetricsService.score_predictions([], self.samples)
