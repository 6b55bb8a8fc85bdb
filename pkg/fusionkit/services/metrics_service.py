"""
Metrics Service
Weighted F1, valence MSE and the combined score
"""

from typing import Dict, List, Sequence, Tuple

import numpy as np
from sklearn.metrics import confusion_matrix as sk_confusion_matrix

from config import Config
from fusionkit.exceptions import AlignmentException, ContractException
from fusionkit.models import ClassScores, FeatureSample, MetricsReport, Prediction
from fusionkit.models.reference_scores import REFERENCE_TRIPLES, ReferenceTriple


class MetricsService:

    @staticmethod
    def confusion_matrix(labels: Sequence[int], predicted: Sequence[int], num_classes: int) -> np.ndarray:
        """Rows are true classes, columns predicted classes"""
        return sk_confusion_matrix(labels, predicted, labels=list(range(num_classes)))

    @staticmethod
    def per_class_scores(confusion: np.ndarray) -> List[ClassScores]:
        """
        Precision, recall and F1 per class

        Classes with no predictions get precision 0; classes with no support get recall 0.
        """
        confusion = np.asarray(confusion, dtype=np.float64)
        if confusion.ndim != 2 or confusion.shape[0] != confusion.shape[1]:
            raise ContractException(f"Confusion matrix must be square, got {confusion.shape}")
        if np.any(confusion < 0):
            raise ContractException("Confusion matrix must be non-negative")

        tp = np.diag(confusion)
        predicted = confusion.sum(axis=0)
        support = confusion.sum(axis=1)
        scores = []
        for k in range(confusion.shape[0]):
            precision = tp[k] / predicted[k] if predicted[k] > 0 else 0.0
            recall = tp[k] / support[k] if support[k] > 0 else 0.0
            f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
            scores.append(ClassScores(float(precision), float(recall), float(f1), int(support[k])))
        return scores

    @staticmethod
    def weighted_f1(confusion: np.ndarray) -> float:
        """
        Per-class F1 averaged with support / total weights

        Raises:
            ContractException: if the matrix is empty or not square
        """
        confusion = np.asarray(confusion, dtype=np.float64)
        scores = MetricsService.per_class_scores(confusion)
        total = confusion.sum()
        if total <= 0:
            raise ContractException("Confusion matrix has zero total")
        return float(sum(s.f1 * s.support for s in scores) / total)

    @staticmethod
    def mse_metric(predicted: Sequence[float], targets: Sequence[float]) -> float:
        predicted = np.asarray(predicted, dtype=np.float64)
        targets = np.asarray(targets, dtype=np.float64)
        if predicted.size == 0 or predicted.shape != targets.shape:
            raise ContractException("mse_metric needs equal-length non-empty inputs")
        return float(np.mean((predicted - targets) ** 2))

    @staticmethod
    def combined(dis: float, dim: float, dim_weight: float = Config.COMBINED_DIM_WEIGHT) -> float:
        """com = dis - dim_weight * dim"""
        return dis - dim_weight * dim

    @staticmethod
    def build_report(labels: Sequence[int], predicted_labels: Sequence[int], valence_true: Sequence[float],
                     valence_pred: Sequence[float], num_classes: int,
                     dim_weight: float = Config.COMBINED_DIM_WEIGHT) -> MetricsReport:
        """Assemble a MetricsReport from label and valence arrays"""
        confusion = MetricsService.confusion_matrix(labels, predicted_labels, num_classes)
        dis = MetricsService.weighted_f1(confusion)
        dim = MetricsService.mse_metric(valence_pred, valence_true)
        return MetricsReport(
            dis=dis,
            dim=dim,
            com=MetricsService.combined(dis, dim, dim_weight),
            dim_weight=dim_weight,
            per_class=MetricsService.per_class_scores(confusion),
            confusion=confusion
        )

    @staticmethod
    def label_arrays(samples: Sequence[FeatureSample]) -> Tuple[Dict[str, int], Dict[str, float]]:
        """
        Emotion and valence labels keyed by sample id

        Raises:
            ContractException: if any sample is unlabeled
        """
        emotions, valences = {}, {}
        for sample in samples:
            if not sample.is_labeled:
                raise ContractException(f"Sample '{sample.id}' has no emotion/valence labels")
            emotions[sample.id] = int(sample.emotion)
            valences[sample.id] = float(sample.valence)
        return emotions, valences

    @staticmethod
    def score_predictions(predictions: Sequence[Prediction], samples: Sequence[FeatureSample],
                          dim_weight: float = Config.COMBINED_DIM_WEIGHT) -> MetricsReport:
        """
        Score predictions against labeled samples matched by id

        Raises:
            ContractException: if samples are unlabeled or predictions are empty
            AlignmentException: if the id sets differ
        """
        if not predictions:
            raise ContractException("No predictions to score")
        emotions, valences = MetricsService.label_arrays(samples)
        predicted_ids = {p.sample_id for p in predictions}
        if predicted_ids != set(emotions):
            raise AlignmentException("Prediction ids do not match dataset ids",
                                     ids=predicted_ids.symmetric_difference(emotions))

        num_classes = predictions[0].num_classes
        ids = [p.sample_id for p in predictions]
        return MetricsService.build_report(
            labels=[emotions[i] for i in ids],
            predicted_labels=[int(np.argmax(p.probs)) for p in predictions],
            valence_true=[valences[i] for i in ids],
            valence_pred=[p.valence for p in predictions],
            num_classes=num_classes,
            dim_weight=dim_weight
        )

    @staticmethod
    def reproduce_reference(dim_weight: float = Config.COMBINED_DIM_WEIGHT,
                            tolerance: float = 5e-4) -> List[Tuple[ReferenceTriple, float, bool]]:
        """Recompute com for every published triple; returns (triple, recomputed com, within tolerance)"""
        rows = []
        for triple in REFERENCE_TRIPLES:
            com = MetricsService.combined(triple.dis, triple.dim, dim_weight)
            rows.append((triple, com, abs(com - triple.com) <= tolerance))
        return rows
