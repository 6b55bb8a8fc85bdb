"""
Ensemble Service
Posterior-level fusion of several systems' predictions and simplex weight search
"""

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from config import Config
from fusionkit.exceptions import AlignmentException, ContractException, DimensionException
from fusionkit.models import FeatureSample, MetricsReport, Prediction
from fusionkit.services.metrics_service import MetricsService

logger = logging.getLogger(__name__)

SIMPLEX_TOLERANCE = 1e-9


@dataclass
class SearchResult:
    weights: Tuple[float, ...]
    report: MetricsReport
    candidates_evaluated: int


class EnsembleService:

    @staticmethod
    def check_weights(weights: Sequence[float], num_members: int) -> None:
        """
        Raises:
            ContractException: if weights are not num_members non-negative values summing to 1
        """
        if len(weights) != num_members:
            raise ContractException(f"{len(weights)} weights for {num_members} members")
        if any(k < 0 for k in weights) or abs(sum(weights) - 1.0) > SIMPLEX_TOLERANCE:
            raise ContractException(
                f"Weights must be non-negative and sum to 1, got {list(weights)}",
                details={'weights': list(weights)}
            )

    @staticmethod
    def check_alignment(members: Sequence[Sequence[Prediction]]) -> List[str]:
        """
        Verify every member covers the same ids with the same class count

        Returns:
            The id order of the first member

        Raises:
            AlignmentException: listing ids that are missing from some member or duplicated
            DimensionException: if class counts differ
        """
        reference = [p.sample_id for p in members[0]]
        reference_set = set(reference)
        num_classes = members[0][0].num_classes if members[0] else None
        for index, member in enumerate(members):
            ids = [p.sample_id for p in member]
            if len(set(ids)) != len(ids):
                duplicates = sorted(i for i, n in Counter(ids).items() if n > 1)
                raise AlignmentException(f"Member {index} has duplicate ids", ids=duplicates)
            if set(ids) != reference_set:
                offending = sorted(reference_set.symmetric_difference(ids))
                raise AlignmentException(f"Member {index} covers different ids than member 0", ids=offending)
            for prediction in member:
                if prediction.num_classes != num_classes:
                    raise DimensionException(
                        f"Member {index} has {prediction.num_classes} classes, member 0 has {num_classes}",
                        shapes=[(1, prediction.num_classes), (1, num_classes)]
                    )
        return reference

    @staticmethod
    def fuse_predictions(members: Sequence[Sequence[Prediction]], weights: Sequence[float]) -> List[Prediction]:
        """
        e^ = sum_j k_j e^_j and v^ = sum_j k_j v^_j per sample

        Output follows the id order of the first member.

        Raises:
            ContractException: if there are no members or weights leave the simplex
            AlignmentException: if members cover different ids
        """
        if not members:
            raise ContractException("Ensemble needs at least one member")
        EnsembleService.check_weights(weights, len(members))
        order = EnsembleService.check_alignment(members)
        lookup = [{p.sample_id: p for p in member} for member in members]

        fused = []
        for sample_id in order:
            probs = weights[0] * lookup[0][sample_id].probs
            valence = weights[0] * lookup[0][sample_id].valence
            for k, member in zip(weights[1:], lookup[1:]):
                probs = probs + k * member[sample_id].probs
                valence = valence + k * member[sample_id].valence
            fused.append(Prediction(sample_id=sample_id, probs=np.asarray(probs, dtype=np.float64),
                                    valence=float(valence)))
        return fused

    @staticmethod
    def _compositions(parts: int, total: int) -> Iterator[Tuple[int, ...]]:
        # Descending lexicographic order
        if parts == 1:
            yield (total,)
            return
        for first in range(total, -1, -1):
            for rest in EnsembleService._compositions(parts - 1, total - first):
                yield (first,) + rest

    @staticmethod
    def simplex_grid(num_members: int, step: float) -> List[Tuple[float, ...]]:
        """
        All weight vectors on the simplex with entries in multiples of step

        Raises:
            ContractException: if step does not divide 1 or num_members < 1
        """
        if num_members < 1:
            raise ContractException("Ensemble needs at least one member")
        if step <= 0:
            raise ContractException(f"Grid step must be positive, got {step}")
        divisions = int(round(1.0 / step))
        if divisions < 1 or abs(divisions * step - 1.0) > SIMPLEX_TOLERANCE:
            raise ContractException(f"Grid step {step} does not divide 1")
        return [tuple(c / divisions for c in combo)
                for combo in EnsembleService._compositions(num_members, divisions)]

    @staticmethod
    def search_weights(members: Sequence[Sequence[Prediction]], samples: Sequence[FeatureSample],
                       grid_step: float = Config.ENSEMBLE_GRID_STEP,
                       dim_weight: float = Config.COMBINED_DIM_WEIGHT) -> SearchResult:
        """
        Exhaustive simplex-grid search for the weights with the best combined score

        Ties keep the earliest candidate in descending lexicographic order.

        Args:
            members: Prediction sets, one per system
            samples: Labeled validation samples covering the members' ids
            grid_step: Weight resolution; must divide 1
            dim_weight: Valence weight in the combined score

        Returns:
            SearchResult with the winning weights, their report and the candidate count

        Raises:
            ContractException: on an empty member list or a step that does not divide 1
        """
        if not members:
            raise ContractException("Ensemble needs at least one member")
        EnsembleService.check_alignment(members)

        candidates = EnsembleService.simplex_grid(len(members), grid_step)
        best_weights, best_report = None, None
        for weights in candidates:
            fused = EnsembleService.fuse_predictions(members, weights)
            report = MetricsService.score_predictions(fused, samples, dim_weight=dim_weight)
            if best_report is None or report.com > best_report.com:
                best_weights, best_report = weights, report

        logger.info(
            f"Ensemble search over {len(candidates)} candidates: weights {best_weights} com={best_report.com:.4f}"
        )
        return SearchResult(weights=best_weights, report=best_report, candidates_evaluated=len(candidates))
