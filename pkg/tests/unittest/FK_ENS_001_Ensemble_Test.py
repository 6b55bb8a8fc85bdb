"""
Unit Tests for FK-ENS-001: Decision-level ensemble
Tests weighted posterior/valence fusion, id alignment and the simplex grid search
"""

import itertools

import numpy as np
import pytest

from fusionkit.exceptions import AlignmentException, ContractException, DimensionException
from fusionkit.models import FeatureSample, Prediction
from fusionkit.services.ensemble_service import EnsembleService
from fusionkit.services.metrics_service import MetricsService


def _member(rows):
    return [Prediction(sample_id, np.asarray(probs, dtype=np.float64), valence) for sample_id, probs, valence in rows]


class TestFusePredictions:
    """Weighted fusion of aligned prediction sets"""

    def setup_method(self, method):
        rng = np.random.default_rng(17)
        self.ids = [f"s-{i}" for i in range(8)]
        self.members = []
        for _ in range(3):
            probs = rng.dirichlet(np.ones(4), size=len(self.ids))
            self.members.append(_member(zip(self.ids, probs, rng.uniform(-1, 1, len(self.ids)))))

    def test_two_member_hand_example(self):
        first = _member([('a', [0.8, 0.2], 0.5)])
        second = _member([('a', [0.3, 0.7], -0.25)])
        fused = EnsembleService.fuse_predictions([first, second], [0.6, 0.4])
        assert np.allclose(fused[0].probs, [0.6, 0.4])
        assert fused[0].valence == pytest.approx(0.2)
        assert int(np.argmax(fused[0].probs)) == 0

    def test_corner_weights_reproduce_member(self):
        for index in range(3):
            weights = [0.0, 0.0, 0.0]
            weights[index] = 1.0
            fused = EnsembleService.fuse_predictions(self.members, weights)
            for got, expected in zip(fused, self.members[index]):
                assert np.array_equal(got.probs, expected.probs)
                assert got.valence == expected.valence

    def test_fused_posterior_is_distribution(self):
        fused = EnsembleService.fuse_predictions(self.members, [0.2, 0.5, 0.3])
        for prediction in fused:
            assert np.all(prediction.probs >= 0)
            assert prediction.probs.sum() == pytest.approx(1.0, abs=1e-12)

    def test_valence_stays_within_member_range(self):
        fused = EnsembleService.fuse_predictions(self.members, [0.1, 0.6, 0.3])
        for i, prediction in enumerate(fused):
            values = [member[i].valence for member in self.members]
            assert min(values) - 1e-12 <= prediction.valence <= max(values) + 1e-12

    def test_member_order_is_irrelevant(self):
        weights = [0.25, 0.35, 0.4]
        fused = EnsembleService.fuse_predictions(self.members, weights)
        for perm in itertools.permutations(range(3)):
            permuted = EnsembleService.fuse_predictions([self.members[j] for j in perm], [weights[j] for j in perm])
            for a, b in zip(fused, permuted):
                assert np.allclose(a.probs, b.probs, atol=1e-12)
                assert a.valence == pytest.approx(b.valence, abs=1e-12)

    def test_members_may_list_ids_in_any_order(self):
        shuffled = list(reversed(self.members[1]))
        fused = EnsembleService.fuse_predictions([self.members[0], shuffled], [0.5, 0.5])
        assert [p.sample_id for p in fused] == self.ids

    def test_weights_off_simplex(self):
        with pytest.raises(ContractException):
            EnsembleService.fuse_predictions(self.members, [0.5, 0.5, 0.5])
        with pytest.raises(ContractException):
            EnsembleService.fuse_predictions(self.members, [1.2, -0.2, 0.0])
        with pytest.raises(ContractException):
            EnsembleService.fuse_predictions(self.members, [0.5, 0.5])

    def test_id_mismatch(self):
        other = _member([('s-0', [0.5, 0.25, 0.125, 0.125], 0.0)])
        with pytest.raises(AlignmentException) as exc_info:
            EnsembleService.fuse_predictions([self.members[0], other], [0.5, 0.5])
        assert 's-1' in exc_info.value.details['ids']

    def test_duplicate_ids(self):
        doubled = self.members[0] + self.members[0][:1]
        with pytest.raises(AlignmentException) as exc_info:
            EnsembleService.fuse_predictions([doubled, doubled], [0.5, 0.5])
        assert exc_info.value.details['ids'] == ['s-0']

    def test_class_count_mismatch(self):
        narrow = [Prediction(p.sample_id, np.array([0.5, 0.5]), p.valence) for p in self.members[0]]
        with pytest.raises(DimensionException):
            EnsembleService.fuse_predictions([self.members[1], narrow], [0.5, 0.5])

    def test_no_members(self):
        with pytest.raises(ContractException):
            EnsembleService.fuse_predictions([], [])


class TestSimplexGrid:
    """Candidate weight vectors"""

    def test_three_members_at_tenths(self):
        grid = EnsembleService.simplex_grid(3, 0.1)
        assert len(grid) == 66
        assert grid[0] == (1.0, 0.0, 0.0)
        assert grid[-1] == (0.0, 0.0, 1.0)
        assert all(abs(sum(w) - 1.0) <= 1e-9 for w in grid)
        assert len(set(grid)) == 66

    def test_descending_lexicographic_order(self):
        grid = EnsembleService.simplex_grid(3, 0.25)
        assert grid == sorted(grid, reverse=True)

    def test_single_member(self):
        assert EnsembleService.simplex_grid(1, 0.05) == [(1.0,)]

    def test_step_must_divide_one(self):
        with pytest.raises(ContractException):
            EnsembleService.simplex_grid(3, 0.3)
        with pytest.raises(ContractException):
            EnsembleService.simplex_grid(3, 0.0)


class TestSearchWeights:
    """Exhaustive grid search on validation labels"""

    def setup_method(self, method):
        rng = np.random.default_rng(23)
        self.samples = [FeatureSample(f"v-{i}", {'MR': np.zeros(1)}, emotion=int(rng.integers(0, 3)),
                                      valence=float(rng.uniform(-1, 1))) for i in range(30)]
        self.members = []
        for noise in (0.3, 0.6, 0.9):
            rows = []
            for sample in self.samples:
                probs = rng.dirichlet(np.ones(3)) * noise
                probs[sample.emotion] += 1.0 - noise
                rows.append((sample.id, probs, sample.valence + rng.normal(0, noise)))
            self.members.append(_member(rows))

    def test_best_candidate_dominates_grid(self):
        result = EnsembleService.search_weights(self.members, self.samples, grid_step=0.1)
        assert result.candidates_evaluated == 66
        for weights in EnsembleService.simplex_grid(3, 0.1):
            report = MetricsService.score_predictions(EnsembleService.fuse_predictions(self.members, weights), self.samples)
            assert report.com <= result.report.com + 1e-12
        assert sum(result.weights) == pytest.approx(1.0)

    def test_ensemble_not_worse_than_members(self):
        result = EnsembleService.search_weights(self.members, self.samples, grid_step=0.1)
        for member in self.members:
            assert result.report.com >= MetricsService.score_predictions(member, self.samples).com - 1e-12

    def test_ties_keep_earliest_candidate(self):
        identical = [self.members[0]] * 3
        result = EnsembleService.search_weights(identical, self.samples, grid_step=0.5)
        assert result.weights == (1.0, 0.0, 0.0)

    def test_single_member_gets_all_weight(self):
        result = EnsembleService.search_weights(self.members[:1], self.samples)
        assert result.weights == (1.0,)
        assert result.candidates_evaluated == 1

    def test_unlabeled_validation_set(self):
        unlabeled = [FeatureSample(s.id, s.streams) for s in self.samples]
        with pytest.raises(ContractException):
            EnsembleService.search_weights(self.members, unlabeled, grid_step=0.5)
