"""
Unit Tests for FK-EXP-001: Multi-seed decoder comparison and ensemble gain
Tests the polarity-grouped experiment data, result summaries and the full acceptance runs

Test Coverage:
- Polarity class means separate valence signs and order levels inside a sign
- Experiment data is a pure function of the seed
- JDEV beats the baseline decoder on valence MSE across seeds (slow)
- The searched ensemble beats its best member on most seeds (slow)
"""

import numpy as np
import pytest

from fusionkit.exceptions import ContractException
from fusionkit.services.dataset_service import DatasetService
from fusionkit.services.experiment_service import (
    DecoderComparison,
    EnsembleGain,
    EXPERIMENT_SYNTH,
    ExperimentService,
)


class TestPolarityClassMeans:
    """DatasetService.polarity_class_means"""

    def setup_method(self, method):
        self.valence_means = [-0.5, -0.2, 0.3, 0.7]
        self.means = DatasetService.polarity_class_means({'A': 3, 'B': 2}, self.valence_means, 0.9, 1.1,
                                                         np.random.default_rng(0))

    def test_shapes(self):
        assert np.asarray(self.means['A']).shape == (4, 3)
        assert np.asarray(self.means['B']).shape == (4, 2)

    def test_sign_groups_sit_two_gaps_apart(self):
        means = np.asarray(self.means['A'])
        negative, positive = means[:2].mean(axis=0), means[2:].mean(axis=0)
        assert np.linalg.norm(positive - negative) == pytest.approx(1.8, abs=1e-12)

    def test_levels_are_orthogonal_to_polarity(self):
        means = np.asarray(self.means['A'])
        polarity = means[2:].mean(axis=0) - means[:2].mean(axis=0)
        for members in ((0, 1), (2, 3)):
            step = means[members[1]] - means[members[0]]
            assert np.linalg.norm(step) == pytest.approx(1.1, abs=1e-12)
            assert np.dot(step, polarity) == pytest.approx(0.0, abs=1e-12)

    def test_levels_follow_valence_order(self):
        mu = [0.6, 0.1, 0.3]
        means = np.asarray(DatasetService.polarity_class_means({'A': 4}, mu, 0.9, 1.0,
                                                               np.random.default_rng(3))['A'])
        # lowest and highest valence sit two level steps apart, the middle one halfway
        assert np.linalg.norm(means[0] - means[1]) == pytest.approx(2.0, abs=1e-12)
        assert np.allclose(means[2], (means[0] + means[1]) / 2, atol=1e-12)

    def test_zero_valence_counts_as_positive(self):
        means = np.asarray(DatasetService.polarity_class_means({'A': 2}, [-0.4, 0.0], 1.0, 1.0,
                                                               np.random.default_rng(1))['A'])
        # one class per group leaves no level offset
        assert np.allclose(means[0], -means[1], atol=1e-12)
        assert np.linalg.norm(means[0]) == pytest.approx(1.0, abs=1e-12)

    def test_one_dimensional_stream(self):
        with pytest.raises(ContractException):
            DatasetService.polarity_class_means({'A': 1}, self.valence_means, 0.9, 1.1, np.random.default_rng(0))


class TestExperimentData:
    """ExperimentService.synth_spec"""

    def test_same_seed_same_spec(self):
        assert ExperimentService.synth_spec(3) == ExperimentService.synth_spec(3)
        assert ExperimentService.synth_spec(3).class_means != ExperimentService.synth_spec(4).class_means

    def test_defaults(self):
        spec = ExperimentService.synth_spec(0)
        assert spec.seed == 0
        assert spec.num_classes == EXPERIMENT_SYNTH['num_classes']
        assert spec.stream_dims == EXPERIMENT_SYNTH['stream_dims']
        assert set(spec.class_means) == set(EXPERIMENT_SYNTH['stream_dims'])

    def test_explicit_class_means_are_kept(self):
        means = {'A': [[1.0, 0.0], [0.0, 1.0]]}
        spec = ExperimentService.synth_spec(0, {'num_classes': 2, 'stream_dims': {'A': 2}, 'class_means': means})
        assert spec.class_means == means


class TestSummaries:
    """DecoderComparison and EnsembleGain"""

    def test_decoder_comparison(self):
        comparison = DecoderComparison(rows=[
            {'seed': 0, 'jdev_dim': 0.05, 'baseline_dim': 0.10, 'jdev_dis': 0.8, 'baseline_dis': 0.7},
            {'seed': 1, 'jdev_dim': 0.12, 'baseline_dim': 0.10, 'jdev_dis': 0.9, 'baseline_dis': 0.8},
        ])
        assert comparison.jdev_wins == 1
        assert comparison.mean_relative_reduction == pytest.approx((0.5 - 0.2) / 2)
        assert comparison.mean_dis == pytest.approx(0.8)
        assert comparison.to_dict()['seeds'] == 2

    def test_empty_comparison(self):
        assert DecoderComparison().mean_relative_reduction == 0.0
        assert DecoderComparison().mean_dis == 0.0

    def test_strict_gains_ignore_ties(self):
        gain = EnsembleGain(rows=[
            {'seed': 0, 'best_member_com': 0.5, 'fused_com': 0.6},
            {'seed': 1, 'best_member_com': 0.5, 'fused_com': 0.5},
        ])
        assert gain.strict_gains == 1

    def test_small_comparison_runs(self):
        comparison = ExperimentService.compare_decoders(
            seeds=(0,), synth_overrides={'num_samples': 60}, train_overrides={'max_epochs': 1, 'hidden_dim': 4}
        )
        assert len(comparison.rows) == 1
        assert set(comparison.rows[0]) == {'seed', 'jdev_dis', 'jdev_dim', 'baseline_dis', 'baseline_dim'}


class TestAcceptanceRuns:
    """Default five-seed experiments"""

    @pytest.mark.slow
    def test_jdev_lowers_valence_error(self):
        comparison = ExperimentService.compare_decoders()
        assert comparison.jdev_wins >= 4, comparison.to_dict()
        assert comparison.mean_relative_reduction >= 0.05, comparison.to_dict()
        assert 0.7 <= comparison.mean_dis <= 0.9, comparison.to_dict()

    @pytest.mark.slow
    def test_ensemble_beats_best_member(self):
        gain = ExperimentService.ensemble_gain()
        assert gain.strict_gains >= 3, gain.to_dict()
