"""
Unit Tests for FK-TRAIN-001: Model initialization, training, evaluation and gradient checks
Tests init determinism, Adam training with early stopping, checkpoints and predict/evaluate agreement

Test Coverage:
- Xavier init is seeded and near-uniform at the output
- Training is deterministic per seed and keeps the best validation epoch
- Separable data is learned by every strategy/decoder pair
- The learned uncertainty weights favor the noisier task
- Saved checkpoints reproduce metrics exactly
"""

import warnings

import numpy as np
import pytest

from fusionkit.dao import CheckpointDAO
from fusionkit.exceptions import ContractException, NumericException
from fusionkit.models import DatasetManifest, DecoderKind, FeatureSample, LossKind, Modality, StrategyVariant
from fusionkit.services.dataset_service import DatasetService
from fusionkit.services.gradcheck_service import GradCheckService
from fusionkit.services.metrics_service import MetricsService
from fusionkit.services.model_service import ModelService
from fusionkit.services.training_service import TrainingService
from fusionkit.validators.run_config import SynthSpec, TrainConfig


def _config(**fields):
    defaults = dict(hidden_dim=8, max_epochs=5, patience=50, batch_size=16, seed=0)
    return TrainConfig(**{**defaults, **fields})


def _synthetic(num_samples=60, num_classes=3, seed=0, **fields):
    spec = SynthSpec(num_classes=num_classes, stream_dims={'HL18': 4, 'MR': 3}, num_samples=num_samples,
                     seed=seed, **fields)
    return DatasetService.generate_synthetic(spec)


class TestInitialization:
    """Parameter initialization"""

    def setup_method(self, method):
        self.manifest = DatasetManifest(stream_dims={'HL18': 4, 'MR': 4}, num_classes=6)

    def test_same_seed_same_parameters(self):
        config = _config(strategy=StrategyVariant.PER_ACOUSTIC_AV)
        first = ModelService.snapshot_params(ModelService.init_model(config, self.manifest, seed=3))
        second = ModelService.snapshot_params(ModelService.init_model(config, self.manifest, seed=3))
        other = ModelService.snapshot_params(ModelService.init_model(config, self.manifest, seed=4))
        assert list(first) == list(second)
        assert all(np.array_equal(first[name], second[name]) for name in first)
        assert any(not np.array_equal(first[name], other[name]) for name in first)

    def test_biases_and_rho_start_at_zero(self):
        params = ModelService.snapshot_params(ModelService.init_model(_config(), self.manifest))
        for name, array in params.items():
            if name.endswith('.bias') or name.startswith('decoder.b_') or name.startswith('uncertainty.'):
                assert np.array_equal(array, np.zeros_like(array)), name

    def test_xavier_bounds(self):
        params = ModelService.snapshot_params(ModelService.init_model(_config(hidden_dim=16), self.manifest))
        weight = params['encoder.parallel.align.HL18.weight']
        assert weight.shape == (4, 16)
        assert np.all(np.abs(weight) <= np.sqrt(6.0 / 20))

    def test_initial_posterior_is_near_uniform(self):
        C = 6
        model = ModelService.init_model(_config(hidden_dim=128), self.manifest, seed=0)
        rng = np.random.default_rng(0)
        samples = [FeatureSample(f"x-{i}", {'HL18': rng.uniform(-1, 1, 4), 'MR': rng.uniform(-1, 1, 4)})
                   for i in range(100)]
        _, output = ModelService.run_model(model, DatasetService.stack_streams(samples, model.stream_names))
        assert output.probs.value.max() < 2.0 / C

    def test_num_classes_from_config_overrides_manifest(self):
        model = ModelService.init_model(_config(num_classes=4), self.manifest)
        assert model.num_classes == 4
        assert model.decoder.W_e.shape == (8, 4)

    def test_stream_subset(self):
        model = ModelService.init_model(_config(streams=['MR']), self.manifest)
        assert model.stream_names == ['MR']

    def test_default_modality_map_serializes_cleanly(self):
        config = TrainConfig()
        assert all(isinstance(value, Modality) for value in config.modality_map.values())
        with warnings.catch_warnings():
            warnings.simplefilter('error')
            dumped = config.model_dump(mode='json')
        assert dumped['modality_map']['MR'] == Modality.VISUAL.value


class TestTraining:
    """TrainingService.train() loop semantics"""

    def setup_method(self, method):
        self.samples = _synthetic()
        self.train_set, self.val_set = self.samples[:45], self.samples[45:]

    def test_zero_epochs_returns_initial_parameters(self):
        config = _config(max_epochs=0)
        checkpoint, history = TrainingService.train(config, self.train_set, self.val_set)
        manifest = DatasetManifest(stream_dims={'HL18': 4, 'MR': 3}, num_classes=3)
        initial = ModelService.snapshot_params(ModelService.init_model(config, manifest))
        assert history == []
        assert checkpoint.epoch == 0
        assert all(np.array_equal(checkpoint.params[name], initial[name]) for name in initial)

    def test_full_batch_loss_is_non_increasing(self):
        config = _config(streams=['HL18'], decoder=DecoderKind.BASELINE, loss=LossKind.FIXED_EQUAL,
                         learning_rate=1e-3, batch_size=len(self.train_set), max_epochs=10)
        _, history = TrainingService.train(config, self.train_set, self.val_set)
        losses = [row['loss'] for row in history]
        assert len(losses) == 10
        assert all(later <= earlier for earlier, later in zip(losses, losses[1:]))

    def test_history_rows(self):
        _, history = TrainingService.train(_config(max_epochs=3), self.train_set, self.val_set)
        assert [row['epoch'] for row in history] == [1, 2, 3]
        for row in history:
            assert set(row) == {'epoch', 'loss', 'ce', 'mse', 'delta1', 'delta2', 'dis', 'dim', 'com'}
            assert row['com'] == pytest.approx(row['dis'] - 0.25 * row['dim'])

    def test_checkpoint_keeps_best_validation_epoch(self):
        checkpoint, history = TrainingService.train(_config(max_epochs=8), self.train_set, self.val_set)
        best = max(history, key=lambda row: row['com'])
        assert checkpoint.best_score == best['com']
        assert checkpoint.epoch == min(row['epoch'] for row in history if row['com'] == best['com'])
        assert TrainingService.evaluate(checkpoint, self.val_set).com == pytest.approx(best['com'], abs=1e-12)

    def _stalled_run(self):
        # dim_weight 0 makes com the discrete F1; steps this small never move an argmax
        config = _config(max_epochs=50, patience=3, learning_rate=1e-9, dim_weight=0.0)
        return TrainingService.train(config, self.train_set, self.val_set)

    def test_early_stopping(self):
        checkpoint, history = self._stalled_run()
        assert len({row['com'] for row in history}) == 1
        assert checkpoint.epoch == 1
        assert len(history) == checkpoint.epoch + 3

    def test_checkpoint_rng_state_is_from_best_epoch(self):
        checkpoint, history = self._stalled_run()
        assert len(history) > checkpoint.epoch
        rng = np.random.default_rng([0, 1])
        for _ in range(checkpoint.epoch):
            rng.permutation(len(self.train_set))
        assert checkpoint.rng_state == rng.bit_generator.state

    def test_same_seed_same_checkpoint(self):
        config = _config(strategy=StrategyVariant.INTRA_THEN_INTER, max_epochs=4)
        first, first_history = TrainingService.train(config, self.train_set, self.val_set)
        second, second_history = TrainingService.train(config, self.train_set, self.val_set)
        assert first_history == second_history
        assert all(np.array_equal(first.params[name], second.params[name]) for name in first.params)
        assert first.rng_state == second.rng_state

    def test_unlabeled_training_set(self):
        unlabeled = [FeatureSample(s.id, s.streams) for s in self.train_set]
        with pytest.raises(ContractException):
            TrainingService.train(_config(), unlabeled, self.val_set)

    def test_non_finite_loss_reports_epoch_and_batch(self):
        broken = list(self.train_set)
        broken[0] = FeatureSample(broken[0].id, {'HL18': np.full(4, np.inf), 'MR': np.zeros(3)},
                                  emotion=broken[0].emotion, valence=broken[0].valence)
        config = _config(loss=LossKind.FIXED_EQUAL, batch_size=len(broken))
        with np.errstate(all='ignore'):
            with pytest.raises(NumericException) as exc_info:
                TrainingService.train(config, broken, self.val_set)
        assert exc_info.value.details == {'epoch': 1, 'batch': 0}
        assert exc_info.value.exit_code == 3

    @pytest.mark.slow
    @pytest.mark.parametrize('strategy', list(StrategyVariant))
    @pytest.mark.parametrize('decoder', list(DecoderKind))
    def test_separable_data_is_learned(self, strategy, decoder):
        samples = _synthetic(num_samples=30, seed=5, feature_noise=0.0, valence_noise=0.0)
        config = _config(strategy=strategy, decoder=decoder, learning_rate=1e-2, max_epochs=200,
                         patience=200, batch_size=32)
        checkpoint, _ = TrainingService.train(config, samples, samples)
        assert TrainingService.evaluate(checkpoint, samples).dis >= 0.99

    def test_uncertainty_weight_grows_for_noisier_task(self):
        rng = np.random.default_rng(12)
        w = np.full(4, 0.25)
        samples = []
        for i in range(100):
            x = rng.standard_normal(4)
            samples.append(FeatureSample(f"d-{i}", {'HL18': x}, emotion=int(rng.integers(0, 4)),
                                         valence=float(x @ w)))
        config = _config(loss=LossKind.UNCERTAINTY, learning_rate=1e-2, max_epochs=100, patience=1000,
                         batch_size=20, num_classes=4)
        _, history = TrainingService.train(config, samples, samples)
        last = history[-1]
        assert last['delta1'] > 1.0
        assert last['delta1'] > last['delta2']


class TestPredictEvaluate:
    """Saved models"""

    def setup_method(self, method):
        samples = _synthetic(num_samples=40, seed=2)
        self.train_set, self.val_set = samples[:30], samples[30:]
        self.checkpoint, _ = TrainingService.train(_config(max_epochs=3), self.train_set, self.val_set)

    def test_checkpoint_file_reproduces_metrics(self, tmp_path):
        path = tmp_path / 'model.ckpt.json'
        CheckpointDAO().save(path, self.checkpoint)
        restored = CheckpointDAO().load(path)
        original = TrainingService.evaluate(self.checkpoint, self.val_set)
        reloaded = TrainingService.evaluate(restored, self.val_set)
        assert reloaded.dis == original.dis
        assert reloaded.dim == original.dim
        assert reloaded.com == original.com

    def test_repeated_loads_predict_identically(self, tmp_path):
        path = tmp_path / 'model.ckpt.json'
        CheckpointDAO().save(path, self.checkpoint)
        first = TrainingService.predict(CheckpointDAO().load(path), self.val_set)
        second = TrainingService.predict(CheckpointDAO().load(path), self.val_set)
        for a, b in zip(first, second):
            assert a.sample_id == b.sample_id
            assert np.array_equal(a.probs, b.probs)
            assert a.valence == b.valence

    def test_evaluate_equals_scoring_predictions(self):
        report = MetricsService.score_predictions(TrainingService.predict(self.checkpoint, self.val_set), self.val_set)
        assert report.com == TrainingService.evaluate(self.checkpoint, self.val_set).com

    def test_predict_does_not_need_labels(self):
        unlabeled = [FeatureSample(s.id, s.streams) for s in self.val_set]
        predictions = TrainingService.predict(self.checkpoint, unlabeled)
        assert [p.sample_id for p in predictions] == [s.id for s in self.val_set]
        assert all(np.isclose(p.probs.sum(), 1.0) for p in predictions)

    def test_evaluate_needs_labels(self):
        unlabeled = [FeatureSample(s.id, s.streams) for s in self.val_set]
        with pytest.raises(ContractException):
            TrainingService.evaluate(self.checkpoint, unlabeled)

    def test_model_rebuilt_from_checkpoint(self):
        model = ModelService.model_from_checkpoint(self.checkpoint)
        assert ModelService.snapshot_params(model).keys() == self.checkpoint.params.keys()


class TestGradientCheckService:
    """Full-model gradient checks"""

    @pytest.mark.parametrize('strategy', list(StrategyVariant))
    def test_jdev_uncertainty_combination_passes(self, strategy):
        case = GradCheckService.check_combination(strategy, DecoderKind.JDEV, LossKind.UNCERTAINTY, hidden_dim=4, num_classes=3)
        assert case.report.passed, case.report.failures()
        assert case.to_dict()['passed'] is True

    def test_baseline_fixed_equal_passes(self):
        case = GradCheckService.check_combination(StrategyVariant.PARALLEL, DecoderKind.BASELINE, LossKind.FIXED_EQUAL)
        assert case.report.passed
        assert case.label == 'strategy=1 decoder=baseline loss=fixed-equal'
