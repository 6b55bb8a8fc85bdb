"""
Experiment Service
Multi-seed synthetic experiments: JDEV against the baseline decoder, and ensemble gain
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import Config
from fusionkit.models import DecoderKind, FeatureSample, StrategyVariant
from fusionkit.services.dataset_service import DatasetService
from fusionkit.services.ensemble_service import EnsembleService
from fusionkit.services.training_service import TrainingService
from fusionkit.validators.run_config import SynthSpec, TrainConfig

logger = logging.getLogger(__name__)

DEFAULT_SEEDS = (0, 1, 2, 3, 4)
TRAIN_FRACTION = 0.8
CLASS_MEANS_STREAM = 2

# Unit feature noise over five streams puts classification near 0.8
EXPERIMENT_SYNTH = {
    'num_classes': 6,
    'valence_noise': 0.1,
    'feature_noise': 1.0,
    'stream_dims': {'HL18': 8, 'HL19': 8, 'HL20': 8, 'MR': 6, 'RF': 6},
    'num_samples': 800,
    'polarity_gap': 0.9,
    'level_gap': 1.1,
}
EXPERIMENT_TRAIN = {
    'hidden_dim': 16,
    'learning_rate': 2e-3,
    'max_epochs': 100,
    'patience': 20,
}


@dataclass
class DecoderComparison:
    """Validation valence MSE per seed for JDEV and the baseline decoder"""
    rows: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def jdev_wins(self) -> int:
        return sum(1 for row in self.rows if row['jdev_dim'] < row['baseline_dim'])

    @property
    def mean_relative_reduction(self) -> float:
        rows = [r for r in self.rows if r['baseline_dim'] > 0]
        if not rows:
            return 0.0
        return float(np.mean([(r['baseline_dim'] - r['jdev_dim']) / r['baseline_dim'] for r in rows]))

    @property
    def mean_dis(self) -> float:
        """Weighted F1 averaged over seeds and both decoders"""
        if not self.rows:
            return 0.0
        return float(np.mean([[r['jdev_dis'], r['baseline_dis']] for r in self.rows]))

    def to_dict(self) -> dict:
        return {
            'rows': self.rows,
            'jdev_wins': self.jdev_wins,
            'seeds': len(self.rows),
            'mean_relative_reduction': self.mean_relative_reduction,
            'mean_dis': self.mean_dis
        }


@dataclass
class EnsembleGain:
    """Best single-strategy and fused validation combined scores per seed"""
    rows: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def strict_gains(self) -> int:
        return sum(1 for row in self.rows if row['fused_com'] > row['best_member_com'])

    def to_dict(self) -> dict:
        return {'rows': self.rows, 'strict_gains': self.strict_gains, 'seeds': len(self.rows)}


class ExperimentService:

    @staticmethod
    def synth_spec(seed: int, synth_overrides: Optional[dict] = None) -> SynthSpec:
        """
        Experiment data spec for one seed

        Class means come from DatasetService.polarity_class_means, so negative
        and positive emotions form two clusters. polarity_gap and level_gap
        are read from the merged settings; every other key goes to SynthSpec.
        """
        settings = {**EXPERIMENT_SYNTH, **(synth_overrides or {}), 'seed': seed}
        polarity_gap = settings.pop('polarity_gap')
        level_gap = settings.pop('level_gap')
        spec = SynthSpec(**settings)
        if spec.class_means is None:
            rng = np.random.default_rng([seed, CLASS_MEANS_STREAM])
            means = DatasetService.polarity_class_means(spec.stream_dims, spec.resolved_valence_means(),
                                                        polarity_gap, level_gap, rng)
            spec = spec.model_copy(update={'class_means': means})
        return spec

    @staticmethod
    def _split_for_seed(seed: int,
                        synth_overrides: Optional[dict]) -> Tuple[List[FeatureSample], List[FeatureSample]]:
        samples = DatasetService.generate_synthetic(ExperimentService.synth_spec(seed, synth_overrides))
        return DatasetService.split(samples, TRAIN_FRACTION, seed)

    @staticmethod
    def _train_config(seed: int, train_overrides: Optional[dict], **fields) -> TrainConfig:
        return TrainConfig(**{**EXPERIMENT_TRAIN, **(train_overrides or {}), **fields, 'seed': seed})

    @staticmethod
    def compare_decoders(seeds: Sequence[int] = DEFAULT_SEEDS,
                         strategy: StrategyVariant = StrategyVariant.PARALLEL,
                         synth_overrides: Optional[dict] = None,
                         train_overrides: Optional[dict] = None) -> DecoderComparison:
        """
        Train JDEV and baseline systems on the same data per seed

        Args:
            seeds: One synthetic dataset, split and init per seed
            strategy: Fusion strategy shared by both systems
            synth_overrides: SynthSpec fields replacing the experiment defaults
            train_overrides: TrainConfig fields replacing the experiment defaults

        Returns:
            DecoderComparison with validation dis/dim per decoder
        """
        comparison = DecoderComparison()
        for seed in seeds:
            train_set, val_set = ExperimentService._split_for_seed(seed, synth_overrides)
            row: Dict[str, Any] = {'seed': seed}
            for decoder in (DecoderKind.JDEV, DecoderKind.BASELINE):
                config = ExperimentService._train_config(seed, train_overrides, strategy=strategy, decoder=decoder)
                checkpoint, _ = TrainingService.train(config, train_set, val_set)
                report = TrainingService.evaluate(checkpoint, val_set)
                row[f'{decoder.value}_dis'] = report.dis
                row[f'{decoder.value}_dim'] = report.dim
            comparison.rows.append(row)
            logger.info(f"Seed {seed}: jdev dim={row['jdev_dim']:.4f} baseline dim={row['baseline_dim']:.4f}")
        return comparison

    @staticmethod
    def ensemble_gain(seeds: Sequence[int] = DEFAULT_SEEDS,
                      grid_step: float = Config.ENSEMBLE_GRID_STEP,
                      synth_overrides: Optional[dict] = None,
                      train_overrides: Optional[dict] = None) -> EnsembleGain:
        """Train strategies 1-3 per seed and compare their best member with the searched ensemble"""
        gain = EnsembleGain()
        for seed in seeds:
            train_set, val_set = ExperimentService._split_for_seed(seed, synth_overrides)
            members = []
            member_coms = []
            for strategy in StrategyVariant:
                config = ExperimentService._train_config(seed, train_overrides, strategy=strategy)
                checkpoint, _ = TrainingService.train(config, train_set, val_set)
                predictions = TrainingService.predict(checkpoint, val_set)
                members.append(predictions)
                member_coms.append(TrainingService.evaluate(checkpoint, val_set).com)
            result = EnsembleService.search_weights(members, val_set, grid_step=grid_step)
            gain.rows.append({
                'seed': seed,
                'member_coms': member_coms,
                'best_member_com': max(member_coms),
                'fused_com': result.report.com,
                'weights': list(result.weights)
            })
        return gain
