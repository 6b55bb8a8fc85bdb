"""
Models package
Plain domain types: samples, parameters, predictions, reports, checkpoints
"""

from fusionkit.models.sample import DatasetManifest, FeatureSample, Modality, StreamBatch
from fusionkit.models.parameters import (
    AfgParams,
    BaselineParams,
    DecoderKind,
    FusionEncoder,
    FusionModel,
    JdevParams,
    LossKind,
    StrategyVariant,
    UncertaintyWeights,
)
from fusionkit.models.prediction import Prediction
from fusionkit.models.metrics import ClassScores, MetricsReport
from fusionkit.models.checkpoint import Checkpoint

__all__ = [
    'DatasetManifest', 'FeatureSample', 'Modality', 'StreamBatch',
    'AfgParams', 'BaselineParams', 'DecoderKind', 'FusionEncoder', 'FusionModel',
    'JdevParams', 'LossKind', 'StrategyVariant', 'UncertaintyWeights',
    'Prediction', 'ClassScores', 'MetricsReport', 'Checkpoint',
]
