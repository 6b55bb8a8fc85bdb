"""
Run configuration validators
Pydantic models for training, synthetic data and ensemble settings
"""

from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from config import Config
from fusionkit import load_config
from fusionkit.exceptions import ConfigurationException, ParseException
from fusionkit.models import DecoderKind, LossKind, Modality, StrategyVariant


def _default_seed() -> int:
    return int(load_config()['SEED'])


class TrainConfig(BaseModel):
    """Validation schema for one (strategy, decoder, loss) training run"""

    model_config = ConfigDict(extra='forbid')

    strategy: StrategyVariant = Field(default=StrategyVariant.PARALLEL, description="Fusion topology 1, 2 or 3")
    decoder: DecoderKind = Field(default=DecoderKind.JDEV)
    loss: LossKind = Field(default=LossKind.UNCERTAINTY)
    hidden_dim: int = Field(default=Config.HIDDEN_DIM, ge=1, description="Common dimension D")
    num_classes: Optional[int] = Field(default=None, ge=2, description="C; inferred from data when omitted")

    learning_rate: float = Field(default=Config.LEARNING_RATE, gt=0)
    beta1: float = Field(default=Config.ADAM_BETA1, ge=0, lt=1)
    beta2: float = Field(default=Config.ADAM_BETA2, ge=0, lt=1)
    epsilon: float = Field(default=Config.ADAM_EPSILON, gt=0)
    batch_size: int = Field(default=Config.BATCH_SIZE, ge=1)
    max_epochs: int = Field(default=Config.MAX_EPOCHS, ge=0)
    patience: int = Field(default=Config.PATIENCE, ge=1)
    grad_clip: Optional[float] = Field(default=Config.GRAD_CLIP_NORM, gt=0, description="None disables clipping")
    seed: int = Field(default_factory=_default_seed)

    modality_map: Dict[str, Modality] = Field(
        default_factory=lambda: {name: Modality(value) for name, value in Config.DEFAULT_MODALITY_MAP.items()}
    )
    streams: Optional[List[str]] = Field(default=None, description="Subset of manifest streams to fuse")
    dim_weight: float = Field(default=Config.COMBINED_DIM_WEIGHT, ge=0)

    @field_validator('streams')
    @classmethod
    def validate_streams(cls, v):
        """Stream subset must be non-empty and free of duplicates"""
        if v is None:
            return v
        if not v:
            raise ValueError('streams cannot be empty')
        if len(set(v)) != len(v):
            raise ValueError('streams contains duplicates')
        return v


class SynthSpec(BaseModel):
    """
    Validation schema for the synthetic generator

    Emotion e ~ priors, valence = valence_means[e] + N(0, valence_noise^2),
    each stream = class_means[stream][e] + N(0, feature_noise^2) per coordinate.
    """

    model_config = ConfigDict(extra='forbid')

    num_classes: int = Field(default=6, ge=2)
    priors: Optional[List[float]] = None
    valence_means: Optional[List[float]] = None
    valence_noise: float = Field(default=0.1, ge=0)
    feature_noise: float = Field(default=1.0, ge=0)
    stream_dims: Dict[str, int] = Field(default_factory=lambda: dict(Config.DEFAULT_STREAM_DIMS))
    class_means: Optional[Dict[str, List[List[float]]]] = None
    mean_scale: float = Field(default=1.0, ge=0, description="Std of class means drawn when class_means is omitted")
    num_samples: int = Field(default=1000, ge=1)
    seed: int = Field(default_factory=_default_seed)
    id_prefix: str = Field(default='synth', min_length=1)

    @model_validator(mode='after')
    def validate_shapes(self):
        """Priors on the simplex; per-class vectors sized C"""
        C = self.num_classes
        if self.priors is not None:
            if len(self.priors) != C:
                raise ValueError(f'priors must have {C} entries')
            if any(p < 0 for p in self.priors):
                raise ValueError('priors must be non-negative')
            if abs(sum(self.priors) - 1.0) > 1e-9:
                raise ValueError('priors must sum to 1')
        if self.valence_means is not None and len(self.valence_means) != C:
            raise ValueError(f'valence_means must have {C} entries')
        if not self.stream_dims:
            raise ValueError('at least one stream is required')
        if any(d < 1 for d in self.stream_dims.values()):
            raise ValueError('stream dims must be positive')
        if self.class_means is not None:
            if set(self.class_means) != set(self.stream_dims):
                raise ValueError('class_means must cover exactly the declared streams')
            for name, means in self.class_means.items():
                if len(means) != C or any(len(row) != self.stream_dims[name] for row in means):
                    raise ValueError(f'class_means[{name}] must be {C} x {self.stream_dims[name]}')
        return self

    def resolved_priors(self) -> np.ndarray:
        if self.priors is None:
            return np.full(self.num_classes, 1.0 / self.num_classes)
        return np.asarray(self.priors, dtype=np.float64)

    def resolved_valence_means(self) -> np.ndarray:
        # Equally spaced in [-1, 1] by default
        if self.valence_means is None:
            return np.linspace(-1.0, 1.0, self.num_classes)
        return np.asarray(self.valence_means, dtype=np.float64)


class EnsembleOptions(BaseModel):
    """Validation schema for decision-level fusion"""

    model_config = ConfigDict(extra='forbid')

    weights: Optional[List[float]] = None
    grid_step: float = Field(default=Config.ENSEMBLE_GRID_STEP, gt=0, le=1)

    @field_validator('weights')
    @classmethod
    def validate_weights(cls, v):
        """Weights on the simplex"""
        if v is None:
            return v
        if not v or any(k < 0 for k in v):
            raise ValueError('weights must be non-negative')
        if abs(sum(v) - 1.0) > 1e-9:
            raise ValueError('weights must sum to 1')
        return v


class PathsConfig(BaseModel):
    """File locations referenced by a run"""

    model_config = ConfigDict(extra='forbid')

    data: Optional[str] = None
    train_data: Optional[str] = None
    val_data: Optional[str] = None
    checkpoint: Optional[str] = None
    history: Optional[str] = None
    predictions: Optional[List[str]] = None
    out: Optional[str] = None


class RunConfig(BaseModel):
    """Top-level config file: training, synthesis, ensemble and paths"""

    model_config = ConfigDict(extra='forbid')

    train: TrainConfig = Field(default_factory=TrainConfig)
    synth: Optional[SynthSpec] = None
    ensemble: EnsembleOptions = Field(default_factory=EnsembleOptions)
    paths: PathsConfig = Field(default_factory=PathsConfig)


def _field_errors(error: ValidationError) -> Dict[str, str]:
    return {
        '.'.join(str(part) for part in item['loc']) or '<root>': item['msg']
        for item in error.errors()
    }


def parse_run_config(data: dict) -> RunConfig:
    """
    Validate a config document

    Raises:
        ConfigurationException: on unknown keys or invalid values
    """
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigurationException('Invalid run configuration', field_errors=_field_errors(e))


def parse_train_config(data: dict) -> TrainConfig:
    try:
        return TrainConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigurationException('Invalid training configuration', field_errors=_field_errors(e))


def parse_synth_spec(data: dict) -> SynthSpec:
    """
    Validate a synthetic-data spec document

    Raises:
        ParseException: with the validation messages as details
    """
    try:
        return SynthSpec.model_validate(data)
    except ValidationError as e:
        exc = ParseException(f'Invalid synthetic spec: {e.error_count()} error(s)')
        exc.details['field_errors'] = _field_errors(e)
        raise exc
