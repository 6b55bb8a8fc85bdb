"""
Feature sample and dataset manifest models
"""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional

import numpy as np


class Modality(str, Enum):
    ACOUSTIC = 'acoustic'
    VISUAL = 'visual'


@dataclass
class FeatureSample:
    """
    One video segment's pre-extracted feature streams

    Business Rules:
    - Every sample in a dataset has the same stream names and dims
    - emotion, when present, is in [0, C)
    """
    id: str
    streams: Dict[str, np.ndarray]
    emotion: Optional[int] = None
    valence: Optional[float] = None

    @property
    def is_labeled(self) -> bool:
        return self.emotion is not None and self.valence is not None

    def to_dict(self) -> dict:
        """Convert sample to a plain record"""
        return {
            'id': self.id,
            'streams': {name: [float(x) for x in values] for name, values in self.streams.items()},
            'emotion': self.emotion,
            'valence': self.valence
        }


@dataclass
class DatasetManifest:
    """Stream names with dimensions, class count and label availability"""
    stream_dims: Dict[str, int]
    num_classes: int
    sample_count: int = 0
    has_emotion: bool = False
    has_valence: bool = False

    @property
    def stream_names(self) -> List[str]:
        return list(self.stream_dims)

    def to_dict(self) -> dict:
        return {
            'stream_dims': dict(self.stream_dims),
            'num_classes': self.num_classes,
            'sample_count': self.sample_count,
            'has_emotion': self.has_emotion,
            'has_valence': self.has_valence
        }


@dataclass
class StreamBatch:
    """Samples stacked per stream as B×d matrices"""
    ids: List[str]
    streams: Dict[str, np.ndarray]
    emotions: Optional[np.ndarray] = None
    valences: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.ids)
