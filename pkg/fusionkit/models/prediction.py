"""
Prediction model
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass
class Prediction:
    """
    Emotion posterior and valence for one sample

    logits, valence_direct and valence_from_emotion are only known for
    predictions made in-process; exported records carry probs and valence.
    """
    sample_id: str
    probs: np.ndarray
    valence: float
    logits: Optional[np.ndarray] = None
    valence_direct: Optional[float] = None
    valence_from_emotion: Optional[float] = None

    @property
    def num_classes(self) -> int:
        return int(self.probs.shape[0])

    def to_dict(self) -> dict:
        """Convert prediction to the exported record format"""
        return {
            'id': self.sample_id,
            'probs': [float(p) for p in self.probs],
            'valence': float(self.valence)
        }
