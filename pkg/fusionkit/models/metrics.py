"""
Metrics report model
"""

from dataclasses import dataclass, field
from typing import List

import numpy as np


@dataclass
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class MetricsReport:
    """
    Discrete (weighted F1), dimensional (valence MSE) and combined scores

    Business Rules:
    - com = dis - dim_weight * dim
    - confusion row sums equal per-class support
    """
    dis: float
    dim: float
    com: float
    dim_weight: float
    per_class: List[ClassScores] = field(default_factory=list)
    confusion: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), dtype=np.int64))

    @property
    def num_samples(self) -> int:
        return int(self.confusion.sum())

    def to_dict(self) -> dict:
        """Convert report to dictionary; headline scores rounded to 4 places"""
        return {
            'dis': round(self.dis, 4),
            'dim': round(self.dim, 4),
            'com': round(self.com, 4),
            'dim_weight': self.dim_weight,
            'per_class': [
                {
                    'class': index,
                    'precision': round(scores.precision, 4),
                    'recall': round(scores.recall, 4),
                    'f1': round(scores.f1, 4),
                    'support': scores.support
                }
                for index, scores in enumerate(self.per_class)
            ],
            'confusion': self.confusion.astype(int).tolist()
        }
