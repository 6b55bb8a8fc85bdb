"""
Checkpoint model
"""

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np


@dataclass
class Checkpoint:
    """
    Training config, parameter arrays and selection state

    params maps parameter names (as produced by FusionModel.parameters())
    to full-precision arrays.
    """
    config: Dict[str, Any]
    stream_dims: Dict[str, int]
    num_classes: int
    params: 'OrderedDict[str, np.ndarray]'
    epoch: int = 0
    best_score: Optional[float] = None
    rng_state: Optional[Dict[str, Any]] = None
    format_version: int = field(default=1)
