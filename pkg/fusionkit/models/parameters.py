"""
Trainable parameter containers for encoders, decoders and loss weights
"""

import math
from collections import OrderedDict
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Any, Dict, Iterator, List, Tuple, Union

from fusionkit.core.graph import Node


class StrategyVariant(IntEnum):
    """Fusion topologies over acoustic and visual streams"""
    PARALLEL = 1
    PER_ACOUSTIC_AV = 2
    INTRA_THEN_INTER = 3


class DecoderKind(str, Enum):
    JDEV = 'jdev'
    BASELINE = 'baseline'


class LossKind(str, Enum):
    UNCERTAINTY = 'uncertainty'
    FIXED_EQUAL = 'fixed-equal'


NamedParameters = Iterator[Tuple[str, Node]]


@dataclass
class AfgParams:
    """
    One attention-guided feature gathering instance

    align_weights[n] (d_n×D) and align_biases[n] (1×D) project input n to
    the common dimension; column n of attention_weight (D×N) scores it.
    """
    name: str
    input_names: List[str]
    align_weights: List[Node]
    align_biases: List[Node]
    attention_weight: Node
    attention_bias: Node

    @property
    def num_inputs(self) -> int:
        return len(self.input_names)

    @property
    def hidden_dim(self) -> int:
        return self.attention_weight.shape[0]

    def named_parameters(self, prefix: str = '') -> NamedParameters:
        base = f"{prefix}{self.name}"
        for input_name, weight, bias in zip(self.input_names, self.align_weights, self.align_biases):
            yield f"{base}.align.{input_name}.weight", weight
            yield f"{base}.align.{input_name}.bias", bias
        yield f"{base}.attention.weight", self.attention_weight
        yield f"{base}.attention.bias", self.attention_bias


@dataclass
class FusionEncoder:
    """AFG instances wired per strategy variant; afgs are ordered inputs-first"""
    variant: StrategyVariant
    afgs: Dict[str, AfgParams]
    acoustic_streams: List[str]
    visual_streams: List[str]

    def named_parameters(self, prefix: str = 'encoder.') -> NamedParameters:
        for afg in self.afgs.values():
            yield from afg.named_parameters(prefix)


@dataclass
class JdevParams:
    """Joint emotion/valence decoder: W_e (D×C), W_v (D×1), W_ev (C×1), W_vv (2×1) with output-sized biases"""
    W_e: Node
    b_e: Node
    W_v: Node
    b_v: Node
    W_ev: Node
    b_ev: Node
    W_vv: Node
    b_vv: Node

    kind = DecoderKind.JDEV

    def named_parameters(self, prefix: str = 'decoder.') -> NamedParameters:
        for key in ('W_e', 'b_e', 'W_v', 'b_v', 'W_ev', 'b_ev', 'W_vv', 'b_vv'):
            yield f"{prefix}{key}", getattr(self, key)


@dataclass
class BaselineParams:
    """Independent emotion and valence heads"""
    W_e: Node
    b_e: Node
    W_v: Node
    b_v: Node

    kind = DecoderKind.BASELINE

    def named_parameters(self, prefix: str = 'decoder.') -> NamedParameters:
        for key in ('W_e', 'b_e', 'W_v', 'b_v'):
            yield f"{prefix}{key}", getattr(self, key)


DecoderParams = Union[JdevParams, BaselineParams]


@dataclass
class UncertaintyWeights:
    """delta_j = exp(rho_j), so both weights stay positive without projection"""
    rho1: Node
    rho2: Node

    @property
    def delta1(self) -> float:
        return math.exp(self.rho1.item())

    @property
    def delta2(self) -> float:
        return math.exp(self.rho2.item())

    def named_parameters(self, prefix: str = 'uncertainty.') -> NamedParameters:
        yield f"{prefix}rho1", self.rho1
        yield f"{prefix}rho2", self.rho2


@dataclass
class FusionModel:
    """All trainable parameters for one (strategy, decoder) configuration"""
    config: Any
    stream_dims: Dict[str, int]
    num_classes: int
    encoder: FusionEncoder
    decoder: DecoderParams
    uncertainty: UncertaintyWeights

    @property
    def stream_names(self) -> List[str]:
        return list(self.stream_dims)

    def parameters(self) -> 'OrderedDict[str, Node]':
        params = OrderedDict()
        for source in (self.encoder, self.decoder, self.uncertainty):
            for name, node in source.named_parameters():
                node.name = name
                params[name] = node
        return params
