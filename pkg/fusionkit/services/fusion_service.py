"""
Fusion Service
Attention-guided feature gathering (AFG) and the three hierarchical fusion strategies
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Protocol, Sequence, Tuple

from fusionkit.core import ops
from fusionkit.core.graph import Node
from fusionkit.exceptions import ConfigurationException, ContractException, DimensionException
from fusionkit.models import AfgParams, FusionEncoder, Modality, StrategyVariant

logger = logging.getLogger(__name__)


class ParameterInitializer(Protocol):
    def weight(self, rows: int, cols: int) -> Node: ...

    def bias(self, cols: int) -> Node: ...


@dataclass
class AfgOutput:
    fused: Node  # B×D
    alpha: Node  # B×N


@dataclass
class FusedState:
    """Fused hidden state plus attention weights of every AFG instance"""
    fused: Node
    alphas: Dict[str, Node] = field(default_factory=dict)


class FusionService:

    @staticmethod
    def afg_forward(params: AfgParams, inputs: Sequence[Node]) -> AfgOutput:
        """
        Attention-guided feature gathering over N inputs

        p_n = x_n A_n + c_n aligns input n to D; s_n = p_n . W_alpha[:, n] + b_alpha[n];
        alpha = softmax(s); output = sum_n alpha_n p_n. Each row of the inputs
        is one sample.

        Args:
            params: AFG parameters with one align map per input
            inputs: N nodes of shape B×d_n, in params.input_names order

        Returns:
            AfgOutput with the B×D fused state and B×N attention weights

        Raises:
            ContractException: if inputs is empty or its length differs from N
            DimensionException: if an input's width differs from its align map
        """
        if not inputs:
            raise ContractException(f"AFG '{params.name}' needs at least one input")
        if len(inputs) != params.num_inputs:
            raise ContractException(
                f"AFG '{params.name}' expects {params.num_inputs} inputs, got {len(inputs)}"
            )

        aligned: List[Node] = []
        scores: List[Node] = []
        for n, x in enumerate(inputs):
            weight = params.align_weights[n]
            if x.shape[1] != weight.shape[0]:
                raise DimensionException(
                    f"AFG '{params.name}' input '{params.input_names[n]}' has width {x.shape[1]}, "
                    f"align matrix expects {weight.shape[0]}",
                    shapes=[x.shape, weight.shape]
                )
            p = ops.add_bias(ops.matmul(x, weight), params.align_biases[n])
            aligned.append(p)
            scores.append(ops.matmul(p, ops.slice_cols(params.attention_weight, n, n + 1)))

        alpha = ops.softmax_rows(ops.add_bias(ops.concat_cols(scores), params.attention_bias))

        fused = ops.scale_rows(aligned[0], ops.slice_cols(alpha, 0, 1))
        for n in range(1, len(aligned)):
            fused = ops.add(fused, ops.scale_rows(aligned[n], ops.slice_cols(alpha, n, n + 1)))
        return AfgOutput(fused=fused, alpha=alpha)

    @staticmethod
    def partition_streams(stream_names: Sequence[str],
                          modality_map: Mapping[str, object]) -> Tuple[List[str], List[str]]:
        """
        Split stream names by modality, preserving order

        Raises:
            ConfigurationException: if a stream has no modality
        """
        acoustic, visual = [], []
        for name in stream_names:
            if name not in modality_map:
                raise ConfigurationException(
                    f"Modality map has no entry for stream '{name}'",
                    field_errors={f'modality_map.{name}': 'missing'}
                )
            modality = Modality(modality_map[name])
            (acoustic if modality == Modality.ACOUSTIC else visual).append(name)
        return acoustic, visual

    @staticmethod
    def make_afg(name: str, inputs: Sequence[Tuple[str, int]], hidden_dim: int,
                 init: ParameterInitializer) -> AfgParams:
        return AfgParams(
            name=name,
            input_names=[input_name for input_name, _ in inputs],
            align_weights=[init.weight(dim, hidden_dim) for _, dim in inputs],
            align_biases=[init.bias(hidden_dim) for _ in inputs],
            attention_weight=init.weight(hidden_dim, len(inputs)),
            attention_bias=init.bias(len(inputs))
        )

    @staticmethod
    def build_encoder(variant: StrategyVariant, stream_dims: Mapping[str, int],
                      modality_map: Mapping[str, object], hidden_dim: int,
                      init: ParameterInitializer) -> FusionEncoder:
        """
        Create the AFG instances and wiring of one fusion strategy

        1: one AFG over every stream.
        2: one AFG per acoustic stream over {that stream, all visual streams},
           then a top AFG over those audio-visual states.
        3: one AFG over the acoustic streams, then an AFG over
           {unified acoustic, visual streams}.

        Raises:
            ConfigurationException: if strategy 2 or 3 lacks an acoustic or visual stream
        """
        variant = StrategyVariant(variant)
        names = list(stream_dims)
        acoustic, visual = FusionService.partition_streams(names, modality_map)
        D = hidden_dim

        if variant != StrategyVariant.PARALLEL and (not acoustic or not visual):
            raise ConfigurationException(
                f"Strategy {int(variant)} needs at least one acoustic and one visual stream "
                f"(acoustic={acoustic}, visual={visual})"
            )

        afgs: Dict[str, AfgParams] = {}
        if variant == StrategyVariant.PARALLEL:
            afgs['parallel'] = FusionService.make_afg('parallel', [(n, stream_dims[n]) for n in names], D, init)
        elif variant == StrategyVariant.PER_ACOUSTIC_AV:
            for a in acoustic:
                inputs = [(a, stream_dims[a])] + [(v, stream_dims[v]) for v in visual]
                afgs[f'av.{a}'] = FusionService.make_afg(f'av.{a}', inputs, D, init)
            afgs['top'] = FusionService.make_afg('top', [(f'av.{a}', D) for a in acoustic], D, init)
        else:
            afgs['acoustic'] = FusionService.make_afg('acoustic', [(a, stream_dims[a]) for a in acoustic], D, init)
            inter_inputs = [('acoustic', D)] + [(v, stream_dims[v]) for v in visual]
            afgs['inter'] = FusionService.make_afg('inter', inter_inputs, D, init)

        logger.debug(f"Built strategy {int(variant)} encoder with AFGs {list(afgs)}")
        return FusionEncoder(variant=variant, afgs=afgs, acoustic_streams=acoustic, visual_streams=visual)

    @staticmethod
    def fuse(encoder: FusionEncoder, streams: Mapping[str, Node]) -> FusedState:
        """
        Map a batch of streams to fused states with the encoder's wiring

        Args:
            encoder: FusionEncoder from build_encoder
            streams: stream name -> B×d_n node

        Returns:
            FusedState with the B×D output and every AFG's attention weights
        """
        alphas: Dict[str, Node] = {}

        def run(afg_name: str, inputs: Sequence[Node]) -> Node:
            out = FusionService.afg_forward(encoder.afgs[afg_name], inputs)
            alphas[afg_name] = out.alpha
            return out.fused

        missing = [n for n in encoder.acoustic_streams + encoder.visual_streams if n not in streams]
        if missing:
            raise ContractException(f"Missing streams for fusion: {missing}")

        visual_inputs = [streams[v] for v in encoder.visual_streams]
        if encoder.variant == StrategyVariant.PARALLEL:
            afg = encoder.afgs['parallel']
            fused = run('parallel', [streams[n] for n in afg.input_names])
        elif encoder.variant == StrategyVariant.PER_ACOUSTIC_AV:
            av_states = [run(f'av.{a}', [streams[a]] + visual_inputs) for a in encoder.acoustic_streams]
            fused = run('top', av_states)
        else:
            unified = run('acoustic', [streams[a] for a in encoder.acoustic_streams])
            fused = run('inter', [unified] + visual_inputs)

        return FusedState(fused=fused, alphas=alphas)
