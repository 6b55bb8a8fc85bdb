"""
Decoder Service
Joint emotion/valence decoding (JDEV) and the independent-heads baseline
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from fusionkit.core import ops
from fusionkit.core.graph import Node
from fusionkit.exceptions import DimensionException
from fusionkit.models import BaselineParams, DecoderKind, JdevParams, Prediction
from fusionkit.services.fusion_service import ParameterInitializer


@dataclass
class DecoderOutput:
    """Batch decoder outputs; valence_direct and valence_from_emotion are JDEV-only"""
    logits: Node  # B×C
    probs: Node  # B×C
    valence: Node  # B×1
    valence_direct: Optional[Node] = None
    valence_from_emotion: Optional[Node] = None


class DecoderService:

    @staticmethod
    def _check_fused(fused: Node, W_e: Node) -> None:
        if fused.shape[1] != W_e.shape[0]:
            raise DimensionException(
                f"Fused state width {fused.shape[1]} does not match decoder input {W_e.shape[0]}",
                shapes=[fused.shape, W_e.shape]
            )

    @staticmethod
    def jdev_forward(params: JdevParams, fused: Node) -> DecoderOutput:
        """
        Joint decoding: the emotion branch feeds the valence estimate

        e~ = h W_e + b_e;  e^ = softmax(e~)
        v~ = h W_v + b_v;  v~e = tanh(e~ W_ev + b_ev)
        v^ = [v~, v~e] W_vv + b_vv

        v~e reads the logits e~, not the posterior.
        """
        DecoderService._check_fused(fused, params.W_e)
        logits = ops.add_bias(ops.matmul(fused, params.W_e), params.b_e)
        probs = ops.softmax_rows(logits)
        direct = ops.add_bias(ops.matmul(fused, params.W_v), params.b_v)
        from_emotion = ops.tanh(ops.add_bias(ops.matmul(logits, params.W_ev), params.b_ev))
        valence = ops.add_bias(ops.matmul(ops.concat_cols([direct, from_emotion]), params.W_vv), params.b_vv)
        return DecoderOutput(logits=logits, probs=probs, valence=valence,
                             valence_direct=direct, valence_from_emotion=from_emotion)

    @staticmethod
    def baseline_forward(params: BaselineParams, fused: Node) -> DecoderOutput:
        """Two independent linear heads: softmax(h W_e + b_e) and h W_v + b_v"""
        DecoderService._check_fused(fused, params.W_e)
        logits = ops.add_bias(ops.matmul(fused, params.W_e), params.b_e)
        return DecoderOutput(
            logits=logits,
            probs=ops.softmax_rows(logits),
            valence=ops.add_bias(ops.matmul(fused, params.W_v), params.b_v)
        )

    @staticmethod
    def decode(params, fused: Node) -> DecoderOutput:
        if isinstance(params, JdevParams):
            return DecoderService.jdev_forward(params, fused)
        return DecoderService.baseline_forward(params, fused)

    @staticmethod
    def build_decoder(kind: DecoderKind, hidden_dim: int, num_classes: int, init: ParameterInitializer):
        """Create decoder parameters with the shapes of the chosen kind"""
        kind = DecoderKind(kind)
        heads = dict(
            W_e=init.weight(hidden_dim, num_classes),
            b_e=init.bias(num_classes),
            W_v=init.weight(hidden_dim, 1),
            b_v=init.bias(1),
        )
        if kind == DecoderKind.BASELINE:
            return BaselineParams(**heads)
        return JdevParams(
            **heads,
            W_ev=init.weight(num_classes, 1),
            b_ev=init.bias(1),
            W_vv=init.weight(2, 1),
            b_vv=init.bias(1)
        )

    @staticmethod
    def classify(pred: Prediction) -> int:
        """Argmax of the posterior; ties go to the lowest index"""
        return int(np.argmax(pred.probs))

    @staticmethod
    def to_predictions(ids: Sequence[str], output: DecoderOutput) -> List[Prediction]:
        """Split batch outputs into per-sample Prediction objects"""
        predictions = []
        for i, sample_id in enumerate(ids):
            predictions.append(Prediction(
                sample_id=sample_id,
                probs=output.probs.value[i].copy(),
                valence=float(output.valence.value[i, 0]),
                logits=output.logits.value[i].copy(),
                valence_direct=None if output.valence_direct is None else float(output.valence_direct.value[i, 0]),
                valence_from_emotion=(None if output.valence_from_emotion is None
                                      else float(output.valence_from_emotion.value[i, 0]))
            ))
        return predictions
