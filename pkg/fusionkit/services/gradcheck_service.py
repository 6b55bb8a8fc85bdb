"""
Gradient Check Service
Finite-difference checks over every strategy, decoder and loss combination
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from config import Config
from fusionkit.core.gradcheck import GradCheckReport, grad_check
from fusionkit.models import DatasetManifest, DecoderKind, LossKind, StrategyVariant, StreamBatch
from fusionkit.services.model_service import ModelService
from fusionkit.services.training_service import TrainingService
from fusionkit.validators.run_config import TrainConfig

logger = logging.getLogger(__name__)

# Three acoustic and two visual streams, kept narrow so probing stays fast
GRADCHECK_STREAM_DIMS = {'HL18': 3, 'HL19': 3, 'HL20': 3, 'MR': 2, 'RF': 2}


@dataclass
class GradCheckCase:
    strategy: StrategyVariant
    decoder: DecoderKind
    loss: LossKind
    report: GradCheckReport

    @property
    def label(self) -> str:
        return f"strategy={int(self.strategy)} decoder={self.decoder.value} loss={self.loss.value}"

    def to_dict(self) -> dict:
        return {
            'strategy': int(self.strategy),
            'decoder': self.decoder.value,
            'loss': self.loss.value,
            'passed': self.report.passed,
            'max_error': self.report.max_error,
            'failures': self.report.failures()
        }


class GradCheckService:

    @staticmethod
    def random_batch(stream_dims: Dict[str, int], num_classes: int, batch_size: int,
                     rng: np.random.Generator) -> StreamBatch:
        return StreamBatch(
            ids=[f"gc-{i}" for i in range(batch_size)],
            streams={name: rng.standard_normal((batch_size, dim)) for name, dim in stream_dims.items()},
            emotions=rng.integers(0, num_classes, size=batch_size),
            valences=rng.uniform(-1.0, 1.0, size=batch_size)
        )

    @staticmethod
    def check_combination(strategy: StrategyVariant, decoder: DecoderKind, loss: LossKind,
                          hidden_dim: int = Config.GRADCHECK_HIDDEN_DIM,
                          num_classes: int = Config.GRADCHECK_NUM_CLASSES,
                          batch_size: int = Config.GRADCHECK_BATCH,
                          step: float = Config.GRADCHECK_STEP,
                          tol: float = Config.GRADCHECK_TOLERANCE,
                          seed: int = 0,
                          stream_dims: Optional[Dict[str, int]] = None) -> GradCheckCase:
        """
        Gradient-check the full loss of one model configuration

        Biases and rho are moved off zero so their gradients are exercised
        at a generic point.
        """
        stream_dims = dict(stream_dims or GRADCHECK_STREAM_DIMS)
        config = TrainConfig(strategy=strategy, decoder=decoder, loss=loss, hidden_dim=hidden_dim,
                             num_classes=num_classes, seed=seed)
        manifest = DatasetManifest(stream_dims=stream_dims, num_classes=num_classes)
        model = ModelService.init_model(config, manifest)

        rng = np.random.default_rng([seed, int(strategy)])
        params = model.parameters()
        for node in params.values():
            node.value = node.value + 0.1 * rng.standard_normal(node.value.shape)
        batch = GradCheckService.random_batch(stream_dims, num_classes, batch_size, rng)

        report = grad_check(lambda: TrainingService.compute_losses(model, batch)[0], list(params.values()),
                            step=step, tol=tol)
        case = GradCheckCase(strategy=StrategyVariant(strategy), decoder=DecoderKind(decoder),
                             loss=LossKind(loss), report=report)
        logger.info(f"Gradient check {case.label}: max error {report.max_error:.3e} "
                    f"{'PASS' if report.passed else 'FAIL'}")
        return case

    @staticmethod
    def check_all(**kwargs) -> List[GradCheckCase]:
        """Run check_combination for all 3 strategies x 2 decoders x 2 losses"""
        return [
            GradCheckService.check_combination(strategy, decoder, loss, **kwargs)
            for strategy, decoder, loss in itertools.product(StrategyVariant, DecoderKind, LossKind)
        ]
