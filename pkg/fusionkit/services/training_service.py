"""
Training Service
Mini-batch Adam training with early stopping, evaluation and prediction
"""

import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import Config
from fusionkit.core.graph import Node, backward
from fusionkit.core.optim import Adam, clip_grad_norm
from fusionkit.exceptions import ContractException, NumericException
from fusionkit.models import Checkpoint, DatasetManifest, FeatureSample, FusionModel, MetricsReport, Prediction, StreamBatch
from fusionkit.services.dataset_service import DatasetService
from fusionkit.services.decoder_service import DecoderService
from fusionkit.services.loss_service import LossService
from fusionkit.services.metrics_service import MetricsService
from fusionkit.services.model_service import ModelService
from fusionkit.validators.run_config import TrainConfig

logger = logging.getLogger(__name__)

SHUFFLE_STREAM = 1


class TrainingService:

    @staticmethod
    def manifest_for(samples: Sequence[FeatureSample], num_classes: Optional[int] = None) -> DatasetManifest:
        """Manifest implied by a sample list; C defaults to max label + 1 (at least 2)"""
        if not samples:
            raise ContractException("Empty sample list")
        first = samples[0]
        if num_classes is None:
            labels = [s.emotion for s in samples if s.emotion is not None]
            num_classes = max(2, max(labels) + 1) if labels else 2
        return DatasetManifest(
            stream_dims={name: int(np.asarray(v).reshape(-1).shape[0]) for name, v in first.streams.items()},
            num_classes=num_classes,
            sample_count=len(samples),
            has_emotion=all(s.emotion is not None for s in samples),
            has_valence=all(s.valence is not None for s in samples)
        )

    @staticmethod
    def _require_labels(samples: Sequence[FeatureSample], what: str) -> None:
        if not samples:
            raise ContractException(f"{what} set is empty")
        unlabeled = [s.id for s in samples if not s.is_labeled]
        if unlabeled:
            raise ContractException(
                f"{what} set has {len(unlabeled)} unlabeled sample(s)",
                details={'ids': unlabeled[:10]}
            )

    @staticmethod
    def compute_losses(model: FusionModel, batch: StreamBatch) -> Tuple[Node, Node, Node]:
        """(total, cross-entropy, mse) graph roots for one labeled batch"""
        _, output = ModelService.run_model(model, batch)
        ce = LossService.ce_loss(output.logits, batch.emotions)
        mse = LossService.mse_loss(output.valence, batch.valences)
        return LossService.total_loss(model.config.loss, ce, mse, model.uncertainty), ce, mse

    @staticmethod
    def score_batch(model: FusionModel, batch: StreamBatch) -> MetricsReport:
        """Metrics of the current parameters on a labeled batch"""
        _, output = ModelService.run_model(model, batch)
        return MetricsService.build_report(
            labels=batch.emotions,
            predicted_labels=np.argmax(output.probs.value, axis=1),
            valence_true=batch.valences,
            valence_pred=output.valence.value[:, 0],
            num_classes=model.num_classes,
            dim_weight=model.config.dim_weight
        )

    @staticmethod
    def train(config: TrainConfig, train_set: Sequence[FeatureSample], val_set: Sequence[FeatureSample],
              manifest: Optional[DatasetManifest] = None) -> Tuple[Checkpoint, List[Dict[str, Any]]]:
        """
        Train one (strategy, decoder, loss) system

        Each epoch shuffles the train set with a generator seeded from
        config.seed, takes one Adam step per mini-batch, then scores the
        validation set. The parameters with the best validation combined score
        are kept; training stops after config.patience epochs without
        improvement.

        Args:
            config: Validated TrainConfig
            train_set: Labeled training samples
            val_set: Labeled validation samples
            manifest: Stream dims and class count; derived from the samples when omitted

        Returns:
            (checkpoint of the best epoch, one history row per epoch run). The
            checkpoint holds the shuffle generator state as of that epoch.

        Raises:
            ContractException: if either set is empty or unlabeled
            NumericException: on a non-finite loss or gradient, with epoch and batch
        """
        TrainingService._require_labels(train_set, 'Training')
        TrainingService._require_labels(val_set, 'Validation')
        if manifest is None:
            manifest = TrainingService.manifest_for(list(train_set) + list(val_set), config.num_classes)

        model = ModelService.init_model(config, manifest)
        params = list(model.parameters().values())
        optimizer = Adam(params, lr=config.learning_rate, beta1=config.beta1,
                         beta2=config.beta2, eps=config.epsilon)
        shuffle_rng = np.random.default_rng([config.seed, SHUFFLE_STREAM])

        train_batch = DatasetService.stack_streams(train_set, model.stream_names, model.stream_dims)
        val_batch = DatasetService.stack_streams(val_set, model.stream_names, model.stream_dims)

        best_params = ModelService.snapshot_params(model)
        best_rng_state = shuffle_rng.bit_generator.state
        best_score: Optional[float] = None
        best_epoch = 0
        stale = 0
        history: List[Dict[str, Any]] = []

        logger.info(
            f"Training strategy {int(config.strategy)} / {config.decoder.value} / {config.loss.value} "
            f"on {len(train_set)} samples (validation {len(val_set)})"
        )

        for epoch in range(1, config.max_epochs + 1):
            order = shuffle_rng.permutation(len(train_batch))
            totals = {'loss': 0.0, 'ce': 0.0, 'mse': 0.0}

            for batch_index, start in enumerate(range(0, len(order), config.batch_size)):
                batch = DatasetService.take_rows(train_batch, order[start:start + config.batch_size])
                optimizer.zero_grad()
                loss, ce, mse = TrainingService.compute_losses(model, batch)

                if not np.isfinite(loss.item()):
                    raise NumericException(
                        f"Non-finite loss at epoch {epoch}, batch {batch_index}",
                        details={'epoch': epoch, 'batch': batch_index}
                    )
                backward(loss)
                norm = clip_grad_norm(params, config.grad_clip)
                if not np.isfinite(norm):
                    raise NumericException(
                        f"Non-finite gradient at epoch {epoch}, batch {batch_index}",
                        details={'epoch': epoch, 'batch': batch_index}
                    )
                optimizer.step()

                size = len(batch)
                totals['loss'] += loss.item() * size
                totals['ce'] += ce.item() * size
                totals['mse'] += mse.item() * size

            report = TrainingService.score_batch(model, val_batch)
            row = {
                'epoch': epoch,
                'loss': totals['loss'] / len(train_batch),
                'ce': totals['ce'] / len(train_batch),
                'mse': totals['mse'] / len(train_batch),
                'delta1': model.uncertainty.delta1,
                'delta2': model.uncertainty.delta2,
                'dis': report.dis,
                'dim': report.dim,
                'com': report.com,
            }
            history.append(row)
            logger.debug(f"Epoch {epoch}: loss={row['loss']:.4f} dis={report.dis:.4f} "
                         f"dim={report.dim:.4f} com={report.com:.4f}")

            if best_score is None or report.com > best_score:
                best_score = report.com
                best_epoch = epoch
                best_params = ModelService.snapshot_params(model)
                best_rng_state = shuffle_rng.bit_generator.state
                stale = 0
            else:
                stale += 1
                if stale >= config.patience:
                    logger.info(f"Early stop at epoch {epoch}; best com {best_score:.4f} at epoch {best_epoch}")
                    break

        logger.info(f"Training finished after {len(history)} epoch(s); best epoch {best_epoch}")
        checkpoint = ModelService.make_checkpoint(model, best_params, best_epoch, best_score,
                                                  rng_state=best_rng_state)
        return checkpoint, history

    @staticmethod
    def predict(checkpoint: Checkpoint, samples: Sequence[FeatureSample]) -> List[Prediction]:
        """
        Predictions of a saved model; labels are not needed

        Raises:
            ContractException: if samples is empty
            SchemaException: if a sample lacks a model stream
        """
        if not samples:
            raise ContractException("No samples to predict")
        model = ModelService.model_from_checkpoint(checkpoint)
        batch = DatasetService.stack_streams(samples, model.stream_names, model.stream_dims)
        _, output = ModelService.run_model(model, batch)
        return DecoderService.to_predictions(batch.ids, output)

    @staticmethod
    def evaluate(checkpoint: Checkpoint, samples: Sequence[FeatureSample]) -> MetricsReport:
        """
        Score a saved model on a labeled dataset

        Raises:
            ContractException: if any sample is unlabeled
        """
        TrainingService._require_labels(samples, 'Evaluation')
        dim_weight = checkpoint.config.get('dim_weight', Config.COMBINED_DIM_WEIGHT)
        predictions = TrainingService.predict(checkpoint, samples)
        return MetricsService.score_predictions(predictions, samples, dim_weight=dim_weight)
