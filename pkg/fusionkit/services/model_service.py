"""
Model Service
Parameter initialization, forward passes and checkpoint conversion
"""

import logging
from collections import OrderedDict
from typing import Dict, Optional, Tuple

import numpy as np

from fusionkit.core.graph import Node, constant, parameter
from fusionkit.exceptions import ConfigurationException, ContractException, DimensionException, SchemaException
from fusionkit.models import Checkpoint, DatasetManifest, FusionModel, StreamBatch, UncertaintyWeights
from fusionkit.services.decoder_service import DecoderOutput, DecoderService
from fusionkit.services.fusion_service import FusedState, FusionService
from fusionkit.validators.run_config import TrainConfig, parse_train_config

logger = logging.getLogger(__name__)


class XavierInitializer:
    """Uniform(-sqrt(6/(fan_in+fan_out)), +sqrt(...)) weights, zero biases"""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng

    def weight(self, rows: int, cols: int) -> Node:
        limit = np.sqrt(6.0 / (rows + cols))
        return parameter(self.rng.uniform(-limit, limit, size=(rows, cols)))

    def bias(self, cols: int) -> Node:
        return parameter(np.zeros((1, cols)))


class ModelService:

    @staticmethod
    def resolve_streams(config: TrainConfig, manifest: DatasetManifest) -> Dict[str, int]:
        """
        Stream name -> dim for the streams the model fuses

        Raises:
            ConfigurationException: if the configured subset names unknown streams
        """
        if config.streams is None:
            return dict(manifest.stream_dims)
        unknown = [name for name in config.streams if name not in manifest.stream_dims]
        if unknown:
            raise ConfigurationException(
                f"Configured streams {unknown} are not in the dataset ({manifest.stream_names})",
                field_errors={'streams': f'unknown: {unknown}'}
            )
        return {name: manifest.stream_dims[name] for name in config.streams}

    @staticmethod
    def init_model(config: TrainConfig, manifest: DatasetManifest, seed: Optional[int] = None) -> FusionModel:
        """
        Build a freshly initialized model

        Args:
            config: Training configuration (strategy, decoder, D, C, modality map)
            manifest: Stream dims and class count of the data
            seed: Init seed; defaults to config.seed

        Returns:
            FusionModel with Xavier-uniform weights, zero biases and rho = 0

        Raises:
            ConfigurationException: if the modality map misses a stream or the
                strategy lacks a modality
        """
        seed = config.seed if seed is None else seed
        init = XavierInitializer(np.random.default_rng(seed))
        stream_dims = ModelService.resolve_streams(config, manifest)
        num_classes = config.num_classes or manifest.num_classes

        encoder = FusionService.build_encoder(config.strategy, stream_dims, config.modality_map,
                                               config.hidden_dim, init)
        decoder = DecoderService.build_decoder(config.decoder, config.hidden_dim, num_classes, init)
        uncertainty = UncertaintyWeights(rho1=parameter(np.zeros((1, 1))), rho2=parameter(np.zeros((1, 1))))

        model = FusionModel(
            config=config,
            stream_dims=stream_dims,
            num_classes=num_classes,
            encoder=encoder,
            decoder=decoder,
            uncertainty=uncertainty
        )
        logger.debug(f"Initialized model with {len(model.parameters())} parameter tensors (seed {seed})")
        return model

    @staticmethod
    def stream_nodes(model: FusionModel, batch: StreamBatch) -> Dict[str, Node]:
        """
        Wrap the model's streams of a batch as constants

        Raises:
            SchemaException: if a stream is missing or has the wrong width
        """
        nodes = {}
        for name, dim in model.stream_dims.items():
            if name not in batch.streams:
                raise SchemaException(f"Batch has no stream '{name}'", stream=name)
            matrix = batch.streams[name]
            if matrix.shape[1] != dim:
                raise SchemaException(f"Stream '{name}' has width {matrix.shape[1]}, model expects {dim}", stream=name)
            nodes[name] = constant(matrix, name=name)
        return nodes

    @staticmethod
    def run_model(model: FusionModel, batch: StreamBatch) -> Tuple[FusedState, DecoderOutput]:
        """Forward a batch through encoder and decoder"""
        if len(batch) == 0:
            raise ContractException("Cannot run the model on an empty batch")
        state = FusionService.fuse(model.encoder, ModelService.stream_nodes(model, batch))
        return state, DecoderService.decode(model.decoder, state.fused)

    @staticmethod
    def snapshot_params(model: FusionModel) -> 'OrderedDict[str, np.ndarray]':
        return OrderedDict((name, node.value.copy()) for name, node in model.parameters().items())

    @staticmethod
    def load_params(model: FusionModel, params: 'OrderedDict[str, np.ndarray]') -> None:
        """
        Copy saved arrays into the model's parameters

        Raises:
            ContractException: if the name sets differ
            DimensionException: if a shape differs
        """
        current = model.parameters()
        if set(current) != set(params):
            raise ContractException(
                "Checkpoint parameters do not match the model",
                details={
                    'missing': sorted(set(current) - set(params)),
                    'unexpected': sorted(set(params) - set(current))
                }
            )
        for name, node in current.items():
            array = np.asarray(params[name], dtype=np.float64)
            if array.shape != node.value.shape:
                raise DimensionException(f"Parameter '{name}' has shape {array.shape}, model expects {node.value.shape}",
                                         shapes=[array.shape, node.value.shape])
            node.value = array.copy()

    @staticmethod
    def make_checkpoint(model: FusionModel, params: 'OrderedDict[str, np.ndarray]', epoch: int,
                        best_score: Optional[float], rng_state: Optional[dict] = None) -> Checkpoint:
        return Checkpoint(
            config=model.config.model_dump(mode='json'),
            stream_dims=dict(model.stream_dims),
            num_classes=model.num_classes,
            params=OrderedDict((name, array.copy()) for name, array in params.items()),
            epoch=epoch,
            best_score=best_score,
            rng_state=rng_state
        )

    @staticmethod
    def model_from_checkpoint(checkpoint: Checkpoint) -> FusionModel:
        """
        Rebuild the model a checkpoint was saved from

        Raises:
            ConfigurationException: if the stored config no longer validates
            ContractException: if the stored parameters do not fit the rebuilt model
        """
        config = parse_train_config(checkpoint.config)
        manifest = DatasetManifest(stream_dims=dict(checkpoint.stream_dims), num_classes=checkpoint.num_classes)
        model = ModelService.init_model(config, manifest)
        ModelService.load_params(model, checkpoint.params)
        return model
