"""
Dataset Service
Handles synthetic data generation, train/validation splitting and batching
"""

import logging
from collections import Counter
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sklearn.model_selection import train_test_split

from fusionkit.exceptions import ContractException, SchemaException
from fusionkit.models import FeatureSample, StreamBatch
from fusionkit.validators.run_config import SynthSpec

logger = logging.getLogger(__name__)


class DatasetService:

    @staticmethod
    def class_means_for(spec: SynthSpec, rng: np.random.Generator) -> Dict[str, np.ndarray]:
        """Per-stream C×d class mean matrices, drawn from rng when SynthSpec gives none"""
        if spec.class_means is not None:
            return {name: np.asarray(spec.class_means[name], dtype=np.float64) for name in spec.stream_dims}
        return {
            name: spec.mean_scale * rng.standard_normal((spec.num_classes, dim))
            for name, dim in spec.stream_dims.items()
        }

    @staticmethod
    def polarity_class_means(stream_dims: Dict[str, int], valence_means: Sequence[float],
                             polarity_gap: float, level_gap: float,
                             rng: np.random.Generator) -> Dict[str, List[List[float]]]:
        """
        Class means grouped by valence sign

        Every stream gets two random orthonormal directions u and v. Class k
        sits at polarity_gap * sign(mu_k) * u + level_gap * r_k * v, where r_k
        is the centered rank of mu_k inside its sign group. Negative and
        positive classes separate along u; classes of one sign line up along v.

        Returns:
            Per-stream C×d lists, ready for SynthSpec.class_means

        Raises:
            ContractException: if a stream has fewer than 2 dimensions
        """
        mu = np.asarray(valence_means, dtype=np.float64)
        signs = np.where(mu >= 0, 1.0, -1.0)
        levels = np.zeros_like(mu)
        for sign in (-1.0, 1.0):
            members = np.flatnonzero(signs == sign)
            ranks = np.argsort(np.argsort(mu[members]))
            levels[members] = ranks - (len(members) - 1) / 2.0

        means = {}
        for name, dim in stream_dims.items():
            if dim < 2:
                raise ContractException(f"Stream '{name}' needs at least 2 dimensions, got {dim}")
            basis, _ = np.linalg.qr(rng.standard_normal((dim, 2)))
            u, v = basis[:, 0], basis[:, 1]
            means[name] = (polarity_gap * np.outer(signs, u) + level_gap * np.outer(levels, v)).tolist()
        return means

    @staticmethod
    def generate_synthetic(spec: SynthSpec) -> List[FeatureSample]:
        """
        Sample the emotion/valence mixture

        Each sample draws e ~ priors, v = mu_e + N(0, sigma^2) and every stream
        coordinate as class mean + N(0, sigma_f^2). The output is a pure
        function of spec, seed included.

        Args:
            spec: Validated SynthSpec

        Returns:
            List of labeled FeatureSample
        """
        rng = np.random.default_rng(spec.seed)
        means = DatasetService.class_means_for(spec, rng)
        priors = spec.resolved_priors()
        valence_means = spec.resolved_valence_means()
        n = spec.num_samples

        emotions = rng.choice(spec.num_classes, size=n, p=priors)
        valences = valence_means[emotions] + spec.valence_noise * rng.standard_normal(n)
        streams = {
            name: means[name][emotions] + spec.feature_noise * rng.standard_normal((n, dim))
            for name, dim in spec.stream_dims.items()
        }

        width = max(6, len(str(n)))
        samples = [
            FeatureSample(
                id=f"{spec.id_prefix}-{i:0{width}d}",
                streams={name: streams[name][i].copy() for name in spec.stream_dims},
                emotion=int(emotions[i]),
                valence=float(valences[i])
            )
            for i in range(n)
        ]
        logger.info(f"Generated {n} synthetic samples over {spec.num_classes} classes (seed {spec.seed})")
        return samples

    @staticmethod
    def split(samples: Sequence[FeatureSample], train_fraction: float,
              seed: int) -> Tuple[List[FeatureSample], List[FeatureSample]]:
        """
        Deterministic disjoint train/validation split

        Stratified by emotion when every sample is labeled; falls back to an
        unstratified split with a warning when a class has fewer than 2 samples.

        Raises:
            ContractException: if train_fraction is outside (0, 1) or there are fewer than 2 samples
        """
        if not 0.0 < train_fraction < 1.0:
            raise ContractException(f"train_fraction must be in (0, 1), got {train_fraction}")
        if len(samples) < 2:
            raise ContractException("Need at least 2 samples to split")

        indices = np.arange(len(samples))
        labels = [s.emotion for s in samples]
        stratify: Optional[List[int]] = None
        if all(label is not None for label in labels):
            counts = Counter(labels)
            if min(counts.values()) < 2:
                logger.warning(
                    f"Class with fewer than 2 samples ({dict(counts)}); falling back to unstratified split"
                )
            else:
                stratify = labels

        try:
            train_idx, val_idx = train_test_split(indices, train_size=train_fraction,
                                                  random_state=seed, stratify=stratify)
        except ValueError as e:
            if stratify is None:
                raise ContractException(f"Cannot split {len(samples)} samples at {train_fraction}: {e}")
            logger.warning(f"Stratified split impossible ({e}); falling back to unstratified split")
            train_idx, val_idx = train_test_split(indices, train_size=train_fraction, random_state=seed)

        return [samples[i] for i in train_idx], [samples[i] for i in val_idx]

    @staticmethod
    def stack_streams(samples: Sequence[FeatureSample], stream_names: Sequence[str],
                      stream_dims: Optional[Dict[str, int]] = None) -> StreamBatch:
        """
        Stack samples into one B×d matrix per stream

        Raises:
            SchemaException: if a sample lacks a stream or has the wrong dimension
        """
        streams = {}
        for name in stream_names:
            rows = []
            for sample in samples:
                if name not in sample.streams:
                    raise SchemaException(f"Sample '{sample.id}' has no stream '{name}'", stream=name)
                vector = np.asarray(sample.streams[name], dtype=np.float64).reshape(-1)
                if stream_dims is not None and vector.shape[0] != stream_dims[name]:
                    raise SchemaException(
                        f"Sample '{sample.id}' stream '{name}' has length {vector.shape[0]}, "
                        f"expected {stream_dims[name]}",
                        stream=name
                    )
                rows.append(vector)
            streams[name] = np.vstack(rows) if rows else np.zeros((0, stream_dims[name] if stream_dims else 0))

        emotions = None
        valences = None
        if samples and all(s.emotion is not None for s in samples):
            emotions = np.array([s.emotion for s in samples], dtype=np.int64)
        if samples and all(s.valence is not None for s in samples):
            valences = np.array([s.valence for s in samples], dtype=np.float64)

        return StreamBatch(ids=[s.id for s in samples], streams=streams, emotions=emotions, valences=valences)

    @staticmethod
    def take_rows(batch: StreamBatch, rows: np.ndarray) -> StreamBatch:
        """Sub-batch by row index"""
        return StreamBatch(
            ids=[batch.ids[i] for i in rows],
            streams={name: matrix[rows] for name, matrix in batch.streams.items()},
            emotions=None if batch.emotions is None else batch.emotions[rows],
            valences=None if batch.valences is None else batch.valences[rows]
        )
