"""
Dataset DAO
Loads and writes feature datasets, enforcing one manifest across records
"""
import logging
from typing import List, Optional, Tuple

import numpy as np

from fusionkit.dao.base_dao import BaseDAO, PathLike
from fusionkit.exceptions import EmptyDatasetException, LabelException, SchemaException
from fusionkit.models import DatasetManifest, FeatureSample
from fusionkit.validators.records import FeatureRecordSchema

logger = logging.getLogger(__name__)


class DatasetDAO(BaseDAO):
    """DAO cho newline-delimited feature records"""

    def __init__(self):
        super().__init__(FeatureRecordSchema())

    def load(self, path: PathLike, num_classes: Optional[int] = None) -> Tuple[DatasetManifest, List[FeatureSample]]:
        """
        Load and validate a dataset

        The manifest is taken from the first record and enforced on all
        others.

        Args:
            path: Dataset file
            num_classes: C from the run config; inferred as max label + 1 (at least 2) when None

        Returns:
            (manifest, samples)

        Raises:
            EmptyDatasetException: if the file has no records
            ParseException: on malformed records
            SchemaException: on stream names or dims that differ from the first record
            LabelException: on emotion outside [0, C)
        """
        manifest: Optional[DatasetManifest] = None
        samples: List[FeatureSample] = []
        emotion_lines: List[Tuple[int, int]] = []

        for line_no, record in self.iter_records(path):
            streams = {name: np.asarray(values, dtype=np.float64) for name, values in record['streams'].items()}

            if manifest is None:
                manifest = DatasetManifest(
                    stream_dims={name: int(v.shape[0]) for name, v in streams.items()},
                    num_classes=num_classes or 2,
                    has_emotion=record['emotion'] is not None,
                    has_valence=record['valence'] is not None
                )
            else:
                self._check_streams(manifest, streams, line_no)

            if record['emotion'] is not None:
                emotion_lines.append((line_no, record['emotion']))
            manifest.has_emotion = manifest.has_emotion and record['emotion'] is not None
            manifest.has_valence = manifest.has_valence and record['valence'] is not None

            samples.append(FeatureSample(
                id=record['id'],
                streams=streams,
                emotion=record['emotion'],
                valence=record['valence']
            ))

        if manifest is None:
            raise EmptyDatasetException(f"Dataset {path} contains no records")

        if num_classes is None and emotion_lines:
            manifest.num_classes = max(2, max(label for _, label in emotion_lines) + 1)
        for line_no, label in emotion_lines:
            if not 0 <= label < manifest.num_classes:
                raise LabelException(
                    f"Emotion {label} on line {line_no} outside [0, {manifest.num_classes})",
                    line=line_no, label=label
                )

        manifest.sample_count = len(samples)
        logger.info(f"Loaded {len(samples)} samples with streams {manifest.stream_names} from {path}")
        return manifest, samples

    def write(self, path: PathLike, samples: List[FeatureSample]) -> int:
        return self.write_all(path, (sample.to_dict() for sample in samples))

    @staticmethod
    def _check_streams(manifest: DatasetManifest, streams: dict, line_no: int) -> None:
        missing = set(manifest.stream_dims) - set(streams)
        extra = set(streams) - set(manifest.stream_dims)
        if missing or extra:
            name = sorted(missing or extra)[0]
            raise SchemaException(
                f"Line {line_no}: stream set differs from manifest at '{name}'",
                stream=name, line=line_no
            )
        for name, values in streams.items():
            if values.shape[0] != manifest.stream_dims[name]:
                raise SchemaException(
                    f"Line {line_no}: stream '{name}' has length {values.shape[0]}, "
                    f"expected {manifest.stream_dims[name]}",
                    stream=name, line=line_no
                )


def load_dataset(path: PathLike, num_classes: Optional[int] = None) -> Tuple[DatasetManifest, List[FeatureSample]]:
    return DatasetDAO().load(path, num_classes)


def write_dataset(path: PathLike, samples: List[FeatureSample]) -> int:
    return DatasetDAO().write(path, samples)
