"""
Prediction DAO
"""
from typing import List

import numpy as np

from fusionkit.dao.base_dao import BaseDAO, PathLike
from fusionkit.exceptions import EmptyDatasetException, SchemaException
from fusionkit.models import Prediction
from fusionkit.validators.records import PredictionRecordSchema


class PredictionDAO(BaseDAO):
    """DAO cho exported prediction records {"id", "probs", "valence"}"""

    def __init__(self):
        super().__init__(PredictionRecordSchema())

    def load(self, path: PathLike) -> List[Prediction]:
        """
        Load predictions; every record must have the same class count

        Raises:
            EmptyDatasetException: if the file has no records
            SchemaException: if class counts differ between records
        """
        predictions = []
        num_classes = None
        for line_no, record in self.iter_records(path):
            probs = np.asarray(record['probs'], dtype=np.float64)
            if num_classes is None:
                num_classes = probs.shape[0]
            elif probs.shape[0] != num_classes:
                raise SchemaException(
                    f"Line {line_no}: {probs.shape[0]} classes, expected {num_classes}",
                    stream='probs', line=line_no
                )
            predictions.append(Prediction(sample_id=record['id'], probs=probs, valence=record['valence']))
        if not predictions:
            raise EmptyDatasetException(f"Prediction file {path} contains no records")
        return predictions

    def write(self, path: PathLike, predictions: List[Prediction]) -> int:
        return self.write_all(path, (prediction.to_dict() for prediction in predictions))
