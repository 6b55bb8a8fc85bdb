"""
DAO package
File access objects for datasets, predictions, checkpoints and histories
"""

from fusionkit.dao.dataset_dao import DatasetDAO, load_dataset, write_dataset
from fusionkit.dao.prediction_dao import PredictionDAO
from fusionkit.dao.checkpoint_dao import CheckpointDAO, HistoryDAO

__all__ = ['DatasetDAO', 'load_dataset', 'write_dataset', 'PredictionDAO', 'CheckpointDAO', 'HistoryDAO']
