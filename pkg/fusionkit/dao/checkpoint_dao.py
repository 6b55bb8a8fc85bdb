"""
Checkpoint and history DAOs

Checkpoints are one JSON document; floats are written with repr precision
so save/load is exact. Histories are one JSON line per epoch.
"""
import json
import logging
from collections import OrderedDict
from pathlib import Path
from typing import Any, Dict, List

import numpy as np

from fusionkit.dao.base_dao import PathLike, read_document, write_document
from fusionkit.exceptions import ContractException, ParseException
from fusionkit.models import Checkpoint

logger = logging.getLogger(__name__)


class CheckpointDAO:
    """DAO cho checkpoint documents"""

    def save(self, path: PathLike, checkpoint: Checkpoint) -> None:
        document = {
            'format_version': checkpoint.format_version,
            'config': checkpoint.config,
            'stream_dims': checkpoint.stream_dims,
            'num_classes': checkpoint.num_classes,
            'epoch': checkpoint.epoch,
            'best_score': checkpoint.best_score,
            'rng_state': checkpoint.rng_state,
            'params': {
                name: {'shape': list(array.shape), 'data': array.reshape(-1).tolist()}
                for name, array in checkpoint.params.items()
            }
        }
        write_document(path, document)
        logger.info(f"Checkpoint written to {path} (epoch {checkpoint.epoch})")

    def load(self, path: PathLike) -> Checkpoint:
        """
        Load a checkpoint document

        Raises:
            ParseException: if required keys are missing or arrays are malformed
        """
        document = read_document(path)
        try:
            params = OrderedDict()
            for name, entry in document['params'].items():
                array = np.asarray(entry['data'], dtype=np.float64)
                params[name] = array.reshape(tuple(entry['shape']))
            return Checkpoint(
                config=document['config'],
                stream_dims={k: int(v) for k, v in document['stream_dims'].items()},
                num_classes=int(document['num_classes']),
                params=params,
                epoch=int(document.get('epoch', 0)),
                best_score=document.get('best_score'),
                rng_state=document.get('rng_state'),
                format_version=int(document.get('format_version', 1))
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ParseException(f"Malformed checkpoint {path}: {e}")


class HistoryDAO:
    """DAO cho per-epoch training history lines"""

    def save(self, path: PathLike, history: List[Dict[str, Any]]) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open('w', encoding='utf-8') as handle:
            for row in history:
                handle.write(json.dumps(row) + '\n')

    def load(self, path: PathLike) -> List[Dict[str, Any]]:
        path = Path(path)
        if not path.is_file():
            raise ContractException(f"File not found: {path}", error_code='FILE_NOT_FOUND')
        rows = []
        with path.open('rb') as handle:
            for line_no, raw_line in enumerate(handle, start=1):
                try:
                    line = raw_line.decode('utf-8')
                except UnicodeDecodeError as e:
                    raise ParseException(f"{path}:{line_no}: not valid UTF-8 ({e.reason})", line=line_no)
                if line.strip():
                    try:
                        rows.append(json.loads(line))
                    except json.JSONDecodeError as e:
                        raise ParseException(f"{path}:{line_no}: {e.msg}", line=line_no)
        return rows
