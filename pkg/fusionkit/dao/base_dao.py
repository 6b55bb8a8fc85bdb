"""
Base DAO (Data Access Object) class
Cung cấp các phương thức đọc/ghi cơ bản cho line-oriented JSON files
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Tuple, Union

from marshmallow import Schema, ValidationError

from fusionkit.exceptions import ContractException, ParseException

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def read_document(path: PathLike) -> Any:
    """
    Read one JSON document

    Raises:
        ContractException: if the file does not exist
        ParseException: if the file is not valid UTF-8 JSON
    """
    path = Path(path)
    if not path.is_file():
        raise ContractException(f"File not found: {path}", error_code='FILE_NOT_FOUND')
    data = path.read_bytes()
    try:
        text = data.decode('utf-8')
    except UnicodeDecodeError as e:
        line = data.count(b'\n', 0, e.start) + 1
        raise ParseException(f"{path}:{line}: not valid UTF-8 ({e.reason})", line=line)
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseException(f"{path}: {e.msg}", line=e.lineno)


def write_document(path: PathLike, document: Any) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2, sort_keys=False) + '\n', encoding='utf-8')


class BaseDAO:
    """
    Base DAO class cung cấp read/write cho one-record-per-line files

    Records are validated against a marshmallow schema on read and
    dumped through it on write.
    """

    def __init__(self, schema: Schema):
        """
        Khởi tạo DAO với record schema

        Args:
            schema: marshmallow schema for one line
        """
        self.schema = schema

    def iter_records(self, path: PathLike) -> Iterator[Tuple[int, Dict[str, Any]]]:
        """
        Yield (line number, validated record) pairs, skipping blank lines

        Raises:
            ContractException: if the file does not exist
            ParseException: on bad encoding, malformed JSON or schema violations, with line number
        """
        path = Path(path)
        if not path.is_file():
            raise ContractException(f"File not found: {path}", error_code='FILE_NOT_FOUND')

        with path.open('rb') as handle:
            for line_no, raw_line in enumerate(handle, start=1):
                try:
                    line = raw_line.decode('utf-8')
                except UnicodeDecodeError as e:
                    raise ParseException(f"{path}:{line_no}: not valid UTF-8 ({e.reason})", line=line_no)
                if not line.strip():
                    continue
                try:
                    raw = json.loads(line)
                except json.JSONDecodeError as e:
                    raise ParseException(f"{path}:{line_no}: {e.msg}", line=line_no)
                if not isinstance(raw, dict):
                    raise ParseException(f"{path}:{line_no}: record must be an object", line=line_no)
                try:
                    yield line_no, self.schema.load(raw)
                except ValidationError as e:
                    exc = ParseException(f"{path}:{line_no}: invalid record", line=line_no)
                    exc.details['field_errors'] = e.messages
                    raise exc

    def read_all(self, path: PathLike) -> List[Tuple[int, Dict[str, Any]]]:
        return list(self.iter_records(path))

    def write_all(self, path: PathLike, records: Iterable[Dict[str, Any]]) -> int:
        """
        Write records one per line

        Returns:
            int: Number of records written
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        count = 0
        with path.open('w', encoding='utf-8') as handle:
            for record in records:
                handle.write(json.dumps(self.schema.dump(record)) + '\n')
                count += 1
        logger.debug(f"Wrote {count} records to {path}")
        return count
