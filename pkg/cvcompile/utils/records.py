"""
Experiment record files.

Line 1 is ``# `` followed by the JSON header; the rest is CSV with the
header's columns. Missing cells are written empty and read back as None.
Columns per command are described in ``record_schema.json``.
"""

import csv
import io
import json
import logging
import re
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Union

from ..core.exceptions import ConfigurationError, PreconditionError
from ..schemas.records import ExperimentRecord, RecordHeader

logger = logging.getLogger(__name__)

HEADER_PREFIX = "# "
SCHEMA_PATH = Path(__file__).parent / "record_schema.json"


@lru_cache(maxsize=1)
def load_record_schema() -> Dict[str, Any]:
    return json.loads(SCHEMA_PATH.read_text(encoding="utf-8"))


def schema_columns(command: str) -> List[str]:
    """Fixed leading columns of ``command``'s records, in order."""
    commands = load_record_schema()["commands"]
    if command not in commands:
        raise PreconditionError(f"No record schema for command '{command}'")
    return list(commands[command]["columns"])


def check_columns(command: str, columns: List[str]) -> None:
    """
    Fixed columns first, in schema order; any further column must match one
    of the command's patterns.

    Raises:
        PreconditionError: if the columns disagree with the shipped schema
    """
    fixed = schema_columns(command)
    if columns[: len(fixed)] != fixed:
        raise PreconditionError(
            f"{command} columns {columns[: len(fixed)]} differ from schema {fixed}"
        )
    patterns = load_record_schema()["commands"][command]["patterns"]
    extra = [
        name
        for name in columns[len(fixed) :]
        if not any(re.fullmatch(p, name) for p in patterns)
    ]
    if extra:
        raise PreconditionError(f"{command} columns {extra} are not in the schema")


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, dict)):
        return json.dumps(value)
    return str(value)


def _parse_cell(text: str) -> Any:
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    if text[:1] in "[{":
        try:
            return json.loads(text)
        except json.JSONDecodeError:
            return text
    return text


def render_record(record: ExperimentRecord) -> str:
    buffer = io.StringIO()
    buffer.write(HEADER_PREFIX + record.header.model_dump_json() + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    columns = record.header.columns
    writer.writerow(columns)
    for row in record.rows:
        writer.writerow([_cell(row.get(name)) for name in columns])
    return buffer.getvalue()


def write_record(record: ExperimentRecord, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_record(record), encoding="utf-8")
    logger.info(f"record written path={path} rows={len(record.rows)}")
    return path


def parse_record(text: str) -> ExperimentRecord:
    first, _, body = text.partition("\n")
    if not first.startswith(HEADER_PREFIX):
        raise ConfigurationError("Record does not start with a JSON header line")
    header = RecordHeader.model_validate_json(first[len(HEADER_PREFIX) :])
    reader = csv.reader(io.StringIO(body))
    columns = next(reader, None)
    if columns != header.columns:
        raise ConfigurationError("CSV columns do not match the record header")
    rows: List[Dict[str, Any]] = []
    for raw in reader:
        rows.append(
            {
                name: value
                for name, value in zip(columns, map(_parse_cell, raw))
                if value is not None
            }
        )
    return ExperimentRecord(header=header, rows=rows)


def read_record(path: Union[str, Path]) -> ExperimentRecord:
    return parse_record(Path(path).read_text(encoding="utf-8"))
