"""
circloyd record persistence

CSV and JSON emission for analysis records. Floats are written with 17
significant digits so a CSV read back reproduces the doubles exactly.
"""

import csv
import io
import json
import logging
import math
import sys
from enum import Enum
from pathlib import Path
from typing import Any, List, Mapping, Optional, Sequence, Union

from pydantic import BaseModel

logger = logging.getLogger(__name__)

Row = Union[Mapping[str, Any], BaseModel]


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return "nan" if math.isnan(value) else format(value, ".17g")
    return str(value)


def parse_value(text: str) -> Any:
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


class RecordStore:
    """
    Writes records to a file, or to stdout when no path is given.

    Rows may be pydantic models or plain mappings; columns fix the order.
    """

    def __init__(self, path: Optional[Path] = None):
        self.path = Path(path) if path is not None else None

    # -------------------------------------------------------------------------
    # Rendering
    # -------------------------------------------------------------------------

    @staticmethod
    def render_csv(rows: Sequence[Row], columns: Sequence[str]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            data = row.model_dump() if isinstance(row, BaseModel) else row
            writer.writerow([format_value(data.get(col)) for col in columns])
        return buffer.getvalue()

    @staticmethod
    def render_json(payload: Any) -> str:
        if isinstance(payload, BaseModel):
            payload = payload.model_dump(mode="json")
        elif isinstance(payload, list):
            payload = [p.model_dump(mode="json") if isinstance(p, BaseModel) else p
                       for p in payload]
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    @staticmethod
    def parse_csv(text: str) -> List[dict]:
        reader = csv.DictReader(io.StringIO(text))
        return [{key: parse_value(value) for key, value in row.items()} for row in reader]

    # -------------------------------------------------------------------------
    # I/O
    # -------------------------------------------------------------------------

    def write_text(self, text: str) -> None:
        if self.path is None:
            sys.stdout.write(text)
            sys.stdout.flush()
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text(text, encoding="utf-8")
        logger.info("wrote %s (%d bytes)", self.path, len(text))

    def write_csv(self, rows: Sequence[Row], columns: Sequence[str]) -> None:
        self.write_text(self.render_csv(rows, columns))

    def write_json(self, payload: Any) -> None:
        self.write_text(self.render_json(payload))

    def read_csv(self) -> List[dict]:
        if self.path is None:
            raise ValueError("no path to read from")
        return self.parse_csv(self.path.read_text(encoding="utf-8"))
