"""Rectangular result tables and their CSV form.

CSV dialect: comma separated, ``.`` decimal point, LF line endings, leading
``# key: value`` metadata lines, then a header row. Floats carry 12
significant digits.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

__all__ = ["OutputTable", "format_value", "digest"]

SIG_DIGITS = 12


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.{SIG_DIGITS}g}"
    if value is None:
        return ""
    if hasattr(value, "item"):
        return format_value(value.item())
    return str(value)


def digest(obj: Any) -> str:
    """Short stable hash of a JSON-serialisable object."""
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class OutputTable:
    columns: list[str]
    rows: list[list[Any]] = field(default_factory=list)
    metadata: dict[str, Any] = field(default_factory=dict)
    name: str = "table"

    def __post_init__(self) -> None:
        width = len(self.columns)
        for row in self.rows:
            if len(row) != width:
                raise ValueError(f"row has {len(row)} cells, table {self.name!r} has {width} columns")

    @classmethod
    def from_records(cls, records: list[dict[str, Any]], name: str = "table",
                     metadata: dict[str, Any] | None = None) -> OutputTable:
        if not records:
            raise ValueError("no records")
        columns = list(records[0])
        return cls(columns, [[r.get(c) for c in columns] for r in records], dict(metadata or {}), name)

    def append(self, row: list[Any]) -> None:
        if len(row) != len(self.columns):
            raise ValueError("row width does not match the header")
        self.rows.append(row)

    def column(self, name: str) -> list[Any]:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def body(self) -> str:
        lines = [",".join(self.columns)]
        lines += [",".join(format_value(v) for v in row) for row in self.rows]
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        meta = "".join(f"# {k}: {format_value(v)}\n" for k, v in self.metadata.items())
        return meta + self.body()

    def write(self, directory: str | Path) -> Path:
        path = Path(directory) / f"{self.name}.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            fh.write(self.to_csv())
        return path
