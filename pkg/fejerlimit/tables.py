"""Deterministic CSV and JSON rendering of result tables."""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence, Union

import numpy as np

Cell = Union[int, float, str, bool, None]


class OutputFormat(str, enum.Enum):
    """Supported table encodings."""

    CSV = "csv"
    JSON = "json"


def format_cell(value: Any) -> str:
    """Text form of one CSV cell; floats carry 17 significant digits."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    if isinstance(value, enum.Enum):
        return str(value.value)
    return str(value)


def _json_value(value: Any) -> Any:
    """Plain JSON-compatible value; non-finite floats become strings."""
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else repr(value)
    if isinstance(value, Mapping):
        return {str(key): _json_value(item) for key, item in value.items()}  # type: ignore
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_json_value(item) for item in value]  # type: ignore
    return value


def _json_float(value: float) -> str:
    """17 significant digits, kept recognisably a float."""
    text = f"{value:.17g}"
    return text if "." in text or "e" in text else text + ".0"


def _json_text(value: Any, level: int) -> str:
    """JSON text laid out like ``json.dumps(indent=2)`` with floats from :func:`_json_float`."""
    if isinstance(value, float):
        return _json_float(value)
    inner = "  " * (level + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [
            f"{inner}{json.dumps(key)}: {_json_text(item, level + 1)}" for key, item in value.items()  # type: ignore
        ]
        return "{\n" + ",\n".join(items) + "\n" + "  " * level + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        items = [inner + _json_text(item, level + 1) for item in value]  # type: ignore
        return "[\n" + ",\n".join(items) + "\n" + "  " * level + "]"
    return json.dumps(value)


@dataclass(frozen=True)
class Table:
    """A named table with metadata and a footer of summary values.

    Attributes
    ----------
    name: str
        Table name, written first in both encodings.
    columns: tuple[str, ...]
        Column headers.
    rows: tuple[tuple[Cell, ...], ...]
        Row values, one entry per column.
    metadata: Mapping[str, Any]
        Run description echoed above the data, in insertion order.
    footer: Mapping[str, Any]
        Summary values written below the data, in insertion order.
    """

    name: str
    columns: tuple[str, ...]
    rows: tuple[tuple[Cell, ...], ...]
    metadata: Mapping[str, Any] = field(default_factory=dict)
    footer: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "rows", tuple(tuple(row) for row in self.rows))
        for index, row in enumerate(self.rows):
            if len(row) != len(self.columns):
                raise ValueError(f"row {index} has {len(row)} cells, expected {len(self.columns)}")

    def to_csv(self) -> str:
        """CSV with ``#`` metadata lines, one header line, the rows, and ``#`` footer lines."""
        buffer = io.StringIO()
        buffer.write(f"# table: {self.name}\n")
        for key, value in self.metadata.items():
            buffer.write(f"# {key}: {_metadata_text(value)}\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_cell(value) for value in row])
        for key, value in self.footer.items():
            buffer.write(f"# footer {key}: {_metadata_text(value)}\n")
        return buffer.getvalue()

    def to_json(self) -> str:
        """JSON object with the same content as :meth:`to_csv`."""
        payload = {
            "table": self.name,
            "metadata": _json_value(self.metadata),
            "columns": list(self.columns),
            "rows": _json_value(self.rows),
            "footer": _json_value(self.footer),
        }
        return _json_text(payload, 0) + "\n"

    def render(self, output_format: OutputFormat | str) -> str:
        """Encode the table in the requested format."""
        if OutputFormat(output_format) is OutputFormat.CSV:
            return self.to_csv()
        return self.to_json()

    def write(self, path: str | Path, output_format: OutputFormat | str) -> Path:
        """Write the encoded table to ``path`` and return the path."""
        target = Path(path)
        with open(target, "w", encoding="utf-8", newline="") as file:
            file.write(self.render(output_format))
        return target


def _metadata_text(value: Any) -> str:
    if isinstance(value, (Mapping, list, tuple, np.ndarray)):
        return json.dumps(_json_value(value), separators=(",", ":"))
    return format_cell(value)


def table_from_columns(
    name: str,
    columns: Mapping[str, Sequence[Cell] | np.ndarray],
    metadata: Mapping[str, Any] | None = None,
    footer: Mapping[str, Any] | None = None,
) -> Table:
    """Build a Table from equal-length columns."""
    lengths = {len(values) for values in columns.values()}
    if len(lengths) > 1:
        raise ValueError(f"columns have different lengths {sorted(lengths)}")
    names = tuple(columns)
    rows = tuple(zip(*(list(values) for values in columns.values())))
    return Table(name=name, columns=names, rows=rows, metadata=metadata or {}, footer=footer or {})
