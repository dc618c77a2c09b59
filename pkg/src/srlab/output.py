"""Tabular outputs, JSON reports and run manifests."""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__

SCHEMA_VERSION = 1

MANIFEST_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "command", "parameters", "code_version", "timestamp"],
    "properties": {
        "schema_version": {"type": "integer", "const": SCHEMA_VERSION},
        "command": {"type": "string"},
        "parameters": {"type": "object"},
        "code_version": {"type": "string"},
        "timestamp": {"type": "string"},
    },
    "additionalProperties": False,
}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "manifest", "data"],
    "properties": {
        "schema_version": {"type": "integer", "const": SCHEMA_VERSION},
        "manifest": MANIFEST_SCHEMA,
        "data": {},
    },
}


def format_number(value) -> str:
    """17 significant digits, '.' separator, integers kept exact."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


@dataclass
class TimeSeries:
    """Rows of numbers under a fixed column schema."""

    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)

    def append(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"expected {len(self.columns)} values, got {len(values)}")
        self.rows.append(tuple(values))

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(format_number(v) for v in row) + "\n")
        return buf.getvalue()

    def to_data(self) -> dict:
        return {
            "columns": list(self.columns),
            "rows": [[_json_number(v) for v in row] for row in self.rows],
        }

    @classmethod
    def from_csv(cls, text: str) -> "TimeSeries":
        lines = text.splitlines()
        ts = cls(tuple(lines[0].split(",")))
        for line in lines[1:]:
            ts.rows.append(tuple(float(v) for v in line.split(",")))
        return ts


def _json_number(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    v = float(v)
    return v if math.isfinite(v) else None


@dataclass(frozen=True)
class RunManifest:
    command: str
    parameters: dict
    code_version: str = __version__
    timestamp: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds")
    )

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "parameters": dict(self.parameters),
            "code_version": self.code_version,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, record: dict) -> "RunManifest":
        jsonschema.validate(record, MANIFEST_SCHEMA)
        return cls(
            command=record["command"],
            parameters=dict(record["parameters"]),
            code_version=record["code_version"],
            timestamp=record["timestamp"],
        )

    def dumps(self) -> str:
        record = self.to_dict()
        jsonschema.validate(record, MANIFEST_SCHEMA)
        return json.dumps(record, indent=2, sort_keys=True) + "\n"

    @classmethod
    def load(cls, path) -> "RunManifest":
        return cls.from_dict(json.loads(Path(path).read_text()))


def manifest_path(out: Path) -> Path:
    return out.with_name(out.name + ".manifest.json")


def report_json(manifest: RunManifest, data) -> str:
    record = {"schema_version": SCHEMA_VERSION, "manifest": manifest.to_dict(), "data": data}
    jsonschema.validate(record, REPORT_SCHEMA)
    return json.dumps(record, indent=2, sort_keys=True, allow_nan=False) + "\n"
