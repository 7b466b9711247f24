"""Deterministic output files: config echo plus a content hash in every artifact."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def to_jsonable(obj):
    """Convert numpy scalars, complex numbers, tuples and dataclasses into JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if hasattr(obj, "numerator") and hasattr(obj, "denominator"):
        return float(obj) if obj.denominator != 1 else int(obj)
    return obj


def canonical_json(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"))


def content_hash(obj) -> str:
    text = obj if isinstance(obj, str) else canonical_json(obj)
    return hashlib.sha256(text.encode()).hexdigest()


def default_label(command: str, config: dict) -> str:
    return content_hash({"command": command, "config": config})[:12]


class OutputDir:
    """``<root>/<command>/<label>/`` with report, config and auxiliary files."""

    def __init__(self, root, command: str, config: dict, label: str | None = None):
        self.config = to_jsonable(config)
        self.command = command
        self.label = label or default_label(command, self.config)
        self.path = Path(root) / command / self.label
        self.path.mkdir(parents=True, exist_ok=True)
        self.files: list[str] = []

    def write_json(self, name: str, payload) -> Path:
        body = {"command": self.command, "config": self.config, "result": to_jsonable(payload)}
        body["content_hash"] = content_hash({k: body[k] for k in ("command", "config", "result")})
        target = self.path / name
        target.write_text(json.dumps(body, indent=2, sort_keys=True) + "\n")
        self.files.append(name)
        return target

    def write_config(self) -> Path:
        body = {"command": self.command, "config": self.config}
        body["content_hash"] = content_hash(body)
        target = self.path / "config.json"
        target.write_text(json.dumps(body, indent=2, sort_keys=True) + "\n")
        self.files.append("config.json")
        return target

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(x) for x in row])
        data = buf.getvalue()
        target = self.path / name
        with target.open("w") as fh:
            fh.write(f"# config: {canonical_json({'command': self.command, 'config': self.config})}\n")
            fh.write(f"# content_hash: {content_hash(data)}\n")
            fh.write(data)
        self.files.append(name)
        return target

    def figure_metadata(self) -> dict:
        return {"Description": canonical_json({"command": self.command, "config": self.config}),
                "Comment": content_hash({"command": self.command, "config": self.config})}


def _csv_cell(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if x is None:
        return ""
    return x


def read_csv_rows(path) -> tuple[list[str], list[list[str]]]:
    """Parse a file written by :meth:`OutputDir.write_csv`, skipping comment lines."""
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]
