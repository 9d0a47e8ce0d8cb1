"""Run manifests and JSON/CSV report emission.

Every report embeds the exact configuration needed to reproduce it. Infinities
serialize as the string "inf" in JSON; CSV cells use Python's shortest
round-trip float repr, so CSV and JSON emissions of one run carry identical
values (and "inf" is literally what str() produces for an infinite float).
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone


def jsonable(obj):
    """Recursively convert dataclasses/arrays/floats to JSON-safe values."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if hasattr(obj, "tolist"):  # numpy scalars and arrays
        return jsonable(obj.tolist())
    return obj


def csv_cell(value) -> str:
    if isinstance(value, float):
        return str(value)  # shortest round-trip repr; 'inf' for infinities
    return str(value)


@dataclass
class RunManifest:
    """Who ran what: command, resolved parameters, seed, version, outcome."""

    command: str
    params: dict
    version: str
    seed_root: int
    started: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    finished: str = ""
    outcome: str = "pass"  # pass | fail | error
    reproducers: list = field(default_factory=list)

    def finish(self, outcome: str, reproducers: list | None = None) -> None:
        self.finished = datetime.now(timezone.utc).isoformat()
        self.outcome = outcome
        if reproducers:
            self.reproducers = list(reproducers)


def emit_json(payload: dict, out_path: str | None) -> str:
    text = json.dumps(jsonable(payload), indent=2, allow_nan=False)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return text


def emit_csv(rows: list[dict], out_path: str | None) -> str:
    """RFC-4180 CSV, one row per record; header from the union of keys."""
    fieldnames: list[str] = []
    for row in rows:
        for key in row:
            if key not in fieldnames:
                fieldnames.append(key)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\r\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: csv_cell(v) for k, v in row.items()})
    text = buf.getvalue()
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text
