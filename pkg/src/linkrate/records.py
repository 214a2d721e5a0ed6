"""Serialized run records (JSON) and tables (CSV)."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

SCHEMA_VERSION = 1


def fmt(x) -> str:
    """Full-precision text for a number (17 significant digits for floats)."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return repr(x)
    return format(x, ".17g")


@dataclass
class RunRecord:
    command: str
    params: dict
    settings: dict
    outputs: dict
    provenance: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if not self.provenance:
            from . import __version__

            self.provenance = {
                "version": __version__,
                "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            }

    def to_json(self) -> str:
        # json emits the shortest repr, which round-trips float64 exactly
        return json.dumps(asdict(self), indent=2, allow_nan=True)

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        return cls(**json.loads(text))


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (int, float)) else v for v in row])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
