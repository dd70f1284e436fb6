"""Machine-readable report objects and their JSON / CSV serializations."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

from .pid import PidResult

SCHEMA_VERSION = 1

GATES_COLUMNS = ("gate", "R", "U1", "U2", "S", "oracle_gap")
FUSION_COLUMNS = ("rule", "c1", "c2", "degenerate")
LAYERS_COLUMNS = ("layer", "R", "U1", "U2", "S", "C1", "C2")
SWEEP_COLUMNS = ("k1", "k2", "ky", "R", "U1", "U2", "S", "C1", "C2")
BENCH_COLUMNS = ("m", "n", "k", "mean_iter_seconds", "mean_sinkhorn_sweeps")


def percentages(c1: float) -> dict:
    """Contribution shares in percent; the second is defined as 100 minus the first."""
    full1 = 100.0 * c1
    full2 = 100.0 - full1
    return {"c1": round(full1, 2), "c2": round(full2, 2), "c1_full": full1, "c2_full": full2}


@dataclass
class AnalysisReport:
    config: dict
    pid: PidResult
    trace: dict
    provenance: dict
    timing: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "config": self.config,
            "pid": self.pid.to_dict(),
            "contributions_percent": percentages(self.pid.c1),
            "trace": self.trace,
            "provenance": self.provenance,
            "timing": self.timing,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisReport":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {d.get('schema_version')!r}")
        return cls(
            config=d["config"],
            pid=PidResult.from_dict(d["pid"]),
            trace=d["trace"],
            provenance=d["provenance"],
            timing=d.get("timing", {}),
            schema_version=d["schema_version"],
        )

    def to_json(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        return cls.from_dict(json.loads(text))


@dataclass
class LayerwiseReport:
    layers: list[tuple[int, PidResult]]
    reports: list[AnalysisReport] = field(default_factory=list)

    def __post_init__(self):
        idx = [i for i, _ in self.layers]
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError(f"layer indices must be strictly increasing, got {idx}")

    def rows(self) -> list[tuple]:
        return [
            (i, r.redundancy, r.unique_1, r.unique_2, r.synergy, r.c1, r.c2) for i, r in self.layers
        ]

    def to_csv(self) -> str:
        return csv_text(LAYERS_COLUMNS, self.rows())


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
