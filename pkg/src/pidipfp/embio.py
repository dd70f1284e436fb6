"""Reading and writing embedding dumps.

Two text formats are accepted:

* CSV: a header line ``dim=<d>`` followed by one row of ``d`` comma-separated
  floats per sample.
* JSON lines (``.jsonl`` / ``.ndjson``): one JSON array of ``d`` floats per line.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import FileFormatError

JSONL_SUFFIXES = {".jsonl", ".ndjson"}


def _is_jsonl(path: Path) -> bool:
    return path.suffix.lower() in JSONL_SUFFIXES


def _read_csv(path: Path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        if not header.strip().startswith("dim="):
            raise FileFormatError(f"{path}:1: expected header 'dim=<d>', got {header.strip()[:40]!r}")
        try:
            dim = int(header.strip()[4:])
        except ValueError:
            raise FileFormatError(f"{path}:1: bad dimension in header {header.strip()!r}") from None
        if dim < 1:
            raise FileFormatError(f"{path}:1: dimension must be >= 1")
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != dim:
                raise FileFormatError(f"{path}:{lineno}: expected {dim} values, found {len(parts)}")
            try:
                rows.append([float(v) for v in parts])
            except ValueError as exc:
                raise FileFormatError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise FileFormatError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float64)


def _read_jsonl(path: Path) -> np.ndarray:
    rows = []
    dim = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FileFormatError(f"{path}:{lineno}: invalid JSON at column {exc.colno}") from None
            if not isinstance(row, list) or not row:
                raise FileFormatError(f"{path}:{lineno}: expected a non-empty array")
            if dim is None:
                dim = len(row)
            elif len(row) != dim:
                raise FileFormatError(f"{path}:{lineno}: expected {dim} values, found {len(row)}")
            try:
                rows.append([float(v) for v in row])
            except (TypeError, ValueError) as exc:
                raise FileFormatError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise FileFormatError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float64)


def read_embedding(path) -> np.ndarray:
    path = Path(path)
    x = _read_jsonl(path) if _is_jsonl(path) else _read_csv(path)
    if not np.all(np.isfinite(x)):
        bad = int(np.argwhere(~np.isfinite(x))[0, 0])
        line = bad + (1 if _is_jsonl(path) else 2)
        raise FileFormatError(f"{path}:{line}: non-finite value")
    return x


def write_embedding(path, x) -> None:
    path = Path(path)
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if _is_jsonl(path):
            for row in x:
                fh.write(json.dumps([float(v) for v in row]) + "\n")
        else:
            fh.write(f"dim={x.shape[1]}\n")
            for row in x:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return "sha256:" + h.hexdigest()
