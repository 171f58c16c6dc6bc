"""CSV emission with a ``#``-prefixed provenance header."""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        return f"{v:.12g}"
    if value is None:
        return ""
    return str(value)


def render_csv(rows: Iterable[Mapping], provenance: Mapping) -> str:
    rows = list(rows)
    header: list[str] = []
    for r in rows:
        for k in r:
            if k not in header:
                header.append(k)
    buf = io.StringIO()
    for k, v in provenance.items():
        # full precision so the header alone reproduces the run
        text = repr(float(v)) if isinstance(v, (float, np.floating)) else fmt(v)
        buf.write(f"# {k}={text}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(r.get(k)) for k in header])
    return buf.getvalue()


def write_csv(path, rows: Iterable[Mapping], provenance: Mapping) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_csv(rows, provenance), encoding="utf-8")
    return path


def columns_to_rows(columns: Mapping[str, np.ndarray]) -> list[dict]:
    names = list(columns)
    n = len(next(iter(columns.values()))) if columns else 0
    return [{k: columns[k][i] for k in names} for i in range(n)]


def read_csv(path) -> tuple[dict, list[dict]]:
    """Inverse of :func:`write_csv`: ``(provenance, rows)`` with string values."""
    prov = {}
    body = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            prov[key] = val
        else:
            body.append(line)
    rows = list(csv.DictReader(body))
    return prov, rows
