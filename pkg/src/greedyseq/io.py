"""CSV/JSON serialisation of point sets and metric tables.

Point files have the header ``index,x1[,x2,...]`` with 1-based indices and
coordinates printed to 17 significant digits, which round-trips doubles
exactly. Provenance goes to a JSON sidecar next to the CSV.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .sequence import PointSet


def atomic_write_text(path, text: str) -> None:
    """Write via a temporary file in the same directory and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sidecar_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".json")


def points_to_csv(points: PointSet) -> str:
    buf = io.StringIO()
    d = points.dim
    buf.write(",".join(["index"] + [f"x{j + 1}" for j in range(d)]) + "\n")
    for i, row in enumerate(points.points, start=1):
        buf.write(f"{i}," + ",".join(f"{v:.17g}" for v in row) + "\n")
    return buf.getvalue()


def write_points(path, points: PointSet) -> None:
    """Write ``points`` as CSV and its provenance as a JSON sidecar."""
    atomic_write_text(path, points_to_csv(points))
    atomic_write_text(sidecar_path(path), json.dumps(points.provenance, indent=2, default=_plain))


def read_points(path) -> PointSet:
    """Read a point CSV (and its sidecar, if present). Raises ``ValueError`` on bad content."""
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError("no points")
    header = [h.strip() for h in rows[0]]
    if not header or header[0] != "index" or len(header) < 2 or any(
        h != f"x{j + 1}" for j, h in enumerate(header[1:])
    ):
        raise ValueError(f"bad header {rows[0]!r}; expected index,x1[,x2,...]")
    body = [r for r in rows[1:] if r and any(c.strip() for c in r)]
    if not body:
        raise ValueError("no points")
    try:
        pts = np.array([[float(c) for c in r[1:]] for r in body])
    except ValueError as exc:
        raise ValueError(f"unparseable coordinate: {exc}") from None
    if pts.ndim != 2 or pts.shape[1] != len(header) - 1:
        raise ValueError("ragged rows")
    prov = {}
    side = sidecar_path(path)
    if side.exists():
        prov = json.loads(side.read_text(encoding="utf-8"))
    return PointSet(pts, prov)


def metric_rows_to_csv(rows) -> str:
    lines = ["n,metric,value,tail_bound"]
    for n, metric, value, tail in rows:
        lines.append(f"{int(n)},{metric},{_num(value)},{_num(tail)}")
    return "\n".join(lines) + "\n"


def write_metric_csv(path, rows) -> None:
    atomic_write_text(path, metric_rows_to_csv(rows))


def read_metric_csv(path) -> list[tuple[int, str, float, float]]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        return [(int(r["n"]), r["metric"], float(r["value"]), float(r["tail_bound"])) for r in reader]


def _num(v) -> str:
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    return f"{v:.17g}"


def _plain(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serialisable: {type(o)}")
