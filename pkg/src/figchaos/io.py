"""CSV and JSON helpers shared by the pipeline and the command line.

Floats are written with ``repr`` so a write/read round trip is exact.  JSON
and CSV outputs are written to a temporary file and moved into place.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np

from .errors import IngestError
from .process import TimeSeries

__all__ = [
    "atomic_write",
    "write_csv",
    "write_json",
    "read_json",
    "save_series",
    "ingest_series",
    "format_value",
]

PathLike = Union[str, os.PathLike]


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        return repr(v)
    return str(v)


def atomic_write(path: PathLike, text: str) -> Path:
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
    return path


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(header)
    for row in rows:
        out.writerow([format_value(v) for v in row])
    return atomic_write(path, buf.getvalue())


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def write_json(path: PathLike, obj) -> Path:
    text = json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False)
    return atomic_write(path, text + "\n")


def read_json(path: PathLike):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def save_series(path: PathLike, series: TimeSeries) -> Path:
    """Write ``u`` (and ``sigma`` when present) as CSV with a header line."""
    if series.volatility is None:
        return write_csv(path, ["u"], ([v] for v in series.values))
    return write_csv(path, ["u", "sigma"], zip(series.values, series.volatility))


def ingest_series(
    path: PathLike, column: Union[int, str, None] = None, volatility: Union[int, str, None] = None
) -> TimeSeries:
    """Read a series from a CSV file with a one-line header.

    Parameters
    ----------
    path : path-like
        CSV file; the first line is a header.
    column : int or str, optional
        Column holding the series, by position or header name.  Defaults to
        the first column.
    volatility : int or str, optional
        Column holding a paired volatility path.

    Raises
    ------
    IngestError
        On a missing or empty file, an unknown column, or any cell that is
        empty, non-numeric or non-finite.  Row numbers are 1-based file lines.
    """
    path = Path(path)
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if not rows:
        raise IngestError(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if not body:
        raise IngestError(f"{path} has a header but no data rows")

    def col_index(spec) -> int:
        if isinstance(spec, int) or (isinstance(spec, str) and spec.isdigit()):
            k = int(spec)
            if not 0 <= k < len(header):
                raise IngestError(f"column {k} out of range; {path} has {len(header)} columns")
            return k
        if spec not in header:
            raise IngestError(f"column {spec!r} not in header {header}")
        return header.index(spec)

    def parse(k: int) -> np.ndarray:
        out = np.empty(len(body))
        bad: List[int] = []
        for r, row in enumerate(body):
            try:
                v = float(row[k])
            except (IndexError, ValueError):
                v = math.nan
            if not math.isfinite(v):
                bad.append(r + 2)
            out[r] = v
        if bad:
            shown = ", ".join(str(b) for b in bad[:10])
            more = "" if len(bad) <= 10 else f" (+{len(bad) - 10} more)"
            raise IngestError(
                f"{path}: column {header[k]!r} has missing or non-finite values at rows {shown}{more}"
            )
        return out

    values = parse(col_index(0 if column is None else column))
    vol: Optional[np.ndarray] = None
    if volatility is not None:
        vol = parse(col_index(volatility))
    try:
        return TimeSeries(values, vol)
    except ValueError as exc:
        raise IngestError(f"{path}: {exc}") from exc
