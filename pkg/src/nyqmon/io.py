"""Small file helpers: atomic text output and the ``timestamp,value`` trace format."""

from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path
from typing import Callable, TextIO

import numpy as np

from .errors import EmptyFile, NonMonotoneTimestamps, ParseError
from .series import TimeSeries, UniformSeries

META_KEYS = ("metric", "unit", "device")


def atomic_write(path, emit: Callable[[TextIO], None]) -> None:
    """Write via a sibling temp file and rename, so readers never see a partial file."""
    p = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{p.name}.", suffix=".tmp", dir=p.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            emit(fh)
        os.replace(tmp, p)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write(path, lambda fh: fh.write(text))


def parse_trace(text: str, path=None) -> tuple[TimeSeries, dict]:
    """Parse ``timestamp,value`` CSV text.

    Leading ``# key: value`` comment lines may carry ``metric``, ``unit`` and
    ``device``; other comments are ignored.  Returns the series and the
    metadata dict.
    """
    meta: dict[str, str] = {}
    times: list[float] = []
    values: list[float] = []
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" in body:
                key, value = (s.strip() for s in body.split(":", 1))
                if key.lower() in META_KEYS:
                    meta[key.lower()] = value
            continue
        fields = next(csv.reader(io.StringIO(line)))
        if not header_seen:
            if [f.strip().lower() for f in fields] != ["timestamp", "value"]:
                raise ParseError(f"expected header 'timestamp,value', got {line!r}", lineno, path)
            header_seen = True
            continue
        if len(fields) != 2:
            raise ParseError(f"expected 2 fields, got {len(fields)}", lineno, path)
        try:
            t, v = float(fields[0]), float(fields[1])
        except ValueError:
            raise ParseError(f"non-numeric field in {line!r}", lineno, path) from None
        if not (np.isfinite(t) and np.isfinite(v)):
            raise ParseError(f"non-finite field in {line!r}", lineno, path)
        if times and t <= times[-1]:
            raise NonMonotoneTimestamps(
                f"timestamp {t!r} does not increase on {times[-1]!r}", lineno, path
            )
        times.append(t)
        values.append(v)
    if not times:
        raise EmptyFile("no data rows", path=path)
    ts = TimeSeries(np.array(times), np.array(values), meta.get("metric", ""), meta.get("unit", ""))
    return ts, meta


def load_trace(path) -> tuple[TimeSeries, dict]:
    p = Path(path)
    return parse_trace(p.read_text(encoding="utf-8"), path=str(p))


def format_trace(timestamps, values, meta: dict | None = None) -> str:
    buf = io.StringIO()
    for k, v in (meta or {}).items():
        if v:
            buf.write(f"# {k}: {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["timestamp", "value"])
    for t, v in zip(timestamps, values):
        w.writerow([repr(float(t)), repr(float(v))])
    return buf.getvalue()


def write_uniform(us: UniformSeries, path, meta: dict | None = None) -> None:
    m = {"metric": us.metric_name, "unit": us.unit}
    m.update(meta or {})
    atomic_write_text(path, format_trace(us.timestamps, us.values, m))
