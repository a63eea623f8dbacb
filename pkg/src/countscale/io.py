"""CSV ingestion with line-numbered validation, deterministic emission,
and hash manifests for output provenance.

Emission rules make byte-identical reruns possible: floats are written in
their shortest round-trip form, NaN becomes an empty cell in CSV and null
in JSON, and JSON keys are sorted.
"""

from __future__ import annotations

import calendar
import csv
import datetime as _dt
import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .exceptions import ValidationError
from .series import AggregatedSeries

__all__ = [
    "parse_period",
    "period_start",
    "daily_dates",
    "ingest_csv",
    "emit_daily",
    "emit_aggregated",
    "emit_table",
    "dump_json",
    "sha256_file",
    "write_manifest",
    "verify_manifest",
]

TOOL_VERSION = "0.1.0"


def parse_period(label: str):
    """Split a "YYYY-MM" label into (year, month, days_in_month)."""
    parts = label.split("-")
    if len(parts) != 2:
        raise ValidationError(f"period {label!r} is not of the form YYYY-MM")
    try:
        year, month = int(parts[0]), int(parts[1])
    except ValueError:
        raise ValidationError(f"period {label!r} is not of the form YYYY-MM") from None
    if not 1 <= month <= 12:
        raise ValidationError(f"period {label!r} has month outside 1..12")
    return year, month, calendar.monthrange(year, month)[1]


def period_start(label: str) -> _dt.date:
    year, month, _ = parse_period(label)
    return _dt.date(year, month, 1)


def daily_dates(start: _dt.date, n: int):
    """n consecutive ISO dates beginning at start."""
    return [(start + _dt.timedelta(days=i)).isoformat() for i in range(n)]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        f = float(value)
        if math.isnan(f):
            return ""
        return repr(f)
    return str(value)


def ingest_csv(path, schema: str):
    """Read one of the three supported layouts, validating as it goes.

    schema="daily":      header date,value -> (dates, int array)
    schema="aggregated": header period,value,days -> AggregatedSeries
    schema="table":      any header -> (fieldnames, rows of string dicts)

    Every complaint carries the 1-based line number of the offending row.
    """
    path = Path(path)
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise ValidationError(f"{path}: cannot read: {exc.strerror}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        rows = [(lineno, row) for lineno, row in enumerate(reader, start=2) if row]

    if schema == "table":
        out = []
        for lineno, row in rows:
            if len(row) != len(header):
                raise ValidationError(
                    f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}"
                )
            out.append(dict(zip(header, (c.strip() for c in row))))
        return header, out

    if schema == "daily":
        if header != ["date", "value"]:
            raise ValidationError(f"{path}:1: expected header date,value, got {','.join(header)}")
        dates, values = [], []
        prev = None
        for lineno, row in rows:
            if len(row) != 2:
                raise ValidationError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            date_s, value_s = row[0].strip(), row[1].strip()
            try:
                day = _dt.date.fromisoformat(date_s)
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: bad date {date_s!r}") from None
            if prev is not None:
                if day == prev:
                    raise ValidationError(f"{path}:{lineno}: duplicate date {date_s}")
                if day < prev:
                    raise ValidationError(f"{path}:{lineno}: date {date_s} is out of order")
                if day != prev + _dt.timedelta(days=1):
                    raise ValidationError(f"{path}:{lineno}: gap before {date_s}")
            prev = day
            try:
                v = int(value_s)
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: value {value_s!r} is not an integer") from None
            if v < 0:
                raise ValidationError(f"{path}:{lineno}: value {v} is negative")
            dates.append(date_s)
            values.append(v)
        if not values:
            raise ValidationError(f"{path}: no data rows")
        return dates, np.asarray(values, dtype=np.int64)

    if schema == "aggregated":
        # the days column may be omitted for ISO YYYY-MM periods, where the
        # calendar supplies the unit length
        if header not in (["period", "value", "days"], ["period", "value"]):
            raise ValidationError(
                f"{path}:1: expected header period,value[,days], got {','.join(header)}"
            )
        has_days = len(header) == 3
        labels, values, lengths = [], [], []
        for lineno, row in rows:
            if len(row) != len(header):
                raise ValidationError(
                    f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}"
                )
            label, value_s = row[0].strip(), row[1].strip()
            try:
                v = int(value_s)
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: value {value_s!r} is not an integer") from None
            if v < 0:
                raise ValidationError(f"{path}:{lineno}: value {v} is negative")
            if has_days:
                days_s = row[2].strip()
                try:
                    d = int(days_s)
                except ValueError:
                    raise ValidationError(f"{path}:{lineno}: days {days_s!r} is not an integer") from None
                if d < 1:
                    raise ValidationError(f"{path}:{lineno}: days {d} is not positive")
            else:
                try:
                    d = parse_period(label)[2]
                except ValidationError as exc:
                    raise ValidationError(f"{path}:{lineno}: {exc}") from None
            labels.append(label)
            values.append(v)
            lengths.append(d)
        if not values:
            raise ValidationError(f"{path}: no data rows")
        try:
            return AggregatedSeries.from_values(values, lengths, labels=labels)
        except ValidationError as exc:
            raise ValidationError(f"{path}: {exc}") from None

    raise ValidationError(f"unknown schema {schema!r}")


def _write_rows(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(c) for c in row])


def emit_daily(path, values, start: _dt.date = None):
    """Write date,value rows; dates run from start (default 1970-01-01)."""
    values = np.asarray(values)
    if start is None:
        start = _dt.date(1970, 1, 1)
    dates = daily_dates(start, values.size)
    _write_rows(path, ["date", "value"], zip(dates, values))


def emit_aggregated(path, agg: AggregatedSeries):
    _write_rows(path, ["period", "value", "days"],
                zip(agg.labels, agg.values, agg.lengths))


def emit_table(path, header, rows):
    """Write an arbitrary table; cells format via the shared rules."""
    _write_rows(path, header, rows)


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, float):
        return None if (math.isnan(obj) or math.isinf(obj)) else obj
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def dump_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(_plain(obj), fh, sort_keys=True, indent=2)
        fh.write("\n")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(path, command: str, config: dict, inputs, outputs,
                   created_utc: str = None):
    """Record what produced which bytes.

    inputs: iterable of paths; outputs: iterable of (path, schema) pairs.
    File names are stored relative to the manifest's directory when they
    live under it.  created_utc can be pinned for reproducible manifests.
    """
    path = Path(path)
    base = path.parent.resolve()

    def rel(p):
        p = Path(p).resolve()
        try:
            return str(p.relative_to(base))
        except ValueError:
            return str(p)

    manifest = {
        "command": command,
        "config": _plain(config),
        "created_utc": created_utc
        or _dt.datetime.now(_dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
        "inputs": {rel(p): sha256_file(p) for p in inputs},
        "outputs": {
            rel(p): {"schema": schema, "sha256": sha256_file(p)}
            for p, schema in outputs
        },
        "tool_version": TOOL_VERSION,
    }
    dump_json(path, manifest)
    return manifest


def verify_manifest(path):
    """Re-hash every file the manifest lists; return mismatches."""
    path = Path(path)
    with open(path) as fh:
        manifest = json.load(fh)
    base = path.parent
    problems = []
    for name, digest in manifest.get("inputs", {}).items():
        p = base / name if not Path(name).is_absolute() else Path(name)
        if not p.exists():
            problems.append((name, "missing"))
        elif sha256_file(p) != digest:
            problems.append((name, "hash mismatch"))
    for name, entry in manifest.get("outputs", {}).items():
        p = base / name if not Path(name).is_absolute() else Path(name)
        if not p.exists():
            problems.append((name, "missing"))
        elif sha256_file(p) != entry["sha256"]:
            problems.append((name, "hash mismatch"))
    return problems
