"""CSV and JSON serialization for every pipeline artifact.

Floats are written with ``repr``, which round-trips exactly, so a
re-ingested series feeds downstream stages the same bits the generator
produced.  Input readers accept LF or CRLF, require the documented
header, and report malformed rows by line number.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .persistence import PersistenceDiagram
from .pipeline import PeakReport, SignalSeries
from .segmentation import BubbleSegment, TrendEvent

__all__ = [
    "CsvFormatError",
    "read_series_csv",
    "write_series_csv",
    "write_events_csv",
    "write_segments_csv",
    "read_segments_csv",
    "write_norms_csv",
    "write_norms_sweep_csv",
    "write_diagrams_csv",
    "write_fit_json",
    "write_residuals_csv",
    "write_peak_json",
]

PRICE_HEADER = ("timestamp", "price")
LOG_HEADER = ("t", "log_price")


class CsvFormatError(ValueError):
    """Malformed input CSV; the message names the offending line."""


def _fmt(value: float) -> str:
    return repr(float(value))


def read_series_csv(path) -> np.ndarray:
    """Read a series as log-prices.

    Accepts either ``timestamp,price`` (prices positive; the log is
    taken) or ``t,log_price`` (values used as-is).  The row order
    defines the sample index.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]
    if not rows:
        raise CsvFormatError(f"{path}: file is empty")
    header = tuple(cell.strip().lower() for cell in rows[0])
    if header == PRICE_HEADER:
        take_log = True
    elif header == LOG_HEADER:
        take_log = False
    else:
        raise CsvFormatError(
            f"{path}: line 1: expected header "
            f"'{','.join(PRICE_HEADER)}' or '{','.join(LOG_HEADER)}', "
            f"got {','.join(rows[0])!r}"
        )
    if len(rows) == 1:
        raise CsvFormatError(f"{path}: no data rows")
    values = np.empty(len(rows) - 1)
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise CsvFormatError(
                f"{path}: line {lineno}: expected 2 fields, got {len(row)}"
            )
        try:
            values[lineno - 2] = float(row[1])
        except ValueError:
            raise CsvFormatError(
                f"{path}: line {lineno}: {row[1]!r} is not a number"
            ) from None
    if take_log:
        if np.any(values <= 0.0):
            bad = int(np.argmax(values <= 0.0))
            raise CsvFormatError(
                f"{path}: line {bad + 2}: price must be positive, got {values[bad]}"
            )
        values = np.log(values)
    return values


def write_series_csv(path, log_prices) -> None:
    """Write a log-price series with header ``t,log_price``."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(LOG_HEADER)
        for t, value in enumerate(np.asarray(log_prices, dtype=float)):
            writer.writerow([t, _fmt(value)])


def write_events_csv(path, events) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kind", "extremum_index", "crossing_index"])
        for ev in events:
            writer.writerow([ev.kind, ev.extremum_index, ev.crossing_index])


def write_segments_csv(path, segments) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["start", "end", "direction"])
        for seg in segments:
            writer.writerow([seg.start, seg.end, seg.direction])


def read_segments_csv(path) -> list[BubbleSegment]:
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows or tuple(c.strip().lower() for c in rows[0]) != ("start", "end", "direction"):
        raise CsvFormatError(f"{path}: expected header 'start,end,direction'")
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        try:
            out.append(
                BubbleSegment(start=int(row[0]), end=int(row[1]), direction=row[2])
            )
        except (ValueError, IndexError):
            raise CsvFormatError(f"{path}: line {lineno}: bad segment row {row!r}") from None
    return out


def write_norms_csv(path, signal: SignalSeries) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["window_start", "window_end", "norm"])
        for start, end, value in zip(
            signal.window_starts, signal.window_ends, signal.values
        ):
            writer.writerow([int(start), int(end), _fmt(value)])


def write_norms_sweep_csv(path, signals: dict[int, SignalSeries]) -> None:
    """One row per window start, one norm column per window size;
    cells are blank where a size has no window at that start."""
    widths = sorted(signals, reverse=True)
    n_rows = max(len(signals[w]) for w in widths)
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["window_start"] + [f"norm_w{w}" for w in widths])
        for k in range(n_rows):
            row: list[object] = [k]
            for w in widths:
                sig = signals[w]
                row.append(_fmt(sig.values[k]) if k < len(sig) else "")
            writer.writerow(row)


def write_diagrams_csv(path, diagrams: dict[int, PersistenceDiagram]) -> None:
    """Dump diagrams as ``dim,birth,death,multiplicity``; essential
    classes get the literal ``inf`` as death."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dim", "birth", "death", "multiplicity"])
        for dim in sorted(diagrams):
            dg = diagrams[dim]
            for birth, death, mult in dg.pairs:
                writer.writerow([dim, _fmt(birth), _fmt(death), mult])
            for birth in dg.essential:
                writer.writerow([dim, _fmt(birth), "inf", 1])


def write_fit_json(path, fit) -> None:
    params = fit.params
    payload = {
        "tc": params.tc,
        "m": params.m,
        "omega": params.omega,
        "A": params.A,
        "B": params.B,
        "C1": params.C1,
        "C2": params.C2,
        "rss": fit.rss,
        "n": len(fit.residuals),
        "converged": fit.converged,
    }
    with Path(path).open("w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def write_residuals_csv(path, residuals) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "residual"])
        for t, value in enumerate(np.asarray(residuals, dtype=float)):
            writer.writerow([t, _fmt(value)])


def write_peak_json(path, peak: PeakReport) -> None:
    payload = {
        "argmax_index": peak.argmax_index,
        "max_value": peak.max_value,
        "position": peak.position,
    }
    with Path(path).open("w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
