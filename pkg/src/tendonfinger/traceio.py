"""trace.csv and metrics.txt reading and writing."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable

from .analysis import StepMetrics, TrackingMetrics
from .simulator import TRACE_COLUMNS, TraceRecord


class TraceFormatError(ValueError):
    pass


def format_trace(trace: Iterable[TraceRecord]) -> str:
    # repr() is the shortest string that round-trips a double
    lines = [",".join(TRACE_COLUMNS)]
    lines += [",".join(repr(float(v)) for v in rec) for rec in trace]
    return "\n".join(lines) + "\n"


def parse_trace(text: str) -> list[TraceRecord]:
    lines = text.splitlines()
    if not lines:
        raise TraceFormatError("line 1: missing header")
    header = lines[0].strip().split(",")
    if tuple(header) != TRACE_COLUMNS:
        raise TraceFormatError(f"line 1: unexpected header {lines[0].strip()!r}")
    out = []
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != len(TRACE_COLUMNS):
            raise TraceFormatError(f"line {lineno}: expected {len(TRACE_COLUMNS)} fields, got {len(cells)}")
        try:
            out.append(TraceRecord(*(float(c) for c in cells)))
        except ValueError:
            raise TraceFormatError(f"line {lineno}: non-numeric field") from None
    return out


def write_trace(path: Path, trace: Iterable[TraceRecord], overwrite: bool = False) -> None:
    path = Path(path)
    if path.exists() and not overwrite:
        raise FileExistsError(f"{path} exists (pass --overwrite to replace it)")
    path.write_text(format_trace(trace), encoding="ascii", newline="\n")


def read_trace(path: Path) -> list[TraceRecord]:
    return parse_trace(Path(path).read_text(encoding="ascii"))


def _num(v: float | None) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return "nan"
    return format(v, ".10g")


def format_metrics(m: StepMetrics | TrackingMetrics) -> str:
    if isinstance(m, StepMetrics):
        rows = [
            ("kind", "step"),
            ("settled", "true" if m.settled else "false"),
            ("settling_time", _num(m.settling_time)),
            ("overshoot_pct", f"{m.overshoot:.3f}"),
            ("steady_state_error", _num(m.steady_state_error)),
            ("band", _num(m.band)),
        ]
    else:
        rows = [
            ("kind", "tracking"),
            ("max_abs_error", _num(m.max_abs_error)),
            ("max_abs_error_deg", _num(math.degrees(m.max_abs_error))),
            ("rms_error", _num(m.rms_error)),
            ("window_start", _num(m.window_start)),
        ]
    return "".join(f"{k} = {v}\n" for k, v in rows)
