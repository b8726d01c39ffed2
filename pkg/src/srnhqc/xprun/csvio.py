"""CSV emission for sweep rows and population traces."""

from __future__ import annotations

import csv
import io
from pathlib import Path

SWEEP_HEADER = ("protocol", "gate", "delta", "t2_us", "fidelity", "leakage", "wall_time_ms")
TRACE_HEADER = ("t_ns", "pop_0L", "pop_1L")


def fmt(x) -> str:
    """Twelve significant digits; ``inf`` stays ``inf``."""
    if isinstance(x, str):
        return x
    return f"{float(x):.12g}"


def _render(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _write(text: str, path) -> None:
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def sweep_csv_text(rows) -> str:
    return _render(
        SWEEP_HEADER,
        (
            (r.protocol, r.gate, r.delta, r.t2_us, r.fidelity, r.leakage, r.wall_time_ms)
            for r in rows
        ),
    )


def trace_csv_text(series) -> str:
    """``series`` has ``times``, ``pop_0L`` and ``pop_1L`` arrays."""
    return _render(TRACE_HEADER, zip(series.times, series.pop_0L, series.pop_1L))


def emit_csv(rows, path) -> None:
    _write(sweep_csv_text(rows), path)


def emit_trace_csv(series, path) -> None:
    _write(trace_csv_text(series), path)


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        data = list(csv.reader(fh))
    return data[0], data[1:]
