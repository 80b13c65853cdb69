"""Per-run iteration log and its CSV form."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

CSV_HEADER = ("iter", "dim", "f", "best", "elapsed_ms")


@dataclass(frozen=True)
class TraceRow:
    iter: int
    dim: int
    f: float
    best: float
    elapsed_ms: float


@dataclass
class RunTrace:
    """Everything one optimization run produced.

    ``rows`` has exactly one entry per objective evaluation.  ``history``
    holds the ``(d_i, b_i)`` records of completed subspaces and ``deltas``
    the dimension increments chosen at each expansion (DSEBO only).
    """

    algorithm: str
    seed: int
    rows: list = field(default_factory=list)
    points: list = field(default_factory=list)
    history: list = field(default_factory=list)
    deltas: list = field(default_factory=list)
    pulls: dict = field(default_factory=dict)
    best_x: np.ndarray | None = None
    error: str | None = None
    config_digest: str = ""
    wall_clock_s: float = 0.0
    _t0: float = field(default_factory=time.perf_counter, repr=False)

    def record(self, dim, f, z=None, x=None):
        f = float(f)
        prev = self.rows[-1].best if self.rows else np.inf
        best = min(prev, f)
        if f < prev and x is not None:
            self.best_x = np.array(x, dtype=float)
        elapsed = (time.perf_counter() - self._t0) * 1e3
        row = TraceRow(len(self.rows) + 1, int(dim), f, best, elapsed)
        self.rows.append(row)
        self.points.append(None if z is None else np.array(z, dtype=float))
        self.wall_clock_s = elapsed / 1e3
        return row

    def finish(self):
        self.wall_clock_s = (time.perf_counter() - self._t0)
        return self

    def __len__(self):
        return len(self.rows)

    @property
    def values(self):
        return np.array([r.f for r in self.rows])

    @property
    def best_so_far(self):
        return np.array([r.best for r in self.rows])

    @property
    def dims(self):
        return np.array([r.dim for r in self.rows], dtype=int)

    @property
    def final_best(self):
        return self.rows[-1].best if self.rows else float("nan")

    def to_csv_text(self, wall_clock=False):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow([r.iter, r.dim, repr(r.f), repr(r.best), repr(r.elapsed_ms) if wall_clock else ""])
        return buf.getvalue()

    def write_csv(self, path, wall_clock=False):
        # newline="" keeps LF endings on every platform
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv_text(wall_clock))


def read_trace_csv(path):
    """Parse a trace CSV back into :class:`TraceRow` objects."""
    rows = []
    with open(Path(path), encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        for it, dim, f, best, ms in reader:
            rows.append(TraceRow(int(it), int(dim), float(f), float(best), float(ms) if ms else float("nan")))
    return rows
