"""Per-run trace records shared by the solvers and the benchmark writer."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .oracle import CallCounts, Oracle, root_oracle

PHASES = ("ncd", "acagd", "agd-phase2", "gd")


@dataclass(frozen=True)
class TraceEntry:
    phase: str
    iteration: int
    f: float
    grad_norm: float
    grad_calls: int  # cumulative since the start of the run
    hvp_calls: int
    calls: int  # grad + hvp calls since the previous entry


@dataclass
class Trace:
    """Collects entries with cumulative cost read off the root oracle."""

    oracle: Oracle
    entries: list = field(default_factory=list)
    thin: bool = False

    def __post_init__(self):
        self.oracle = root_oracle(self.oracle)
        self._start = self.oracle.counts()
        self._last_total = 0

    def spent(self) -> CallCounts:
        return self.oracle.counts() - self._start

    def wants(self, iteration: int) -> bool:
        """With ``thin`` set, keep iterations 1..100 then roughly 10 per decade."""
        if not self.thin or iteration <= 100:
            return True
        k = int(round(10.0 * math.log10(iteration)))
        return iteration == int(round(10.0 ** (k / 10.0)))

    def record(self, phase: str, iteration: int, f: float, grad_norm: float) -> TraceEntry:
        if phase not in PHASES:
            raise ValueError(f"unknown phase {phase!r}")
        c = self.spent()
        entry = TraceEntry(phase, int(iteration), float(f), float(grad_norm), c.grad, c.hvp,
                           c.total - self._last_total)
        self._last_total = c.total
        self.entries.append(entry)
        return entry
