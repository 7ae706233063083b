"""Benchmark configuration: an INI-style file with CLI overrides.

Schema (every key optional except ``problems`` and ``eps``)::

    [bench]
    problems = doublewell:d=20, random:d=50
    solvers  = accnc, gd
    eps      = 1e-2, 3e-3, 1e-3
    seeds    = 0, 1, 2
    delta    = 0.1
    out      = bench-out
    format   = csv

    [solver]
    eig_backend      = lanczos
    inner_smoothness = l1_plus_2gamma
    eig_constant     = 8
    outer_cap_factor = 2
    inner_cap_factor = 4

List values are separated by commas or newlines.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

from ..driver import SolverConfig
from ..errors import ConfigError
from ..problems import build_problem

SOLVERS = ("accnc", "gd", "ncd-only", "acagd-only", "strict-saddle")
FORMATS = ("csv", "json")


def _split(text: str) -> list[str]:
    return [p.strip() for p in text.replace("\n", ",").split(",") if p.strip()]


def _floats(items, what: str) -> list[float]:
    try:
        return [float(v) for v in items]
    except ValueError as exc:
        raise ConfigError(f"{what}: {exc}") from None


def _ints(items, what: str) -> list[int]:
    try:
        return [int(v) for v in items]
    except ValueError as exc:
        raise ConfigError(f"{what}: {exc}") from None


@dataclass(frozen=True)
class SolverOptions:
    eig_backend: str = "lanczos"
    inner_smoothness: str = "l1_plus_2gamma"
    eig_constant: float = 8.0
    outer_cap_factor: float = 2.0
    inner_cap_factor: float = 4.0

    def solver_config(self, eps: float, delta: float, seed: int) -> SolverConfig:
        return SolverConfig(eps=eps, delta=delta, seed=seed, eig_backend=self.eig_backend,
                            inner_smoothness=self.inner_smoothness, eig_constant=self.eig_constant,
                            outer_cap_factor=self.outer_cap_factor,
                            inner_cap_factor=self.inner_cap_factor)


@dataclass(frozen=True)
class BenchConfig:
    problems: tuple
    eps: tuple
    solvers: tuple = ("accnc", "gd")
    seeds: tuple = (0,)
    delta: float = 0.1
    out: str = "bench-out"
    format: str = "csv"
    solver: SolverOptions = field(default_factory=SolverOptions)

    def __post_init__(self):
        object.__setattr__(self, "problems", tuple(self.problems))
        object.__setattr__(self, "eps", tuple(float(e) for e in self.eps))
        object.__setattr__(self, "solvers", tuple(self.solvers))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))

    def validate(self) -> "BenchConfig":
        """Check everything that can be checked without running a solver."""
        if not self.problems:
            raise ConfigError("at least one problem id is required")
        if not self.eps:
            raise ConfigError("at least one eps value is required")
        if any(not e > 0 for e in self.eps):
            raise ConfigError("eps values must be positive")
        if not self.solvers:
            raise ConfigError("at least one solver is required")
        bad = [s for s in self.solvers if s not in SOLVERS]
        if bad:
            raise ConfigError(f"unknown solver(s) {bad}; known: {list(SOLVERS)}")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seeds must be distinct")
        if not 0 < self.delta < 1:
            raise ConfigError("delta must lie in (0, 1)")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {list(FORMATS)}")
        self.solver.solver_config(self.eps[0], self.delta, 0)  # raises ConfigError
        for pid in self.problems:
            prob = build_problem(pid, self.seeds[0])
            if "strict-saddle" in self.solvers and prob.sigma1 is None:
                raise ConfigError(f"strict-saddle needs a problem with known sigma1; {pid!r} has none")
        return self


def load_config(path: Optional[str] = None, **overrides) -> BenchConfig:
    """Read ``path`` (if given) and apply non-None ``overrides`` on top."""
    values: dict = {}
    solver_values: dict = {}
    if path is not None:
        parser = configparser.ConfigParser(delimiters=("=",), inline_comment_prefixes=("#", ";"))
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except configparser.Error as exc:
            raise ConfigError(f"malformed config {path}: {exc}") from None
        unknown = set(parser.sections()) - {"bench", "solver"}
        if unknown:
            raise ConfigError(f"unknown config section(s) {sorted(unknown)}")
        if parser.has_section("bench"):
            values = _parse_bench(dict(parser["bench"]))
        if parser.has_section("solver"):
            solver_values = _parse_solver(dict(parser["solver"]))
    for key, val in overrides.items():
        if val is not None:
            values[key] = val
    if "problems" not in values or "eps" not in values:
        raise ConfigError("config needs 'problems' and 'eps' (from the file or the command line)")
    try:
        cfg = BenchConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    if solver_values:
        cfg = replace(cfg, solver=SolverOptions(**solver_values))
    return cfg


def _parse_bench(sec: dict) -> dict:
    known = {"problems", "solvers", "eps", "seeds", "delta", "out", "format"}
    unknown = set(sec) - known
    if unknown:
        raise ConfigError(f"unknown key(s) in [bench]: {sorted(unknown)}")
    out: dict = {}
    if "problems" in sec:
        out["problems"] = _split(sec["problems"])
    if "solvers" in sec:
        out["solvers"] = _split(sec["solvers"])
    if "eps" in sec:
        out["eps"] = _floats(_split(sec["eps"]), "eps")
    if "seeds" in sec:
        out["seeds"] = _ints(_split(sec["seeds"]), "seeds")
    if "delta" in sec:
        out["delta"] = _floats([sec["delta"]], "delta")[0]
    for key in ("out", "format"):
        if key in sec:
            out[key] = sec[key].strip()
    return out


def _parse_solver(sec: dict) -> dict:
    known = {f.name: f.type for f in fields(SolverOptions)}
    unknown = set(sec) - set(known)
    if unknown:
        raise ConfigError(f"unknown key(s) in [solver]: {sorted(unknown)}")
    out = {}
    for key, raw in sec.items():
        out[key] = raw.strip() if key in ("eig_backend", "inner_smoothness") else _floats([raw], key)[0]
    return out


def write_config(cfg: BenchConfig, path) -> None:
    """Serialize ``cfg`` in the format :func:`load_config` reads."""
    parser = configparser.ConfigParser(delimiters=("=",))
    parser["bench"] = {
        "problems": ", ".join(cfg.problems),
        "solvers": ", ".join(cfg.solvers),
        "eps": ", ".join(repr(e) for e in cfg.eps),
        "seeds": ", ".join(str(s) for s in cfg.seeds),
        "delta": repr(cfg.delta),
        "out": cfg.out,
        "format": cfg.format,
    }
    parser["solver"] = {f.name: str(getattr(cfg.solver, f.name)) for f in fields(SolverOptions)}
    with open(Path(path), "w", encoding="utf-8") as fh:
        parser.write(fh)
