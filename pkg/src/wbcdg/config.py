"""Run configuration: a flat ``key = value`` text format plus command-line overrides.

Grammar (one entry per line)::

    # comment
    [time]                 # optional section header, prefixes following keys
    cfl = 0.25             # same as time.cfl = 0.25 at top level
    problem.id = ex2
    problem.eta = 1e-3     # any other problem.* key is a problem parameter
    mesh.n = 50, 50        # comma-separated values become tuples

Values are parsed as bool (true/false), int, float, comma tuple or string.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .limiters import TvbParams
from .problems import ProblemSpec, get_problem
from .stepper import LimiterConfig, StepControl


def parse_value(text: str):
    t = text.strip()
    if "," in t:
        return tuple(parse_value(p) for p in t.split(",") if p.strip())
    low = t.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    if low in ("none", "null"):
        return None
    for cast in (int, float):
        try:
            return cast(t)
        except ValueError:
            pass
    if len(t) >= 2 and t[0] == t[-1] and t[0] in "'\"":
        return t[1:-1]
    return t


def parse_assignment(text: str) -> tuple[str, object]:
    if "=" not in text:
        raise ConfigError(f"expected key=value, got {text!r}")
    key, val = text.split("=", 1)
    key = key.strip()
    if not key:
        raise ConfigError(f"empty key in {text!r}")
    return key, parse_value(val)


def parse_text(text: str) -> dict:
    out: dict = {}
    section = ""
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            continue
        try:
            key, val = parse_assignment(line)
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
        out[f"{section}.{key}" if section else key] = val
    return out


def load_file(path: str | Path) -> dict:
    try:
        return parse_text(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None


_KNOWN = {
    "problem.id", "mesh.n", "mesh.k", "scheme.well_balanced",
    "time.cfl", "time.theta", "time.t_final", "time.dt_mode", "time.max_steps", "time.wall_limit",
    "limiter.pp", "limiter.weno", "limiter.tvb_m",
    "output.dir", "output.every", "output.dual", "output.snapshots",
    "convergence.ladder",
}


@dataclass
class RunConfig:
    problem_id: str = "ex2"
    params: dict = field(default_factory=dict)
    k: int | None = None
    n: tuple | None = None
    cfl: float | None = None
    theta: float = 1.0
    t_final: float | None = None
    dt_mode: str = "cfl"
    max_steps: int = 10_000_000
    wall_limit: float | None = None
    pp: bool = True
    weno: bool | None = None
    tvb_m: tuple | None = None
    well_balanced: bool = True
    out_dir: str = "out"
    log_every: int = 1
    dual: bool = False
    snapshots: int = 0
    ladder: tuple | None = None

    @classmethod
    def from_mapping(cls, kv: dict) -> "RunConfig":
        cfg = cls()
        params = {}
        for key, val in kv.items():
            if key.startswith("problem.") and key != "problem.id":
                params[key.split(".", 1)[1]] = val
            elif key not in _KNOWN:
                raise ConfigError(f"unknown config key {key!r}")
        get = kv.get
        cfg.problem_id = str(get("problem.id", cfg.problem_id))
        cfg.params = params
        cfg.k = None if get("mesh.k") is None else int(get("mesh.k"))
        n = get("mesh.n")
        cfg.n = None if n is None else tuple(int(v) for v in (n if isinstance(n, tuple) else (n,)))
        cfg.cfl = None if get("time.cfl") is None else float(get("time.cfl"))
        cfg.theta = float(get("time.theta", cfg.theta))
        cfg.t_final = None if get("time.t_final") is None else float(get("time.t_final"))
        cfg.dt_mode = str(get("time.dt_mode", cfg.dt_mode))
        cfg.max_steps = int(get("time.max_steps", cfg.max_steps))
        cfg.wall_limit = None if get("time.wall_limit") is None else float(get("time.wall_limit"))
        cfg.pp = bool(get("limiter.pp", True))
        cfg.weno = get("limiter.weno")
        m = get("limiter.tvb_m")
        cfg.tvb_m = None if m is None else tuple(float(v) for v in (m if isinstance(m, tuple) else (m,)))
        cfg.well_balanced = bool(get("scheme.well_balanced", True))
        cfg.out_dir = str(get("output.dir", cfg.out_dir))
        cfg.log_every = int(get("output.every", cfg.log_every))
        cfg.dual = bool(get("output.dual", False))
        cfg.snapshots = int(get("output.snapshots", 0))
        lad = get("convergence.ladder")
        cfg.ladder = None if lad is None else tuple(int(v) for v in (lad if isinstance(lad, tuple) else (lad,)))
        return cfg

    @classmethod
    def load(cls, path: str | Path | None = None, overrides: list[str] | tuple = ()) -> "RunConfig":
        kv = load_file(path) if path else {}
        for item in overrides:
            key, val = parse_assignment(item)
            kv[key] = val
        return cls.from_mapping(kv)

    def problem(self) -> ProblemSpec:
        p = get_problem(self.problem_id, **self.params)
        if self.n is not None and len(self.n) not in (1, p.dim):
            raise ConfigError(f"{p.pid} is {p.dim}D but mesh.n has {len(self.n)} entries")
        return p

    def mesh_sizes(self, problem: ProblemSpec) -> tuple:
        if self.n is None:
            return problem.n
        return self.n * problem.dim if len(self.n) == 1 else self.n

    def degree(self, problem: ProblemSpec) -> int:
        return problem.k if self.k is None else self.k

    def control(self, problem: ProblemSpec) -> StepControl:
        k = self.degree(problem)
        t_final = problem.t_final if self.t_final is None else self.t_final
        if not (t_final >= 0 and math.isfinite(t_final)):
            raise ConfigError("time.t_final must be a finite nonnegative number")
        cfl = self.cfl if self.cfl is not None else (0.25 if k <= 2 else 0.15)
        return StepControl(cfl=cfl, theta=self.theta, t_final=t_final, dt_mode=self.dt_mode,
                           max_steps=self.max_steps, wall_limit=self.wall_limit)

    def limiter(self, problem: ProblemSpec) -> LimiterConfig:
        weno = problem.weno if self.weno is None else bool(self.weno)
        tvb = TvbParams(problem.tvb_m if self.tvb_m is None else self.tvb_m)
        tvb.per_component(problem.dim + 2)
        return LimiterConfig(pp=self.pp, weno=weno, tvb=tvb)
