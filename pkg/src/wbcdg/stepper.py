"""SSP-RK3 time stepping with per-stage limiting on both mesh families."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, PositivityError, RuntimeLimitError
from .limiters import (
    LimiterReport,
    TvbParams,
    detect_troubled_1d,
    detect_troubled_2d,
    pp_limit,
    weno_limit_1d,
    weno_limit_2d,
)
from .mesh import DUAL, PRIMAL, opposite

FAMILIES = (PRIMAL, DUAL)


@dataclass
class StepControl:
    cfl: float = 0.25
    theta: float = 1.0
    t_final: float = 0.0
    dt_mode: str = "cfl"
    max_steps: int = 10_000_000
    dt_cap: float = math.inf
    wall_limit: float | None = None

    def __post_init__(self):
        if not self.cfl > 0:
            raise ConfigError("CFL number must be positive")
        if not 0 < self.theta <= 1:
            raise ConfigError("theta must lie in (0, 1]")
        if self.dt_mode not in ("cfl", "accuracy_matched"):
            raise ConfigError(f"unknown dt mode {self.dt_mode!r}")


@dataclass
class LimiterConfig:
    pp: bool = True
    weno: bool = False
    tvb: TvbParams = field(default_factory=TvbParams)


@dataclass
class StepRecord:
    step: int
    t: float
    dt: float
    rho_min: float
    p_min: float
    rho_limited: int
    p_limited: int
    troubled: int
    mass: tuple


def compute_dt(alpha: tuple, h: tuple, control: StepControl, w_hat1: float) -> float:
    """Largest step allowed by the positivity bound times the safety CFL.

    ``alpha`` and ``h`` hold one entry per space dimension.
    """
    a = np.asarray(alpha, dtype=float)
    hh = np.asarray(h, dtype=float)
    if not np.all(np.isfinite(a)):
        raise PositivityError("non-finite CFL coefficient")
    if control.dt_mode == "accuracy_matched":
        rate = np.sum(a / hh ** (4.0 / 3.0))
        dt = control.cfl / rate if rate > 0 else math.inf
    else:
        rate = np.sum(a / hh)
        dt = control.cfl * control.theta * w_hat1 / (2.0 * rate) if rate > 0 else math.inf
    dt = min(dt, control.dt_cap)
    if not math.isfinite(dt):
        raise ConfigError("zero wave speeds and no dt cap")
    return dt


class Solver:
    """Owns the two coefficient arrays and advances them in lockstep."""

    def __init__(self, scheme, boundary, eq: dict, limiter: LimiterConfig, control: StepControl, t0: float = 0.0):
        self.scheme, self.boundary, self.eq = scheme, boundary, eq
        self.limiter, self.control = limiter, control
        self.dim = scheme.mesh.dim
        self.t = t0
        self.U: dict = {}
        self.log: list[StepRecord] = []
        self.report = LimiterReport()
        self.steps = 0
        self._strict = {}
        for f in FAMILIES:
            mask = np.zeros(eq[f].shape[:-2], dtype=bool)
            mask[self.interior(f)] = True
            self._strict[f] = mask

    # ----------------------------------------------------------- helpers

    def interior(self, fam):
        return self.scheme.interior(fam)

    def set_state(self, U: dict, t: float | None = None) -> None:
        if t is not None:
            self.t = t
        self.U = {f: np.array(U[f], dtype=float, copy=True) for f in FAMILIES}
        self.U = self.postprocess(self.U, self.t)

    def postprocess(self, U: dict, t: float) -> dict:
        """Ghost filling, WENO on troubled cells, then the scaling limiter."""
        stage = LimiterReport()
        for f in FAMILIES:
            self.boundary.apply(U[f], f, t, self.eq[f])
            if self.limiter.weno:
                mask = self.troubled(f, U[f])
                stage.troubled += int(mask.sum())
                if mask.any():
                    U[f] = self._weno(f, U[f], mask)
                    self.boundary.apply(U[f], f, t, self.eq[f])
            if self.limiter.pp:
                U[f], rep = pp_limit(U[f], self.scheme.k, self.scheme.gamma, self.dim, strict=self._strict[f])
                stage.merge(rep)
        self.report.merge(stage)
        return U

    def troubled(self, fam: str, X: np.ndarray) -> np.ndarray:
        M = self.limiter.tvb.per_component(X.shape[-2])
        if self.dim == 1:
            return detect_troubled_1d(X, self.eq[fam], M, self.scheme.mesh.dx, self.interior(fam)[0])
        ix, iy = self.interior(fam)
        return detect_troubled_2d(X, self.eq[fam], M, self.scheme.mesh.dx, self.scheme.mesh.dy, ix, iy)

    def _weno(self, fam, X, mask):
        if self.dim == 1:
            return weno_limit_1d(X, self.eq[fam], mask, self.interior(fam)[0], self.scheme.gamma)
        ix, iy = self.interior(fam)
        return weno_limit_2d(X, self.eq[fam], mask, ix, iy, self.scheme.gamma)

    def rhs(self, U: dict, tau: float) -> dict:
        return {f: self.scheme.residual(f, U[f], U[opposite(f)], tau) for f in FAMILIES}

    def alpha(self, U: dict | None = None) -> tuple:
        U = self.U if U is None else U
        a = [self.scheme.alpha(f, U[opposite(f)]) for f in FAMILIES]
        if self.dim == 1:
            return (max(float(x.max()) for x in a),)
        return (max(float(x[0].max()) for x in a), max(float(x[1].max()) for x in a))

    def h(self) -> tuple:
        m = self.scheme.mesh
        return (m.dx,) if self.dim == 1 else (m.dx, m.dy)

    def totals(self, U: dict | None = None) -> dict:
        """Sum of cell averages times cell measure over evolved cells, per family."""
        U = self.U if U is None else U
        meas = float(np.prod(self.h()))
        return {f: U[f][self.interior(f) + (slice(None), 0)].reshape(-1, U[f].shape[-2]).sum(0) * meas for f in FAMILIES}

    # ------------------------------------------------------------- steps

    def _euler(self, base: dict, src: dict, dt: float, tau: float) -> dict:
        L = self.rhs(src, tau)
        out = {}
        for f in FAMILIES:
            out[f] = src[f].copy()
            idx = self.interior(f)
            out[f][idx] = src[f][idx] + dt * L[f]
        return out

    def ssp_rk3_step(self, dt: float) -> None:
        tau = dt / self.control.theta
        U0, t = self.U, self.t
        try:
            stage = 1
            U1 = self.postprocess(self._euler(U0, U0, dt, tau), t + dt)
            stage = 2
            W = self._euler(U1, U1, dt, tau)
            U2 = self.postprocess({f: 0.75 * U0[f] + 0.25 * W[f] for f in FAMILIES}, t + 0.5 * dt)
            stage = 3
            W = self._euler(U2, U2, dt, tau)
            U3 = self.postprocess({f: U0[f] / 3.0 + (2.0 / 3.0) * W[f] for f in FAMILIES}, t + dt)
        except PositivityError as exc:
            raise PositivityError(f"step {self.steps + 1}, stage {stage}, t={t:.6g}: {exc}", exc.where) from exc
        self.U, self.t = U3, t + dt
        self.steps += 1

    def advance_to(self, T: float, callback=None, log_every: int = 1) -> list[StepRecord]:
        ctl = self.control
        start = time.perf_counter()
        what = self.scheme.quad.w_hat1
        while T - self.t > 1e-14 * max(1.0, abs(T)):
            if self.steps >= ctl.max_steps:
                raise RuntimeLimitError(f"max_steps={ctl.max_steps} reached at t={self.t:.6g}")
            if ctl.wall_limit is not None and time.perf_counter() - start > ctl.wall_limit:
                raise RuntimeLimitError(f"wall-clock limit {ctl.wall_limit}s reached at t={self.t:.6g}")
            dt = compute_dt(self.alpha(), self.h(), ctl, what)
            if self.t + dt > T:
                dt = T - self.t
            before = LimiterReport()
            self.report, saved = before, self.report
            self.ssp_rk3_step(dt)
            rep = self.report
            saved.merge(rep)
            self.report = saved
            if self.steps % log_every == 0 or self.t >= T:
                tot = self.totals()[PRIMAL]
                self.log.append(StepRecord(self.steps, self.t, dt, rep.rho_min, rep.p_min, rep.rho_limited,
                                           rep.p_limited, rep.troubled, tuple(float(x) for x in tot)))
            if callback is not None:
                callback(self)
        return self.log
