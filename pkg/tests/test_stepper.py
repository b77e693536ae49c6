import math
from types import SimpleNamespace

import numpy as np
import pytest

from wbcdg.errors import ConfigError, RuntimeLimitError
from wbcdg.mesh import DUAL, PRIMAL, Axis, Mesh1D
from wbcdg.problems import build_solver, get_problem
from wbcdg.quadrature import QuadratureSet
from wbcdg.stepper import LimiterConfig, Solver, StepControl, compute_dt


def test_dt_example():
    ctl = StepControl(cfl=0.25, theta=1.0)
    dt = compute_dt((math.sqrt(1.4),), (0.01,), ctl, 1 / 6)
    assert dt == pytest.approx(0.25 * (0.01 / 6 / 2) / math.sqrt(1.4))
    assert dt == pytest.approx(1.761e-4, rel=1e-3)


def test_dt_2d_reduces_to_1d():
    ctl = StepControl()
    assert compute_dt((2.0, 0.0), (0.1, 0.3), ctl, 1 / 6) == compute_dt((2.0,), (0.1,), ctl, 1 / 6)


def test_dt_accuracy_matched():
    ctl = StepControl(cfl=0.1, dt_mode="accuracy_matched")
    assert compute_dt((1.0,), (0.01,), ctl, 1 / 6) == pytest.approx(0.1 * 0.01 ** (4 / 3))


@pytest.mark.parametrize("kw", [{"cfl": 0.0}, {"theta": 0.0}, {"theta": 1.5}, {"dt_mode": "magic"}])
def test_control_validation(kw):
    with pytest.raises(ConfigError):
        StepControl(**kw)


class LinearScheme:
    """du/dt = lam * u on every coefficient; exercises the RK3 combination."""

    def __init__(self, lam):
        self.lam = lam
        self.mesh = Mesh1D(Axis(0.0, 1.0, 4, True))
        self.k, self.gamma = 0, 1.4
        self.quad = QuadratureSet.build(0)

    def interior(self, fam):
        return (self.mesh.axis.interior(fam),)

    def residual(self, fam, X, Y, tau):
        return self.lam * X[self.interior(fam)]

    def alpha(self, fam, Y):
        return np.ones(3)


def test_rk3_third_order():
    errs = []
    for dt in (0.1, 0.05, 0.025):
        sch = LinearScheme(-1.0)
        eq = {f: np.zeros((sch.mesh.axis.size(f), 1, 1)) for f in (PRIMAL, DUAL)}
        bnd = SimpleNamespace(apply=lambda U, f, t, e: U)
        s = Solver(sch, bnd, eq, LimiterConfig(pp=False), StepControl(t_final=1.0))
        s.set_state({f: np.ones_like(eq[f]) for f in eq}, 0.0)
        for _ in range(round(1.0 / dt)):
            s.ssp_rk3_step(dt)
        errs.append(abs(s.U[PRIMAL][1, 0, 0] - math.exp(-1.0)))
    rates = np.log2(np.array(errs[:-1]) / errs[1:])
    assert np.all(rates > 2.9)


def test_rk3_amplification():
    sch = LinearScheme(2.0)
    eq = {f: np.zeros((sch.mesh.axis.size(f), 1, 1)) for f in (PRIMAL, DUAL)}
    s = Solver(sch, SimpleNamespace(apply=lambda U, f, t, e: U), eq, LimiterConfig(pp=False), StepControl())
    s.set_state({f: np.ones_like(eq[f]) for f in eq}, 0.0)
    z = 2.0 * 0.1
    s.ssp_rk3_step(0.1)
    assert s.U[PRIMAL][2, 0, 0] == pytest.approx(1 + z + z * z / 2 + z**3 / 6, rel=1e-15)


def test_zero_length_advance():
    setup = build_solver(get_problem("ex2"), n=10)
    before = {f: setup.solver.U[f].copy() for f in (PRIMAL, DUAL)}
    setup.solver.advance_to(0.0)
    assert setup.solver.steps == 0
    for f in before:
        assert np.array_equal(before[f], setup.solver.U[f])


def test_final_step_is_clipped():
    setup = build_solver(get_problem("ex2"), n=10)
    s = setup.solver
    dt = compute_dt(s.alpha(), s.h(), s.control, s.scheme.quad.w_hat1)
    s.advance_to(1.5 * dt)
    assert s.steps == 2 and s.t == pytest.approx(1.5 * dt, rel=1e-15)
    assert s.log[-1].dt == pytest.approx(0.5 * dt)


def test_steady_state_stays_steady():
    setup = build_solver(get_problem("ex2"), n=20)
    s = setup.solver
    s.advance_to(0.05)
    for f in (PRIMAL, DUAL):
        assert np.max(np.abs(s.U[f] - setup.eq[f])) < 1e-13


def test_max_steps_limit():
    ctl = StepControl(t_final=1.0, max_steps=2)
    setup = build_solver(get_problem("ex2"), n=10, control=ctl)
    with pytest.raises(RuntimeLimitError):
        setup.solver.advance_to(1.0)


@pytest.mark.parametrize("pid,n", [("periodic", 16), ("periodic2d", (6, 6))])
def test_conservation_short(pid, n):
    setup = build_solver(get_problem(pid), n=n)
    s = setup.solver
    t0 = s.totals()
    for _ in range(5):
        dt = compute_dt(s.alpha(), s.h(), s.control, s.scheme.quad.w_hat1)
        s.ssp_rk3_step(dt)
    t1 = s.totals()
    for f in (PRIMAL, DUAL):
        assert np.all(np.abs(t1[f] - t0[f]) <= 1e-13 * np.maximum(1.0, np.abs(t0[f])))
