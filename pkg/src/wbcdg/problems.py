"""Built-in test problems and the solver factory.

Every problem carries a stationary hydrostatic profile that the scheme is
balanced against. Problems without gravity use a constant state; problems
whose data are not themselves an equilibrium use an isothermal profile of the
same potential.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .boundary import Boundary
from .errors import ConfigError
from .euler import (
    EquilibriumProfile,
    GravityField,
    isothermal_profile,
    linear_gravity_1d,
    linear_gravity_2d,
    polytropic_profile_radial,
    primitive_to_conservative,
)
from .limiters import TvbParams
from .mesh import DUAL, PRIMAL, build_meshes
from .projection import project_novel
from .stepper import LimiterConfig, Solver, StepControl


@dataclass(frozen=True)
class ProblemSpec:
    pid: str
    dim: int
    extent: tuple
    gamma: float
    gravity: GravityField
    profile: EquilibriumProfile
    initial: Callable  # (*x) -> state array, components first
    bc: tuple  # one (lo, hi) pair of rule names per axis
    t_final: float
    n: tuple  # default cells per axis
    k: int = 2
    exact: Callable | None = None  # t -> (*x) -> state
    tvb_m: tuple = (0.0,)
    weno: bool = False
    equilibrium_start: bool = False  # initial data equal the profile
    params: dict = field(default_factory=dict)
    description: str = ""

    @property
    def periodic(self) -> tuple:
        return tuple(lo == "periodic" for lo, _ in self.bc)


# ------------------------------------------------------------- helpers


def _zero_gravity(dim: int) -> GravityField:
    if dim == 1:
        return GravityField(lambda x: np.zeros_like(np.asarray(x, float)), lambda x: np.zeros_like(np.asarray(x, float)))
    return linear_gravity_2d(0.0, 0.0)


def constant_profile(dim: int, rho: float = 1.0, p: float = 1.0) -> EquilibriumProfile:
    if dim == 1:
        return EquilibriumProfile("constant", lambda x: np.full_like(np.asarray(x, float), rho),
                                  lambda x: np.full_like(np.asarray(x, float), p),
                                  lambda x: np.zeros_like(np.asarray(x, float)))

    def shape(x, y):
        return np.broadcast(np.asarray(x, float), np.asarray(y, float)).shape

    return EquilibriumProfile("constant", lambda x, y: np.full(shape(x, y), rho), lambda x, y: np.full(shape(x, y), p),
                              lambda x, y: (np.zeros(shape(x, y)), np.zeros(shape(x, y))), 2)


def quadratic_gravity_1d(center: float = 0.0) -> GravityField:
    return GravityField(lambda x: 0.5 * (np.asarray(x, float) - center) ** 2, lambda x: np.asarray(x, float) - center)


def quadratic_gravity_2d(cx: float, cy: float) -> GravityField:
    return GravityField(
        lambda x, y: 0.5 * ((np.asarray(x, float) - cx) ** 2 + (np.asarray(y, float) - cy) ** 2),
        lambda x, y: (np.asarray(x, float) - cx + 0.0 * np.asarray(y, float), np.asarray(y, float) - cy + 0.0 * np.asarray(x, float)),
        dim=2,
    )


def layered_profile(levels: Callable, rho: Callable, p: Callable, p_y: Callable) -> EquilibriumProfile:
    """2D profile depending on y only; ``levels`` is unused metadata hook."""

    def shape(x, y):
        return np.broadcast(np.asarray(x, float), np.asarray(y, float)).shape

    return EquilibriumProfile(
        "layered",
        lambda x, y: np.broadcast_to(rho(np.asarray(y, float)), shape(x, y)).copy(),
        lambda x, y: np.broadcast_to(p(np.asarray(y, float)), shape(x, y)).copy(),
        lambda x, y: (np.zeros(shape(x, y)), np.broadcast_to(p_y(np.asarray(y, float)), shape(x, y)).copy()),
        2,
    )


def _from_profile(profile: EquilibriumProfile, gamma: float):
    def f(*x):
        return profile.state(*x, gamma=gamma)

    return f


# ------------------------------------------------------------ problems


def ex1_accuracy_1d(u0: float = 1.0, p0: float = 4.5) -> ProblemSpec:
    gamma = 1.4
    grav = linear_gravity_1d(1.0)

    def exact(t):
        def f(x):
            x = np.asarray(x, float)
            s = np.pi * (x - u0 * t)
            rho = 1.0 + 0.2 * np.sin(s)
            p = p0 + u0 * t - x + 0.2 * np.cos(s) / np.pi
            return primitive_to_conservative(rho, u0, p, gamma)

        return f

    return ProblemSpec("ex1", 1, (0.0, 2.0), gamma, grav, isothermal_profile(grav), exact(0.0),
                       (("dirichlet", "dirichlet"),), 0.1, (128,), exact=exact,
                       params={"u0": u0, "p0": p0}, description="smooth travelling wave, linear gravity")


def ex2_isothermal_1d(eta: float = 0.0) -> ProblemSpec:
    gamma = 5.0 / 3.0
    grav = linear_gravity_1d(1.0)
    prof = isothermal_profile(grav)

    def init(x):
        x = np.asarray(x, float)
        p = np.exp(-x) + eta * np.exp(-100.0 * (x - 0.5) ** 2)
        return primitive_to_conservative(np.exp(-x), 0.0, p, gamma)

    init = _from_profile(prof, gamma) if eta == 0.0 else init
    return ProblemSpec("ex2", 1, (0.0, 1.0), gamma, grav, prof, init, (("outflow", "outflow"),),
                       2.0 if eta == 0.0 else 0.25, (50,), equilibrium_start=eta == 0.0,
                       params={"eta": eta}, description="isothermal equilibrium, optional pressure bump")


def ex3_rarefaction_1d() -> ProblemSpec:
    gamma = 1.4
    grav = quadratic_gravity_1d()

    def init(x):
        x = np.asarray(x, float)
        return primitive_to_conservative(np.full_like(x, 7.0), np.where(x < 0, -1.0, 1.0), np.full_like(x, 0.2), gamma)

    return ProblemSpec("ex3", 1, (-1.0, 1.0), gamma, grav, isothermal_profile(grav), init, (("outflow", "outflow"),),
                       0.6, (400,), description="double rarefaction, quadratic potential")


def ex4_leblanc_1d() -> ProblemSpec:
    gamma = 1.4
    grav = linear_gravity_1d(1.0)

    def init(x):
        x = np.asarray(x, float)
        left = x < 0
        return primitive_to_conservative(np.where(left, 2.0, 1e-3), 0.0, np.where(left, 1e9, 1.0), gamma)

    return ProblemSpec("ex4", 1, (-10.0, 10.0), gamma, grav, isothermal_profile(grav, 1.0, 10.0, 10.0), init,
                       (("outflow", "outflow"),), 1e-4, (800,), tvb_m=(1e10, 2e6, 5e10), weno=True,
                       description="Leblanc shock tube, linear gravity")


def ex5_accuracy_2d(u0: float = 1.0, v0: float = 1.0, p0: float = 4.5) -> ProblemSpec:
    gamma = 1.4
    grav = linear_gravity_2d(1.0, 1.0)

    def exact(t):
        def f(x, y):
            x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
            s = np.pi * (x + y - (u0 + v0) * t)
            rho = 1.0 + 0.2 * np.sin(s)
            p = p0 + (u0 + v0) * t - x - y + 0.2 * np.cos(s) / np.pi
            return primitive_to_conservative(rho, (u0, v0), p, gamma)

        return f

    return ProblemSpec("ex5", 2, ((0.0, 2.0), (0.0, 2.0)), gamma, grav, isothermal_profile(grav), exact(0.0),
                       (("dirichlet", "dirichlet"), ("dirichlet", "dirichlet")), 0.1, (64, 64), exact=exact,
                       params={"u0": u0, "v0": v0, "p0": p0}, description="2D smooth travelling wave")


def ex6_isothermal_2d(eta: float = 0.0) -> ProblemSpec:
    gamma = 1.4
    rho0, p0, g = 1.21, 1.0, 1.0
    grav = linear_gravity_2d(g, g)
    prof = isothermal_profile(grav, rho0, p0)
    c = rho0 * g / p0

    def init(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        base = np.exp(-c * (x + y))
        p = p0 * base + eta * np.exp(-100.0 * c * ((x - 0.3) ** 2 + (y - 0.3) ** 2))
        return primitive_to_conservative(rho0 * base, (0.0, 0.0), p, gamma)

    init = _from_profile(prof, gamma) if eta == 0.0 else init
    return ProblemSpec("ex6", 2, ((0.0, 1.0), (0.0, 1.0)), gamma, grav, prof, init,
                       (("outflow", "outflow"), ("outflow", "outflow")), 1.0 if eta == 0.0 else 0.15, (50, 50),
                       equilibrium_start=eta == 0.0, params={"eta": eta}, description="2D isothermal equilibrium")


def ex7_polytropic_2d(eta: float = 0.0, rho_c: float = 1.0) -> ProblemSpec:
    gamma = 2.0
    prof, grav = polytropic_profile_radial(rho_c, 1.0, 1.0)

    def init(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        p = prof.p(x, y) + eta * np.exp(-100.0 * (x * x + y * y))
        return primitive_to_conservative(prof.rho(x, y), (0.0, 0.0), p, gamma)

    init = _from_profile(prof, gamma) if eta == 0.0 else init
    return ProblemSpec("ex7", 2, ((-0.5, 0.5), (-0.5, 0.5)), gamma, grav, prof, init,
                       (("outflow", "outflow"), ("outflow", "outflow")), 14.8 if eta == 0.0 else 0.2, (50, 50),
                       equilibrium_start=eta == 0.0, params={"eta": eta, "rho_c": rho_c},
                       description="radial polytropic equilibrium")


def ex8_rarefaction_2d() -> ProblemSpec:
    gamma = 1.4
    grav = quadratic_gravity_2d(0.5, 0.5)
    prof = isothermal_profile(grav, 1.0, 0.4)

    def init(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        e = np.exp(-grav.phi(x, y) / 0.4)
        return primitive_to_conservative(e, (np.where(x < 0.5, -2.0, 2.0), 0.0), 0.4 * e, gamma)

    return ProblemSpec("ex8", 2, ((0.0, 1.0), (0.0, 1.0)), gamma, grav, prof, init,
                       (("outflow", "outflow"), ("outflow", "outflow")), 0.1, (100, 100),
                       description="2D rarefaction, quadratic potential")


def ex9_blast_2d(rho_c: float = 0.01) -> ProblemSpec:
    gamma = 2.0
    prof, grav = polytropic_profile_radial(rho_c, 1.0, 1.0)

    def init(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        p = prof.p(x, y) + np.where(x * x + y * y < 0.01, 100.0, 0.0)
        return primitive_to_conservative(prof.rho(x, y), (0.0, 0.0), p, gamma)

    return ProblemSpec("ex9", 2, ((-0.5, 0.5), (-0.5, 0.5)), gamma, grav, prof, init,
                       (("outflow", "outflow"), ("outflow", "outflow")), 0.005, (200, 200), tvb_m=(200.0,),
                       weno=True, params={"rho_c": rho_c}, description="blast in a polytropic atmosphere")


# atmospheric constants for the rising bubble
R_DRY = 287.058
T0_BUBBLE = 300.0
P0_BUBBLE = 1e5
G_EARTH = 9.8


def exner(y, gamma: float = 1.4, g: float = G_EARTH, R: float = R_DRY, T0: float = T0_BUBBLE):
    return 1.0 - (gamma - 1.0) * g * np.asarray(y, float) / (gamma * R * T0)


def bubble_theta_perturbation(x, y, theta_c: float = 0.5, xc: float = 500.0, yc: float = 350.0, rc: float = 250.0):
    r = np.hypot(np.asarray(x, float) - xc, np.asarray(y, float) - yc)
    return np.where(r <= rc, 0.5 * theta_c * (1.0 + np.cos(np.pi * np.minimum(r, rc) / rc)), 0.0)


def potential_temperature(U: np.ndarray, y, gamma: float = 1.4) -> np.ndarray:
    """Theta = p0 Pi^(1/(gamma-1)) / (R rho) for the ambient Exner function."""
    return P0_BUBBLE * exner(y, gamma) ** (1.0 / (gamma - 1.0)) / (R_DRY * U[0])


def ex10_rising_bubble(theta_c: float = 0.5) -> ProblemSpec:
    gamma = 1.4
    grav = linear_gravity_2d(0.0, G_EARTH)

    def rho_of(y, theta):
        return P0_BUBBLE / (R_DRY * theta) * exner(y, gamma) ** (1.0 / (gamma - 1.0))

    def p_of(y):
        return P0_BUBBLE * exner(y, gamma) ** (gamma / (gamma - 1.0))

    prof = layered_profile(None, lambda y: rho_of(y, T0_BUBBLE), p_of, lambda y: -G_EARTH * rho_of(y, T0_BUBBLE))

    def init(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        theta = T0_BUBBLE + bubble_theta_perturbation(x, y, theta_c)
        return primitive_to_conservative(rho_of(y, theta), (0.0, 0.0), p_of(y), gamma)

    return ProblemSpec("ex10", 2, ((0.0, 1000.0), (0.0, 1000.0)), gamma, grav, prof, init,
                       (("reflective", "reflective"), ("reflective", "reflective")), 60.0, (50, 50),
                       params={"theta_c": theta_c}, description="warm bubble in a neutral atmosphere")


def ex11_rt(case: int = 1) -> ProblemSpec:
    gamma = 1.4
    if case in (1, 2):
        Tl, Tu = (1.0, 2.0) if case == 1 else (2.0, 1.0)
        grav = linear_gravity_2d(0.0, 1.0)

        def p(y):
            return np.where(y < 0, np.exp(-y / Tl), np.exp(-y / Tu))

        def rho(y):
            return np.where(y < 0, p(y) / Tl, p(y) / Tu)

        prof = layered_profile(None, rho, p, lambda y: -rho(y))
        return ProblemSpec(f"ex11_rt{case}", 2, ((-0.25, 0.25), (-1.0, 1.0)), gamma, grav, prof,
                           _from_profile(prof, gamma), (("reflective", "reflective"), ("reflective", "reflective")),
                           0.1, (25, 100), tvb_m=(200.0,), equilibrium_start=True, params={"Tl": Tl, "Tu": Tu},
                           description="discontinuous isothermal layers")
    if case != 3:
        raise ConfigError(f"unknown RT case {case}")
    grav = linear_gravity_2d(0.0, -1.0)

    def p3(y):
        return np.where(y < 0.5, 2.0 * y + 1.0, y + 1.5)

    def rho3(y):
        return np.where(y < 0.5, 2.0, 1.0)

    prof = layered_profile(None, rho3, p3, rho3)

    def init(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        r, pp = rho3(y), p3(y)
        v = -0.025 * np.sqrt(gamma * pp / r) * np.cos(8.0 * np.pi * x)
        return primitive_to_conservative(r, (0.0, v), pp, gamma)

    def walls(t):
        def f(x, y):
            x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
            top = y > 0.5
            return primitive_to_conservative(np.where(top, 1.0, 2.0), (0.0, 0.0), np.where(top, 2.5, 1.0), gamma)

        return f

    return ProblemSpec("ex11_rt3", 2, ((0.0, 0.25), (0.0, 1.0)), gamma, grav, prof, init,
                       (("reflective", "reflective"), ("dirichlet", "dirichlet")), 1.95, (60, 240), exact=walls,
                       tvb_m=(200.0,), weno=True, description="perturbed unstable layers")


def ex_periodic_smooth(dim: int = 1) -> ProblemSpec:
    """Zero-gravity periodic smooth flow used for conservation checks."""
    gamma = 1.4
    if dim == 1:
        def init(x):
            x = np.asarray(x, float)
            return primitive_to_conservative(1.0 + 0.2 * np.sin(np.pi * x), 0.7, 1.0 + 0.1 * np.cos(np.pi * x), gamma)

        return ProblemSpec("periodic", 1, (0.0, 2.0), gamma, _zero_gravity(1), constant_profile(1), init,
                           (("periodic", "periodic"),), 0.1, (32,), description="periodic smooth flow, no gravity")

    def init2(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        return primitive_to_conservative(1.0 + 0.2 * np.sin(np.pi * (x + y)), (0.7, -0.3),
                                         1.0 + 0.1 * np.cos(np.pi * x), gamma)

    return ProblemSpec("periodic2d", 2, ((0.0, 2.0), (0.0, 2.0)), gamma, _zero_gravity(2), constant_profile(2), init2,
                       (("periodic", "periodic"), ("periodic", "periodic")), 0.1, (16, 16),
                       description="periodic smooth flow, no gravity")


_CATALOG = {
    "ex1": ex1_accuracy_1d,
    "ex2": ex2_isothermal_1d,
    "ex3": ex3_rarefaction_1d,
    "ex4": ex4_leblanc_1d,
    "ex5": ex5_accuracy_2d,
    "ex6": ex6_isothermal_2d,
    "ex7": ex7_polytropic_2d,
    "ex8": ex8_rarefaction_2d,
    "ex9": ex9_blast_2d,
    "ex10": ex10_rising_bubble,
    "ex11_rt1": lambda: ex11_rt(1),
    "ex11_rt2": lambda: ex11_rt(2),
    "ex11_rt3": lambda: ex11_rt(3),
    "periodic": lambda: ex_periodic_smooth(1),
    "periodic2d": lambda: ex_periodic_smooth(2),
}


def catalog() -> list[ProblemSpec]:
    return [make() for make in _CATALOG.values()]


def get_problem(pid: str, **params) -> ProblemSpec:
    if pid not in _CATALOG:
        raise ConfigError(f"unknown problem {pid!r}; choose from {sorted(_CATALOG)}")
    try:
        return _CATALOG[pid](**params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {pid}: {exc}") from exc


def exact_or_reference(problem: ProblemSpec, t: float):
    """Evaluator of the exact solution at time t, or None."""
    if problem.exact is not None and problem.pid not in ("ex11_rt3",):
        return problem.exact(t)
    if problem.equilibrium_start:
        return _from_profile(problem.profile, problem.gamma)
    return None


# --------------------------------------------------------------- factory


@dataclass
class SolverSetup:
    problem: ProblemSpec
    mesh: object
    solver: Solver
    eq: dict
    k: int


def build_solver(problem: ProblemSpec, k: int | None = None, n=None, control: StepControl | None = None,
                 limiter: LimiterConfig | None = None, wb: bool = True) -> SolverSetup:
    """Project data on both families, build the scheme and return a ready solver."""
    from .limiters import pp_limit

    k = problem.k if k is None else int(k)
    n = problem.n if n is None else (tuple(n) if not np.isscalar(n) else (int(n),) * problem.dim)
    if len(n) != problem.dim:
        raise ConfigError(f"{problem.pid} is {problem.dim}D but got mesh sizes {n}")
    if problem.dim == 2 and k < 2:
        raise ConfigError("2D schemes need k >= 2 for the quadrant-mean projection")
    mesh, _ = build_meshes(problem.dim, problem.extent if problem.dim == 2 else problem.extent,
                           n[0] if problem.dim == 1 else n, problem.periodic + (False,) * (2 - problem.dim), k)
    control = control or StepControl(cfl=0.25 if k <= 2 else 0.15, t_final=problem.t_final)
    limiter = limiter or LimiterConfig(weno=problem.weno, tvb=TvbParams(problem.tvb_m))
    gamma = problem.gamma
    boundary = Boundary(mesh, problem.bc, k, gamma, exact=problem.exact)
    eq_fn = _from_profile(problem.profile, gamma)
    eq = {}
    for fam in (PRIMAL, DUAL):
        coef = project_novel(eq_fn, mesh, fam, k).coef
        coef, _ = pp_limit(coef, k, gamma, problem.dim)
        eq[fam] = boundary.apply_eq(coef, fam)
    if problem.dim == 1:
        from .cdg1d import Scheme1D

        scheme = Scheme1D(mesh, k, gamma, eq, grad_phi=problem.gravity.grad, wb=wb)
    else:
        from .cdg2d import Scheme2D

        scheme = Scheme2D(mesh, k, gamma, eq, grad_phi=problem.gravity.grad, wb=wb)
    solver = Solver(scheme, boundary, eq, limiter, control)
    U0 = {fam: project_novel(problem.initial, mesh, fam, k).coef for fam in (PRIMAL, DUAL)}
    if problem.equilibrium_start:
        U0 = {fam: eq[fam].copy() for fam in (PRIMAL, DUAL)}
    solver.set_state(U0, 0.0)
    return SolverSetup(replace(problem), mesh, solver, eq, k)
