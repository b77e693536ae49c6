"""Run, convergence and well-balance drivers plus their on-disk artifacts."""
from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .config import RunConfig
from .diagnostics import evaluate_1d, evaluate_2d, l1_distance, l1_error, orders
from .errors import ConfigError
from .euler import pressure
from .mesh import DUAL, PRIMAL, Mesh1D
from .problems import ProblemSpec, SolverSetup, build_solver, exact_or_reference

COMPONENTS = {1: ("rho", "m", "E"), 2: ("rho", "m1", "m2", "E")}


@dataclass
class ErrorReport:
    problem: str
    k: int
    n: list
    t_final: float
    steps: int = 0
    wall_time: float = 0.0
    l1: dict = field(default_factory=dict)  # family -> component -> error vs exact
    wb_distance: dict = field(default_factory=dict)  # family -> component -> distance to projected equilibrium
    rho_min: float = float("inf")
    p_min: float = float("inf")
    rho_limited: int = 0
    p_limited: int = 0
    troubled: int = 0
    theta1_min: float = 1.0
    theta2_min: float = 1.0
    ladder: list = field(default_factory=list)  # rows of the convergence table
    orders: dict = field(default_factory=dict)  # component -> successive orders

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, allow_nan=True)


@dataclass
class RunResult:
    setup: SolverSetup
    report: ErrorReport


def _fmt(v) -> str:
    return repr(float(v))


def _prepare_out(out: str | Path | None) -> Path | None:
    if out is None:
        return None
    path = Path(out)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {path}: {exc}") from None
    return path


# ----------------------------------------------------------------- fields


def field_samples(setup: SolverSetup, family: str = PRIMAL) -> tuple[list, np.ndarray]:
    """Header and rows of point samples: cell centres (and cell faces in 1D)."""
    s, mesh, k = setup.solver, setup.mesh, setup.k
    g = setup.problem.gamma
    sl = s.interior(family)
    U, E = s.U[family][sl], setup.eq[family][sl]
    if isinstance(mesh, Mesh1D):
        xi = np.array([-1.0, 0.0, 1.0])
        x = (mesh.centers(family)[sl][:, None] + 0.5 * mesh.dx * xi).ravel()
        vals = np.moveaxis(evaluate_1d(U, k, xi), 1, 0).reshape(3, -1)
        eqv = np.moveaxis(evaluate_1d(E, k, xi), 1, 0).reshape(3, -1)
        coords, names = [x], ["x"]
    else:
        X, Y = mesh.centers(family)
        X, Y = np.meshgrid(X[sl[0]], Y[sl[1]], indexing="ij")
        zero = np.zeros(1)
        vals = np.moveaxis(evaluate_2d(U, k, zero, zero)[..., 0], -1, 0).reshape(4, -1)
        eqv = np.moveaxis(evaluate_2d(E, k, zero, zero)[..., 0], -1, 0).reshape(4, -1)
        coords, names = [X.ravel(), Y.ravel()], ["x", "y"]
    comps = COMPONENTS[mesh.dim]
    p, peq = pressure(vals, g), pressure(eqv, g)
    vel = [vals[i] / vals[0] for i in range(1, mesh.dim + 1)]
    header = names + list(comps) + ["p"] + ["u", "v"][:mesh.dim] + ["drho", "dp"]
    cols = coords + list(vals) + [p] + vel + [vals[0] - eqv[0], p - peq]
    return header, np.array(cols).T


def write_csv(path: Path, header: list, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])


def write_step_log(path: Path, log: list) -> None:
    with open(path, "w") as fh:
        fh.write("step t dt rho_min p_min rho_limited p_limited troubled mass\n")
        for r in log:
            fh.write(f"{r.step} {_fmt(r.t)} {_fmt(r.dt)} {_fmt(r.rho_min)} {_fmt(r.p_min)} "
                     f"{r.rho_limited} {r.p_limited} {r.troubled} {_fmt(r.mass[0])}\n")


# ----------------------------------------------------------------- drivers


def setup_from_config(cfg: RunConfig, n=None, problem: ProblemSpec | None = None) -> SolverSetup:
    problem = problem or cfg.problem()
    n = cfg.mesh_sizes(problem) if n is None else n
    return build_solver(problem, k=cfg.degree(problem), n=n, control=cfg.control(problem),
                        limiter=cfg.limiter(problem), wb=cfg.well_balanced)


def _errors(setup: SolverSetup, rep: ErrorReport) -> None:
    s, prob = setup.solver, setup.problem
    comps = COMPONENTS[prob.dim]
    f = exact_or_reference(prob, s.t)
    for fam in (PRIMAL, DUAL):
        sl = s.interior(fam)
        if f is not None:
            e = l1_error(s.U[fam], setup.mesh, fam, setup.k, f, sl)
            rep.l1[fam] = dict(zip(comps, map(float, e)))
        if prob.equilibrium_start:
            d = l1_distance(s.U[fam], setup.eq[fam], setup.mesh, setup.k, sl)
            rep.wb_distance[fam] = dict(zip(comps, map(float, d)))


def run(cfg: RunConfig, out: str | Path | None = None, quiet: bool = True, n=None,
        problem: ProblemSpec | None = None) -> RunResult:
    """Advance one configuration to its final time and write its artifacts."""
    path = _prepare_out(out)
    setup = setup_from_config(cfg, n=n, problem=problem)
    s = setup.solver
    T = s.control.t_final
    rep = ErrorReport(setup.problem.pid, setup.k, list(setup.mesh.dim * [0]), T)
    rep.n = [setup.mesh.n] if setup.mesh.dim == 1 else [setup.mesh.ax.n, setup.mesh.ay.n]
    snaps = []
    if path is not None and cfg.snapshots > 0:
        marks = list(np.linspace(0.0, T, cfg.snapshots + 1)[1:-1])

        def grab(solver):
            while marks and solver.t >= marks[0]:
                marks.pop(0)
                snaps.append((solver.t, field_samples(setup)))
    else:
        grab = None
    t0 = time.perf_counter()
    try:
        s.advance_to(T, callback=grab, log_every=max(1, cfg.log_every))
    finally:
        rep.wall_time = time.perf_counter() - t0
        rep.steps = s.steps
        if s.log:
            rep.rho_min = min(r.rho_min for r in s.log)
            rep.p_min = min(r.p_min for r in s.log)
        r = s.report
        rep.rho_limited, rep.p_limited, rep.troubled = r.rho_limited, r.p_limited, r.troubled
        rep.theta1_min, rep.theta2_min = r.theta1_min, r.theta2_min
        if path is not None:
            write_step_log(path / "steps.log", s.log)
    _errors(setup, rep)
    if path is not None:
        write_csv(path / "field.csv", *field_samples(setup))
        if cfg.dual:
            write_csv(path / "field_dual.csv", *field_samples(setup, DUAL))
        for i, (t, (h, rows)) in enumerate(snaps):
            write_csv(path / f"field_{i + 1:03d}.csv", h, rows)
        (path / "report.json").write_text(rep.to_json())
    if not quiet:
        print(summary_line(rep))
    return RunResult(setup, rep)


def summary_line(rep: ErrorReport) -> str:
    parts = [f"{rep.problem} k={rep.k} n={'x'.join(map(str, rep.n))} t={rep.t_final:g} steps={rep.steps}",
             f"min rho={rep.rho_min:.3e} min p={rep.p_min:.3e}"]
    if PRIMAL in rep.l1:
        parts.append("L1 " + " ".join(f"{c}={v:.3e}" for c, v in rep.l1[PRIMAL].items()))
    if rep.wb_distance:
        worst = max(max(d.values()) for d in rep.wb_distance.values())
        parts.append(f"WB max={worst:.3e}")
    parts.append(f"{rep.wall_time:.1f}s")
    return "  ".join(parts)


def default_ladder(problem: ProblemSpec) -> tuple:
    return (8, 16, 32, 64, 128) if problem.dim == 1 else (8, 16, 32, 64)


def convergence(cfg: RunConfig, ladder=None, out: str | Path | None = None, quiet: bool = True) -> ErrorReport:
    """Error and order table on a mesh ladder; primal-family L1 errors."""
    path = _prepare_out(out)
    problem = cfg.problem()
    if problem.exact is None:
        raise ConfigError(f"{problem.pid} has no exact solution for a convergence study")
    ladder = tuple(ladder or cfg.ladder or default_ladder(problem))
    comps = COMPONENTS[problem.dim]
    errs, total = [], ErrorReport(problem.pid, cfg.degree(problem), list(ladder), cfg.control(problem).t_final)
    for n in ladder:
        res = run(cfg, n=n, problem=problem)
        errs.append([res.report.l1[PRIMAL][c] for c in comps])
        total.steps += res.report.steps
        total.wall_time += res.report.wall_time
        total.rho_min = min(total.rho_min, res.report.rho_min)
        total.p_min = min(total.p_min, res.report.p_min)
        if not quiet:
            print(summary_line(res.report))
    rates = orders(errs, list(ladder)) if len(ladder) >= 2 else []
    for i, n in enumerate(ladder):
        row = {"n": n}
        for j, c in enumerate(comps):
            row[f"L1_{c}"] = errs[i][j]
            row[f"order_{c}"] = float(rates[i - 1][j]) if i > 0 else None
        total.ladder.append(row)
    if rates:
        total.orders = {c: [float(r[j]) for r in rates] for j, c in enumerate(comps)}
    if path is not None:
        header = list(total.ladder[0])
        rows = [[("" if r[h] is None else r[h]) for h in header] for r in total.ladder]
        write_csv(path / "convergence.csv", header, rows)
        (path / "report.json").write_text(total.to_json())
    return total


def wb_report(cfg: RunConfig, out: str | Path | None = None, quiet: bool = True) -> ErrorReport:
    """Distances to the projected equilibrium after running an equilibrium start."""
    problem = cfg.problem()
    if not problem.equilibrium_start:
        raise ConfigError(f"{problem.pid} with these parameters does not start from its equilibrium")
    res = run(cfg, out=out, quiet=quiet, problem=problem)
    path = _prepare_out(out)
    if path is not None:
        comps = COMPONENTS[problem.dim]
        rows = [[fam] + [res.report.wb_distance[fam][c] for c in comps] for fam in (PRIMAL, DUAL)]
        write_csv(path / "wb.csv", ["family"] + [f"L1_{c}" for c in comps], rows)
    return res.report
