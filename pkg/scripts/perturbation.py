"""Small pressure perturbation on the 1D isothermal equilibrium, WB against the non-WB ablation.

Writes the pressure deviation of both coarse runs and of a fine reference to a CSV.
"""
from __future__ import annotations

import argparse
import csv

import numpy as np

from wbcdg.diagnostics import sample_primal
from wbcdg.euler import pressure
from wbcdg.mesh import PRIMAL
from wbcdg.problems import build_solver, get_problem


def dp_profile(n: int, wb: bool, x: np.ndarray, eta: float) -> np.ndarray:
    prob = get_problem("ex2", eta=eta)
    setup = build_solver(prob, n=n, wb=wb)
    setup.solver.advance_to(prob.t_final)
    U = sample_primal(setup.solver.U[PRIMAL], setup.mesh, setup.k, x)
    E = sample_primal(setup.eq[PRIMAL], setup.mesh, setup.k, x)
    return pressure(U, prob.gamma) - pressure(E, prob.gamma)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eta", type=float, default=1e-3)
    ap.add_argument("--n", type=int, default=50)
    ap.add_argument("--n-ref", type=int, default=1000)
    ap.add_argument("--samples", type=int, default=4000)
    ap.add_argument("--csv", default="perturbation.csv")
    args = ap.parse_args()
    x = (np.arange(args.samples) + 0.5) / args.samples
    ref = dp_profile(args.n_ref, True, x, args.eta)
    wb = dp_profile(args.n, True, x, args.eta)
    nwb = dp_profile(args.n, False, x, args.eta)
    for name, v in (("WB", wb), ("non-WB", nwb)):
        print(f"{name}: L1(dp - reference) = {np.mean(np.abs(v - ref)):.3e}")
    with open(args.csv, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "dp_ref", "dp_wb", "dp_nonwb"])
        w.writerows(zip(x, ref, wb, nwb))


if __name__ == "__main__":
    main()
