"""Equilibrium preservation: L1 distance to the projected equilibrium after a run."""
from __future__ import annotations

import argparse

from wbcdg.config import RunConfig
from wbcdg.errors import RuntimeLimitError
from wbcdg.output import wb_report

CASES = {
    "ex2": {"problem.id": "ex2", "mesh.n": 100},
    "ex6": {"problem.id": "ex6", "mesh.n": (50, 50)},
    "ex7": {"problem.id": "ex7", "mesh.n": (50, 50)},
    "rt1": {"problem.id": "ex11_rt1", "mesh.n": (25, 100)},
    "rt2": {"problem.id": "ex11_rt2", "mesh.n": (25, 100)},
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("cases", nargs="*", default=list(CASES), choices=list(CASES))
    ap.add_argument("--t-final", type=float, default=None, help="override the final time")
    ap.add_argument("--wall-limit", type=float, default=None, help="seconds per case")
    ap.add_argument("--weno", choices=("on", "off"), default=None)
    args = ap.parse_args()
    for name in args.cases:
        kv = dict(CASES[name])
        if args.t_final is not None:
            kv["time.t_final"] = args.t_final
        if args.wall_limit is not None:
            kv["time.wall_limit"] = args.wall_limit
        if args.weno is not None:
            kv["limiter.weno"] = args.weno == "on"
        try:
            rep = wb_report(RunConfig.from_mapping(kv), quiet=False)
        except RuntimeLimitError as exc:
            print(f"{name}: stopped, {exc}")
            continue
        worst = max(max(d.values()) for d in rep.wb_distance.values())
        print(f"{name}: max L1 distance {worst:.3e}, troubled cells {rep.troubled}")


if __name__ == "__main__":
    main()
