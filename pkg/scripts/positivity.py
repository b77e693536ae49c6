"""Low-density and low-pressure runs: minimum density and pressure and limiter activity."""
from __future__ import annotations

import argparse

from wbcdg.config import RunConfig
from wbcdg.errors import PositivityError, RuntimeLimitError
from wbcdg.output import run

CASES = {
    "ex3": {"problem.id": "ex3", "mesh.n": 400},
    "ex4": {"problem.id": "ex4", "mesh.n": 800},
    "ex8": {"problem.id": "ex8", "mesh.n": (100, 100)},
    "ex9": {"problem.id": "ex9", "mesh.n": (200, 200)},
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("cases", nargs="*", default=list(CASES), choices=list(CASES))
    ap.add_argument("--wall-limit", type=float, default=None, help="seconds per case")
    ap.add_argument("--out", default=None, help="directory for per-case fields and logs")
    args = ap.parse_args()
    for name in args.cases:
        kv = dict(CASES[name])
        if args.wall_limit is not None:
            kv["time.wall_limit"] = args.wall_limit
        out = None if args.out is None else f"{args.out}/{name}"
        try:
            res = run(RunConfig.from_mapping(kv), out=out, quiet=True)
        except PositivityError as exc:
            print(f"{name}: positivity fault: {exc}")
            continue
        except RuntimeLimitError as exc:
            print(f"{name}: stopped, {exc}")
            continue
        r = res.report
        print(f"{name}: steps {r.steps}, min rho {r.rho_min:.3e}, min p {r.p_min:.3e}, "
              f"rho limited {r.rho_limited}, p limited {r.p_limited}, troubled {r.troubled}, {r.wall_time:.0f}s")


if __name__ == "__main__":
    main()
