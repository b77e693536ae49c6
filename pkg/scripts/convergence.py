"""Error and order tables for the smooth test problems (1D k=2, 1D k=3, 2D k=2)."""
from __future__ import annotations

import argparse

from wbcdg.config import RunConfig
from wbcdg.output import convergence

CASES = {
    "1d-k2": ({"problem.id": "ex1", "mesh.k": 2}, (8, 16, 32, 64, 128)),
    "1d-k3": ({"problem.id": "ex1", "mesh.k": 3, "time.dt_mode": "accuracy_matched"}, (8, 16, 32, 64, 128)),
    "2d-k2": ({"problem.id": "ex5"}, (8, 16, 32, 64)),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("cases", nargs="*", default=list(CASES), choices=list(CASES))
    ap.add_argument("--out", default=None, help="directory for convergence.csv and report.json")
    args = ap.parse_args()
    for name in args.cases:
        kv, ladder = CASES[name]
        out = None if args.out is None else f"{args.out}/{name}"
        rep = convergence(RunConfig.from_mapping(kv), ladder=ladder, out=out, quiet=False)
        comps = [c[3:] for c in rep.ladder[0] if c.startswith("L1_")]
        print(f"\n{name}")
        print("n      " + "  ".join(f"{'L1 ' + c:>10s} {'order':>5s}" for c in comps))
        for row in rep.ladder:
            cells = []
            for c in comps:
                o = row[f"order_{c}"]
                cells.append(f"{row[f'L1_{c}']:10.3e} {'' if o is None else f'{o:5.2f}':>5s}")
            print(f"{row['n']:<6d} " + "  ".join(cells))
        print(f"total {rep.wall_time:.1f}s\n")


if __name__ == "__main__":
    main()
