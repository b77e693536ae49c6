"""Command-line entry point: ``wbcdg {run,convergence,wb-report,list-problems}``."""
from __future__ import annotations

import argparse
import sys

from .config import RunConfig
from .errors import ConfigError, PositivityError, RuntimeLimitError, SetupError

EXIT_OK, EXIT_CONFIG, EXIT_POSITIVITY, EXIT_LIMIT = 0, 2, 3, 4


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wbcdg", description="Well-balanced central DG solver for Euler with gravity.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, text in (("run", "advance one configuration to its final time"),
                       ("convergence", "errors and orders on a mesh ladder"),
                       ("wb-report", "distance to the projected equilibrium")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
        p.add_argument("--out", help="output directory (default: output.dir or ./out)")
        p.add_argument("--quiet", action="store_true")
        if name == "convergence":
            p.add_argument("--ladder", help="comma-separated mesh sizes")
    sub.add_parser("list-problems", help="print the built-in problem ids")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "list-problems":
            from .problems import catalog

            for p in catalog():
                n = "x".join(map(str, p.n))
                print(f"{p.pid:18s} {p.dim}D  n={n:8s} t={p.t_final:<8g} {p.description}")
            return EXIT_OK
        cfg = RunConfig.load(args.config, args.set)
        out = args.out or cfg.out_dir
        from . import output

        if args.command == "run":
            output.run(cfg, out=out, quiet=args.quiet)
        elif args.command == "convergence":
            ladder = None
            if args.ladder:
                try:
                    ladder = tuple(int(v) for v in args.ladder.split(","))
                except ValueError:
                    raise ConfigError(f"bad ladder {args.ladder!r}") from None
            rep = output.convergence(cfg, ladder=ladder, out=out, quiet=args.quiet)
            if not args.quiet:
                for c, r in rep.orders.items():
                    print(f"orders {c}: " + " ".join(f"{v:.2f}" for v in r))
        else:
            rep = output.wb_report(cfg, out=out, quiet=args.quiet)
            if not args.quiet:
                for fam, d in rep.wb_distance.items():
                    print(f"{fam}: " + " ".join(f"{c}={v:.3e}" for c, v in d.items()))
    except (ConfigError, SetupError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PositivityError as exc:
        print(f"positivity fault: {exc}", file=sys.stderr)
        return EXIT_POSITIVITY
    except RuntimeLimitError as exc:
        print(f"runtime limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
