"""Command-line entry point: ``momentflow run <config> [flags]``.

Flags override the corresponding config file keys.  A run writes, into the
output directory: profile.csv, history.csv (flushed each iteration),
state.bin (binary snapshot), and matplotlib figures of the profile and the
convergence history.
"""

import argparse
import os
import sys

from .config import build_run, parse_config
from .driver import solve_to_steady
from .errors import ConfigError
from .output import (HistoryWriter, profile_columns, write_csv,
                     write_snapshot)

_FLAG_KEYS = {
    "solver": "solver.variant",
    "kn": "problem.kn",
    "order": "problem.order",
    "grid": "problem.grid",
    "max_iters": "solver.max_iters",
    "outdir": "output.outdir",
}


def _parser():
    p = argparse.ArgumentParser(prog="momentflow",
                                description="steady-state moment-system "
                                            "solver suite")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a benchmark from a config file")
    run.add_argument("config", help="path to a key = value config file")
    run.add_argument("--solver", help="solver variant "
                     "(euler|sis|sisgs|fim-1|fim-2|fim-3|nmg)")
    run.add_argument("--kn", type=float, help="Knudsen number")
    run.add_argument("--order", type=int, help="moment truncation order")
    run.add_argument("--grid", help="cells, e.g. 128 or 64x64")
    run.add_argument("--max-iters", type=int, dest="max_iters",
                     help="iteration budget")
    run.add_argument("--outdir", help="output directory")
    return p


def run(config_path, overrides=None, quiet=False):
    """Parse config, solve, write artifacts.  Returns the exit code (0 on
    convergence, 1 on a non-converged run)."""
    spec = build_run(parse_config(config_path), overrides)
    os.makedirs(spec.outdir, exist_ok=True)
    prefix = os.path.join(spec.outdir, spec.label)

    with HistoryWriter(prefix + "_history.csv") as hist:
        result = solve_to_steady(spec.problem, spec.solver,
                                 on_iteration=hist)

    columns = profile_columns(spec.problem, result.field)
    write_csv(prefix + "_profile.csv", columns)
    if spec.snapshot:
        write_snapshot(prefix + "_state.bin", result.field)
    if spec.plots:
        from . import report
        report.render_profile(prefix + "_profile.png", spec.problem, columns)
        report.render_history(prefix + "_history.png", result.history)

    if not quiet:
        status = "converged" if result.converged else \
            f"NOT converged ({result.message})"
        print(f"{spec.label}: {status} after {result.iterations} iterations, "
              f"residual {result.history[-1].residual:.3e}")
        print(f"artifacts in {spec.outdir}/")
    return 0 if result.converged else 1


def main(argv=None):
    args = _parser().parse_args(argv)
    overrides = {key: getattr(args, flag) for flag, key in _FLAG_KEYS.items()}
    try:
        return run(args.config, overrides)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
