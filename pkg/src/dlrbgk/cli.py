"""Command-line entry point.

    dlrbgk run <preset|config-path> [--override key=value ...]
    dlrbgk compare <snapA> <snapB>
    dlrbgk slice <snapshot> --plane {velocity,space,moments} [...]

Exit status is 0 on success, 1 for configuration errors and 2 for numerical
failures.  ``DLRBGK_OUTPUT_DIR`` overrides the configured output directory.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys

import numpy as np

from . import config as config_mod
from . import io
from .errors import ConfigError, NumericalError
from .lowrank import evaluate_g
from .runner import OUTPUT_ENV, run

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2


def _parser():
    p = argparse.ArgumentParser(prog="dlrbgk", description="Dynamical low-rank BGK solver")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a preset or config file",
                       epilog=f"presets: {', '.join(config_mod.PRESETS)}; {OUTPUT_ENV} overrides output_dir")
    r.add_argument("config", help="preset name or path to a key = value file")
    r.add_argument("--override", "-o", action="append", default=[], metavar="KEY=VALUE")

    c = sub.add_parser("compare", help="max-norm differences of rho and rho u between two snapshots")
    c.add_argument("a")
    c.add_argument("b")

    s = sub.add_parser("slice", help="write a slice of a snapshot as CSV")
    s.add_argument("snapshot")
    s.add_argument("--plane", required=True, choices=("velocity", "space", "moments"),
                   help="velocity: g(x_i, y_j, v, w); space: g(x, y, v_a, w_b); moments: rho, u1, u2")
    s.add_argument("--ix", type=int, help="spatial x index (velocity plane, or restricts moments to a column)")
    s.add_argument("--iy", type=int, help="spatial y index (velocity plane, or restricts moments to a row)")
    s.add_argument("--iv", type=int, help="velocity index along v (space plane)")
    s.add_argument("--iw", type=int, help="velocity index along w (space plane)")
    s.add_argument("--output", help="CSV path (default: stdout)")
    return p


def _index(value, n, name):
    if value is None:
        raise ConfigError(f"--{name} is required for this plane")
    if not -n <= value < n:
        raise ConfigError(f"--{name} {value} out of range for size {n}")
    return value % n


def slice_rows(snap: io.Snapshot, plane, ix=None, iy=None, iv=None, iw=None):
    xg = snap.xgrid
    if plane == "moments":
        ii = range(xg.nx) if ix is None else [_index(ix, xg.nx, "ix")]
        jj = range(xg.ny) if iy is None else [_index(iy, xg.ny, "iy")]
        header = ["x", "y", "rho", "u1", "u2"]
        rows = [[xg.x[i], xg.y[j], snap.rho[i, j], snap.u[0, i, j], snap.u[1, i, j]] for i in ii for j in jj]
        return header, rows
    state = snap.lowrank()
    vg = state.vgrid
    if plane == "velocity":
        i, j = _index(ix, xg.nx, "ix"), _index(iy, xg.ny, "iy")
        g = evaluate_g(state, i, j)
        return ["v", "w", "g"], [[vg.v[a], vg.v[b], g[a, b]] for a in range(vg.nv) for b in range(vg.nv)]
    a, b = _index(iv, vg.nv, "iv"), _index(iw, vg.nv, "iw")
    k = np.tensordot(state.V[:, a, b], state.S, axes=(0, 1))  # sum_j S_ij V_j(v_a, w_b)
    g = np.tensordot(k, state.X, axes=(0, 0))
    return ["x", "y", "g"], [[xg.x[i], xg.y[j], g[i, j]] for i in range(xg.nx) for j in range(xg.ny)]


def _cmd_run(args):
    cfg = config_mod.load(args.config, args.override)
    res = run(cfg)
    print(f"output directory: {res.output_dir}")
    print(f"diagnostics: {res.diagnostics}")
    for s in res.snapshots:
        print(f"snapshot: {s}")
    for f in res.figures:
        print(f"figure: {f}")


def _cmd_compare(args):
    d = io.moment_differences(io.read_snapshot(args.a), io.read_snapshot(args.b))
    print(f"max|rho_a - rho_b| = {d['rho']:.6e}")
    print(f"max|rho u_a - rho u_b| = {d['momentum']:.6e}")
    print(f"moment error = {d['moment_error']:.6e}")


def _cmd_slice(args):
    header, rows = slice_rows(io.read_snapshot(args.snapshot), args.plane, args.ix, args.iy, args.iv, args.iw)
    if args.output:
        io.write_csv(args.output, header, rows)
        return
    w = csv.writer(sys.stdout)
    w.writerow(header)
    w.writerows([[repr(float(v)) for v in r] for r in rows])


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    handler = {"run": _cmd_run, "compare": _cmd_compare, "slice": _cmd_slice}[args.command]
    try:
        handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
