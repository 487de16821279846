"""Command line entry point: ``crocker-lab <command> [options]``.

Exit codes: 0 success, 1 total failure, 2 bad arguments.

A sweep JSON config may hold any of the keys ``system, param_min,
param_max, steps, fs, duration, keep, initial_condition, subsample, bins,
maxdim, kfit, theiler, renorm_every, out, jobs``.  Flags given on the
command line override the file, which overrides the catalog defaults.
"""
from __future__ import annotations

import argparse
import logging
import re
import sys
from pathlib import Path

from . import crocker, dynamics, lyapunov, pipeline
from ._backend import name as backend_name
from .errors import CrockerError, MissingArtifacts

log = logging.getLogger("crocker_lab")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _fmt_params(params) -> str:
    return ", ".join(f"{k}={v:g}" for k, v in params.items()) or "-"


def cmd_catalog(args) -> int:
    rows = [("name", "control", "range", "steps", "fs_hz", "duration_s", "keep_s",
             "initial_condition", "fixed")]
    for name, s in dynamics.catalog().items():
        lo, hi = s.control_range
        rows.append((name, s.control_name, f"[{lo:g}, {hi:g}]", str(s.control_steps),
                     f"{s.sim.sampling_rate:g}", f"{s.sim.duration:g}", f"{s.sim.keep_last:g}",
                     "[" + ", ".join(f"{v:g}" for v in s.sim.initial_condition) + "]",
                     _fmt_params(s.fixed_params)))
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]) - 1)]
    for r in rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)) + "  " + r[-1])
    return EXIT_OK


def _sweep_flags(args) -> dict:
    return {"system": args.system, "param_min": args.param_min, "param_max": args.param_max,
            "steps": args.steps, "fs": args.fs, "duration": args.duration, "keep": args.keep,
            "subsample": args.subsample, "bins": args.bins, "kfit": args.kfit,
            "theiler": args.theiler, "out": args.out, "jobs": args.jobs}


def cmd_sweep(args) -> int:
    try:
        config = pipeline.SweepConfig.from_sources(args.config, **_sweep_flags(args))
        grid = config.grid()
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    log.info("sweep %s: %d values, backend %s", config.system, len(grid), backend_name)
    output = pipeline.run_sweep(config, write=True)
    failed = output.n_failed
    if failed:
        log.warning("%d of %d control values failed", failed, len(grid))
    if failed == len(grid):
        print("error: every control value failed", file=sys.stderr)
        return EXIT_FAIL
    for key, (mean, std) in pipeline.timing_summary(Path(config.out) / "timing.csv").items():
        print(f"{key:14s} {mean:.4g} +/- {std:.2g} s")
    print(f"wrote {config.out}")
    return EXIT_OK


def cmd_correlate(args) -> int:
    if args.sweep_dir:
        base = Path(args.sweep_dir)
        ly = args.lyapunov or base / "lyapunov.csv"
        l1 = args.l1 or base / "l1.csv"
    elif args.lyapunov and args.l1:
        ly, l1 = args.lyapunov, args.l1
    else:
        print("error: give a sweep directory or both --lyapunov and --l1", file=sys.stderr)
        return EXIT_USAGE
    try:
        rows = pipeline.correlate(ly, l1, args.system or "")
    except MissingArtifacts as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except CrockerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.method != "both":
        rows = [r for r in rows if r["method_lyap"] == args.method]
    text = pipeline.correlation_csv(rows)
    sys.stdout.write(text)
    if args.out:
        Path(args.out).write_text(text)
    return EXIT_OK


def cmd_compare(args) -> int:
    try:
        summary = pipeline.compare_lyapunov(args.sweep_dir, tuple(args.k), curves=not args.no_curves)
    except MissingArtifacts as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except CrockerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print("k,slope,intercept,mse,pearson,n_used")
    for k, s in summary.items():
        print(f"{k},{s['slope']:.6g},{s['intercept']:.6g},{s['mse']:.6g},"
              f"{s['pearson']:.6g},{s['n_used']}")
    return EXIT_OK


def cmd_heatmap(args) -> int:
    if args.cap < 1:
        print("error: --cap must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        text = Path(args.csv).read_text()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    dim = args.dim
    if dim is None:
        found = re.search(r"_h(\d+)", Path(args.csv).stem)
        dim = int(found.group(1)) if found else 0
    try:
        matrix = crocker.crocker_from_csv(text, dim, transpose=args.transpose)
    except CrockerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out) if args.out else Path(args.csv).with_suffix(".pgm")
    out.write_text(pipeline.heatmap_pgm(matrix, args.cap))
    print(f"wrote {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crocker-lab",
                                description="CROCKER plots and Lyapunov exponents over parameter sweeps.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("catalog", help="list the built-in systems").set_defaults(func=cmd_catalog)

    s = sub.add_parser("sweep", help="run a parameter sweep")
    s.add_argument("--config", help="JSON sweep config")
    s.add_argument("--system", choices=sorted(dynamics.catalog()))
    s.add_argument("--param-min", type=float)
    s.add_argument("--param-max", type=float)
    s.add_argument("--steps", type=int)
    s.add_argument("--fs", type=float, help="sampling rate in Hz")
    s.add_argument("--duration", type=float, help="simulated seconds")
    s.add_argument("--keep", type=float, help="retained seconds at the end")
    s.add_argument("--subsample", type=int, help="maxmin target size")
    s.add_argument("--bins", type=int)
    s.add_argument("--kfit", type=int, help="Rosenstein fit length in steps")
    s.add_argument("--theiler", type=int, help="Theiler window in samples")
    s.add_argument("--jobs", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("correlate", help="Pearson/Spearman of Lyapunov vs L1 norms")
    c.add_argument("sweep_dir", nargs="?")
    c.add_argument("--lyapunov")
    c.add_argument("--l1")
    c.add_argument("--system")
    c.add_argument("--method", choices=("benettin", "rosenstein", "both"), default="both")
    c.add_argument("--out", help="also write the report CSV here")
    c.set_defaults(func=cmd_correlate)

    m = sub.add_parser("compare-lyapunov", help="Rosenstein at several k against Benettin")
    m.add_argument("sweep_dir")
    m.add_argument("--k", type=int, nargs="+", default=[lyapunov.DEFAULT_KFIT])
    m.add_argument("--no-curves", action="store_true", help="skip divergence curve files")
    m.set_defaults(func=cmd_compare)

    h = sub.add_parser("heatmap", help="CROCKER CSV to plain PGM")
    h.add_argument("csv")
    h.add_argument("--cap", type=int, default=crocker.DISPLAY_CAP)
    h.add_argument("--dim", type=int, help="homology dimension label (default: from file name)")
    h.add_argument("--transpose", action="store_true", help="CSV has one row per eps")
    h.add_argument("--out")
    h.set_defaults(func=cmd_heatmap)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
