"""Command-line front end: ``cavity-hardy {pulse,solve,run,scan}``.

Exit codes: 0 success, 2 configuration/validation error, 3 no solution or
impossible post-selection, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, from_dict, load_config
from .errors import ConfigError, DegenerateState, ImpossibleOutcome, NoSolution, NumericalError, UndefinedConditional
from .nonlocality import hardy_stats
from .protocols import TRANSIT_KEYS, run_all, transit_amplitudes
from .pulse_model import A_L, B_HALF, OMEGA0, R_DEF, CouplingParams, pulse_area, solve_parameter
from .report import build_report, dumps

EXIT_OK, EXIT_CONFIG, EXIT_NO_SOLUTION, EXIT_NUMERICAL = 0, 2, 3, 4

TARGETS = ["alpha1-zero", "alpha-equal", "alpha1-sqrt2", "tan-minus-one", "alpha1-one"]


def _num(x: float) -> str:
    return repr(float(x))


def _write_csv(path_or_none, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else (_num(v) if isinstance(v, float) else v) for v in row])
    if path_or_none in (None, "-"):
        sys.stdout.write(buf.getvalue())
    else:
        Path(path_or_none).write_text(buf.getvalue())


def _geometry(args) -> dict:
    return {"a_l": args.al, "R_def": args.rdef, "b": args.b, "omega0": args.omega0}


def _add_geometry(p: argparse.ArgumentParser) -> None:
    p.add_argument("--al", type=float, default=A_L, help="lattice constant [m]")
    p.add_argument("--rdef", type=float, default=R_DEF, help="mode extent [m]")
    p.add_argument("--b", type=float, default=B_HALF, help="half interaction length [m]")
    p.add_argument("--omega0", type=float, default=OMEGA0, help="peak Rabi frequency [rad/s]")


def cmd_pulse(args) -> int:
    velocities = args.v or [161.0]
    overlaps = args.k or [1.0]
    rows = []
    for v in velocities:
        for k in overlaps:
            amps = pulse_area(CouplingParams(v=v, k=k, **_geometry(args)))
            rows.append((float(v), float(k), amps.theta, amps.alpha1, amps.alpha2))
    print(f"{'v [m/s]':>10} {'k':>8} {'theta [rad]':>16} {'alpha1':>16} {'alpha2':>16}")
    for v, k, theta, a1, a2 in rows:
        print(f"{v:>10.6g} {k:>8.6g} {theta:>16.12f} {a1:>16.12f} {a2:>16.12f}")
    if args.csv:
        _write_csv(args.csv, ["v", "k", "theta", "alpha1", "alpha2"], rows)
    return EXIT_OK


def _parse_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"range must be lo:hi, got {text!r}") from None
    return lo, hi


def cmd_solve(args) -> int:
    fixed = CouplingParams(v=args.v, k=args.k, **_geometry(args))
    solutions = solve_parameter(args.target, args.free, fixed, args.range, seed=args.seed)
    name = "v" if args.free == "v" else "k"
    print(f"{len(solutions)} root(s) for {args.target} in {name} ∈ [{args.range[0]}, {args.range[1]}]")
    rows = []
    for s in solutions:
        rows.append((s.value, s.amplitudes.theta, s.amplitudes.alpha1, s.amplitudes.alpha2, s.residual))
        print(f"  {name} = {s.value:.12g}  theta = {s.amplitudes.theta:.12g}  "
              f"alpha1 = {s.amplitudes.alpha1:.12g}  alpha2 = {s.amplitudes.alpha2:.12g}  residual = {s.residual:.3e}")
    if args.csv:
        _write_csv(args.csv, [name, "theta", "alpha1", "alpha2", "residual"], rows)
    return EXIT_OK


def _resolve_config(args) -> RunConfig:
    cfg = load_config(args.config)
    if args.mode:
        cfg = cfg.with_mode(args.mode)
    return cfg


def cmd_run(args) -> int:
    cfg = _resolve_config(args)
    if args.eps is not None:
        cfg = from_dict({**cfg.raw, "eps": args.eps}, merge_defaults=False)
    experiments = [1, 2, 3, 4] if args.experiment == "all" else [int(args.experiment)]
    report = build_report(cfg, experiments)
    text = dumps(report)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
        suffix = f" (verdict: {report['verdict']})" if report["verdict"] else ""
        print(f"wrote {args.out}{suffix}", file=sys.stderr)
    return EXIT_OK


def _parse_sweep(text: str) -> tuple[str, str, float, float, int]:
    try:
        target, grid = text.split("=")
        key, param = target.split(".")
        lo, hi, steps = grid.split(":")
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError:
        raise argparse.ArgumentTypeError(f"sweep must be TRANSIT.PARAM=lo:hi:steps, got {text!r}") from None
    if key not in TRANSIT_KEYS or param not in ("v", "k"):
        raise argparse.ArgumentTypeError(f"sweep target must be one of {TRANSIT_KEYS} with .v or .k")
    if steps < 1:
        raise argparse.ArgumentTypeError("steps must be >= 1")
    return key, param, lo, hi, steps


def _scan_point(cfg: RunConfig, key: str, param: str, value: float, full: bool) -> list:
    point = cfg.with_transit_value(key, param, value)
    amps = transit_amplitudes(point.transits[key])
    row = [value, amps.theta, amps.alpha1, amps.alpha2]
    if full:
        stats = hardy_stats(run_all(point.base_experiment_config()))
        row += [stats.p4_joint, stats.c_alice_given_e2, stats.c_bob_given_e3]
    return row


def cmd_scan(args) -> int:
    cfg = _resolve_config(args)
    key, param, lo, hi, steps = args.sweep
    if "alpha1" in cfg.raw["transits"][key]:
        raise ConfigError(f"cannot sweep {key}.{param}: transit has forced amplitudes")
    values = [lo] if steps == 1 else [float(x) for x in np.linspace(lo, hi, steps)]
    header = [f"{key}.{param}", "theta", "alpha1", "alpha2"]
    if args.full:
        header += ["p4_joint", "c_alice_given_e2", "c_bob_given_e3"]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_scan_point, *zip(*[(cfg, key, param, v, args.full) for v in values])))
    else:
        rows = [_scan_point(cfg, key, param, v, args.full) for v in values]
    _write_csv(args.out, header, rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cavity-hardy", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pulse", help="pulse area and amplitudes for (v, k) tuples")
    p.add_argument("--v", type=float, action="append", help="velocity [m/s], repeatable")
    p.add_argument("--k", type=float, action="append", help="overlap in [0, 1], repeatable")
    _add_geometry(p)
    p.add_argument("--csv", help="also write rows (v, k, theta, alpha1, alpha2)")
    p.set_defaults(func=cmd_pulse)

    p = sub.add_parser("solve", help="find every v or k meeting an amplitude condition")
    p.add_argument("--target", required=True, choices=TARGETS)
    p.add_argument("--free", required=True, choices=["v", "k"])
    p.add_argument("--range", required=True, type=_parse_range, help="lo:hi")
    p.add_argument("--v", type=float, default=161.0, help="fixed velocity when solving for k")
    p.add_argument("--k", type=float, default=1.0, help="fixed overlap when solving for v")
    p.add_argument("--seed", type=float, help="sort roots by distance to this value")
    _add_geometry(p)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("run", help="simulate experiments and write a JSON report")
    p.add_argument("--experiment", default="all", choices=["1", "2", "3", "4", "all"])
    p.add_argument("--mode", choices=["paper", "exact"], help="overrides the config's mode")
    p.add_argument("--config", help="JSON config; defaults are the reference operating point")
    p.add_argument("--out", help="report path (default: stdout)")
    p.add_argument("--eps", type=float, help="verdict tolerance, overrides the config")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("scan", help="sweep one transit parameter, CSV out")
    p.add_argument("--sweep", required=True, type=_parse_sweep, help="TRANSIT.PARAM=lo:hi:steps, e.g. a1_C2.v=170:190:21")
    p.add_argument("--mode", choices=["paper", "exact"])
    p.add_argument("--config")
    p.add_argument("--full", action="store_true", help="add p4 and both Hardy conditionals")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_scan)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for problem in exc.problems:
            if problem != str(exc):
                print(f"  - {problem}", file=sys.stderr)
        return EXIT_CONFIG
    except (NoSolution, ImpossibleOutcome, DegenerateState, UndefinedConditional) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_SOLUTION
    except (NumericalError, FloatingPointError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
