"""Command line entry point: ``uwb-vptl <subcommand>``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import experiments, monitor
from .geometry import AnchorLayout, GeometryError, Infeasible, RangePair, triangulate
from .ranging import DEFAULT_DISTANCES, NoiseModel, RangingMode, error_profile
from .scenario import ConfigError, load_scenario

log = logging.getLogger("uwb_vptl")

EXIT_OK, EXIT_IO, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _layout(args) -> AnchorLayout:
    try:
        return AnchorLayout.from_baseline(args.baseline)
    except GeometryError as exc:
        raise UsageError(str(exc)) from None


def _noise(args) -> NoiseModel:
    try:
        return NoiseModel(args.sigma_e, getattr(args, "bias", 0.0))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_triangulate(args) -> int:
    layout = _layout(args)
    try:
        pos = triangulate(layout, RangePair(args.r1, args.r2))
    except Infeasible:
        raise UsageError("infeasible ranging pair") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(f"x_k={pos.x_k:.6f} y_k={pos.y_k:.6f}")
    return EXIT_OK


def cmd_error_profile(args) -> int:
    layout = _layout(args)
    if args.n < 2:
        raise UsageError("--n must be >= 2 to estimate a standard deviation")
    if any(d <= layout.half_baseline for d in args.distances):
        raise UsageError("every distance must exceed half the baseline")
    profile = error_profile(layout, args.distances, args.n, _noise(args), args.seed,
                            RangingMode(args.mode))
    _write(profile.to_csv(), args.output)
    return EXIT_OK


def cmd_coverage_map(args) -> int:
    try:
        text = experiments.coverage_map(_layout(args), args.xmin, args.xmax, args.ymin,
                                        args.ymax, args.step)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(text, args.output)
    return EXIT_OK


def cmd_side_test(args) -> int:
    if args.n < 2 or args.trials < 1:
        raise UsageError("need --n >= 2 and --trials >= 1")
    rows = experiments.side_test(_layout(args), _noise(args), args.distance, args.lateral,
                                 args.n, args.seed, args.trials, args.min_confidence)
    if args.output:
        _write(experiments.scatter_csv(rows), args.output)
    _write("".join(r.report_line() + "\n" for r in rows), args.report)
    return EXIT_OK


def cmd_vptl_sim(args) -> int:
    from .scenario import with_params
    from .simulation import run_scenario

    try:
        sc = load_scenario(args.scenario)
    except ConfigError as exc:
        raise UsageError(f"scenario: {exc}") from None
    if args.seed is not None:
        sc = with_params(sc, seed=args.seed)
    result = run_scenario(sc)
    prefix = args.output or sc.name
    _write(result.log_text(), f"{prefix}.log")
    _write(result.timeline_csv(), f"{prefix}_phases.csv")
    if args.check:
        problems = monitor.check_all(result.events, sc)
        for p in problems:
            print(f"violation: {p}", file=sys.stderr)
        print(f"checked {len(result.events)} events: {len(problems)} violations")
        if problems:
            return EXIT_USAGE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uwb-vptl", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, noise=True):
        p.add_argument("--baseline", type=float, default=1.85, help="anchor spacing in metres")
        if noise:
            p.add_argument("--sigma-e", type=float, default=0.0185,
                           help="ranging error scale in metres")
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--n", type=int, default=200, help="measurements per location")
        p.add_argument("--output", "-o", default=None, help="output path (default: stdout)")

    p = sub.add_parser("triangulate", help="locate a tag from two ranges")
    p.add_argument("--r1", type=float, required=True, help="range to the left anchor")
    p.add_argument("--r2", type=float, required=True, help="range to the right anchor")
    p.add_argument("--baseline", type=float, default=1.85)
    p.set_defaults(func=cmd_triangulate)

    p = sub.add_parser("error-profile", help="lateral/longitudinal spread vs distance")
    common(p)
    p.add_argument("--bias", type=float, default=0.0)
    p.add_argument("--distances", type=_floats, default=list(DEFAULT_DISTANCES))
    p.add_argument("--mode", choices=[m.value for m in RangingMode], default="DS")
    p.set_defaults(func=cmd_error_profile)

    p = sub.add_parser("coverage-map", help="rasterize anchor coverage to CSV")
    common(p, noise=False)
    p.add_argument("--xmin", type=float, default=-60.0)
    p.add_argument("--xmax", type=float, default=60.0)
    p.add_argument("--ymin", type=float, default=-60.0)
    p.add_argument("--ymax", type=float, default=60.0)
    p.add_argument("--step", type=float, default=1.0)
    p.set_defaults(func=cmd_coverage_map)

    p = sub.add_parser("side-test", help="left/right separation of point clouds")
    common(p)
    p.add_argument("--lateral", type=float, default=5.0)
    p.add_argument("--distance", type=_floats, default=list(experiments.SIDE_DISTANCES))
    p.add_argument("--trials", type=int, default=100, help="consecutive seeds to run")
    p.add_argument("--min-confidence", type=float, default=0.999)
    p.add_argument("--report", default=None, help="report path (default: stdout)")
    p.set_defaults(func=cmd_side_test)

    p = sub.add_parser("vptl-sim", help="run an intersection scenario file")
    p.add_argument("scenario", help="TOML scenario file")
    p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p.add_argument("--output", "-o", default=None,
                   help="output prefix for <prefix>.log and <prefix>_phases.csv")
    p.add_argument("--check", action="store_true", help="verify safety and liveness")
    p.set_defaults(func=cmd_vptl_sim)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
