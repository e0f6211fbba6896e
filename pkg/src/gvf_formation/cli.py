"""Command line entry point: ``simulate``, ``metrics`` and ``field``."""

from __future__ import annotations

import argparse
import dataclasses
import re
import sys

import numpy as np

from gvf_formation.errors import ScenarioError
from gvf_formation.gvf import GvfParams, ImplicitCurve, build_field
from gvf_formation.runner import run
from gvf_formation.scenario import load_scenario
from gvf_formation.telemetry import TelemetryLog, sync_time, write_svg

EXIT_VALIDATION = 2


def _cmd_simulate(args) -> int:
    sc = load_scenario(args.scenario)
    if args.seed is not None:
        sc = sc.with_seed(args.seed)
    if args.duration is not None:
        sc = dataclasses.replace(sc, duration_s=args.duration)
    result = run(sc, keep_trace=args.trace is not None)
    if args.out:
        result.to_csv(args.out)
    if args.svg:
        with open(args.svg, "w") as fh:
            write_svg(result, fh)
    if args.trace:
        with open(args.trace, "w") as fh:
            fh.write("time_ms,event,from,to,theta_rad\n")
            for ev in result.trace:
                fh.write(ev.to_line() + "\n")
    _print_metrics(result, args.threshold)
    return 0


def _print_metrics(result: TelemetryLog, threshold: float) -> None:
    ts = sync_time(result, threshold)
    print(f"sync_time_s={'none' if ts is None else f'{ts:.2f}'}")
    print(f"final_max_abs_z_rad={float(result.max_abs_z()[-1]):.6g}")


def _cmd_metrics(args) -> int:
    _print_metrics(TelemetryLog.read_csv(args.log), args.threshold)
    return 0


def _parse_grid(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"\s*(\d+)\s*[x×X*]\s*(\d+)\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"grid must look like 40x40, got {text!r}")
    w, h = int(m.group(1)), int(m.group(2))
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError("grid dimensions must be positive")
    return w, h


def _cmd_field(args) -> int:
    sc = load_scenario(args.scenario)
    curve = ImplicitCurve.circle(sc.center, sc.radius)
    params = GvfParams(sc.k_e, sc.k_d, sc.rotation_sense)
    w, h = args.grid
    half = args.extent if args.extent is not None else 2.5 * sc.radius
    xs = np.linspace(sc.center[0] - half, sc.center[0] + half, w).tolist()
    ys = np.linspace(sc.center[1] - half, sc.center[1] + half, h).tolist()
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        out.write("x_m,y_m,e_m2,dir_x,dir_y\n")
        for y in ys:
            for x in xs:
                try:
                    fs = build_field(curve, params, (x, y))
                except ValueError:
                    out.write(f"{x!r},{y!r},{-sc.radius ** 2!r},nan,nan\n")
                    continue
                d = fs.desired_direction
                out.write(f"{x!r},{y!r},{float(fs.error)!r},{float(d[0])!r},{float(d[1])!r}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gvf-formation", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run a scenario file")
    s.add_argument("scenario")
    s.add_argument("--out", help="telemetry CSV path")
    s.add_argument("--svg", help="trajectory SVG path")
    s.add_argument("--trace", help="network trace CSV path")
    s.add_argument("--seed", type=int)
    s.add_argument("--duration", type=float, help="override duration (s)")
    s.add_argument("--threshold", type=float, default=0.05, help="sync threshold (rad)")
    s.set_defaults(func=_cmd_simulate)

    m = sub.add_parser("metrics", help="sync time and final phase error of a log")
    m.add_argument("log")
    m.add_argument("--threshold", type=float, default=0.05)
    m.set_defaults(func=_cmd_metrics)

    f = sub.add_parser("field", help="dump guidance field samples on a grid")
    f.add_argument("scenario")
    f.add_argument("--grid", type=_parse_grid, default=(40, 40), help="W x H, e.g. 40x40")
    f.add_argument("--extent", type=float, help="half-width of the grid (m)")
    f.add_argument("--out", help="CSV path (default stdout)")
    f.set_defaults(func=_cmd_field)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
