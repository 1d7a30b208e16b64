"""Command-line entry point: validate a plan, run a simulation, debug the planner.

Exit codes: 0 on success, 1 for config or floorplan load errors, 2 for a
runtime invariant violation (a defect, not an input problem).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import random
import sys

from . import config as cfgmod
from .config import ConfigError
from .density import EmptyAccumulator, export_density, normalize
from .engine import DensitySink, FrameSink, InvariantViolation, run
from .floorplan import FloorplanError, load_layers
from .planner import InvalidEndpoint, search


def _parse_seed_range(spec):
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        seeds = list(range(int(lo), int(hi) + 1))
        if not seeds:
            raise ConfigError(f"empty seed range {spec!r}")
        return seeds
    return [int(spec)]


def _parse_cell_arg(name, spec):
    parts = spec.split(",")
    if len(parts) != 2:
        raise ConfigError(f"{name}: expected x,y, got {spec!r}")
    x, y = (int(p) for p in parts)
    return (y, x)


def _load_floorplan(args, overrides=None):
    layers, load, sim = cfgmod.load_run_setup(args.config, overrides)
    return load_layers(layers, load), sim


def cmd_validate(args):
    fp, _ = _load_floorplan(args)
    print(f"size: {fp.width}x{fp.height}")
    print(f"walkable cells: {int(fp.walkable.sum())}")
    print(f"regions: {len(fp.regions)}")
    print(f"boundaries: {len(fp.boundaries)}")
    print(f"exhibits: {len(fp.exhibits)}")
    print(f"spawn cells: {len(fp.spawn_cells)}")
    print(f"exit cells: {len(fp.exit_cells)}")
    print("ok")
    return 0


def cmd_run(args):
    overrides = {
        "seed": args.seed,
        "max_ticks": args.ticks,
        "weight": args.weight,
        "replan_after_waits": args.replan_after_waits,
    }
    if args.no_noise:
        overrides["noise"] = False
    fp, sim = _load_floorplan(args, overrides)

    seeds = _parse_seed_range(args.seeds) if args.seeds else [sim.seed]
    if len(seeds) > 1 and (args.trace or args.frames):
        raise ConfigError("--trace/--frames apply to single-seed runs only")

    os.makedirs(args.out, exist_ok=True)
    merged = None
    reports = []
    for seed in seeds:
        cfg = dataclasses.replace(sim, seed=seed)
        sink = DensitySink((fp.height, fp.width), interval=cfg.convergence_interval,
                           epsilon=cfg.convergence_epsilon)
        frames = FrameSink(args.out, args.frames) if args.frames else None
        trace_fh = None
        if args.trace:
            trace_fh = open(os.path.join(args.out, "trace.csv"), "w")
            trace_fh.write("tick,agent,state,x,y,intent\n")
        try:
            report = run(fp, cfg, density=sink, trace=trace_fh, frames=frames)
        finally:
            if trace_fh is not None:
                trace_fh.close()
        reports.append(report)
        merged = sink.accumulator if merged is None else merged.merge(sink.accumulator)
        with open(os.path.join(args.out, "convergence.log"), "w") as fh:
            for tick_no, delta in sink.deltas:
                fh.write(f"{tick_no},{repr(delta)}\n")

    try:
        dmap = normalize(merged)
        export_density(dmap, os.path.join(args.out, "density.png"),
                       os.path.join(args.out, "density.csv"))
    except EmptyAccumulator:
        print("note: empty accumulator, density not exported", file=sys.stderr)

    payload = [dataclasses.asdict(r) for r in reports]
    doc = json.dumps(payload[0] if len(payload) == 1 else {"runs": payload},
                     indent=2, sort_keys=True)
    with open(os.path.join(args.out, "report.json"), "w") as fh:
        fh.write(doc + "\n")
    print(doc)
    return 0


def cmd_plan(args):
    fp, sim = _load_floorplan(args)
    planner = sim.planner
    if args.weight is not None:
        planner = dataclasses.replace(planner, weight=args.weight)
    if args.no_noise:
        planner = dataclasses.replace(planner, noise_enabled=False)
    start = _parse_cell_arg("--start", args.start)
    goal = _parse_cell_arg("--goal", args.goal)
    rng = random.Random(args.seed if args.seed is not None else sim.seed)
    cells, expanded = search(fp, start, goal, planner, rng)
    print(f"expanded,{expanded}")
    if cells is None:
        print("no path", file=sys.stderr)
        return 1
    for r, c in cells:
        print(f"{c},{r}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gallerysim",
        description="Simulate museum visitors on a raster floorplan and emit a density map.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="load a plan config and report its components")
    p_validate.add_argument("config")
    p_validate.set_defaults(func=cmd_validate)

    p_run = sub.add_parser("run", help="run the simulation and write density artifacts")
    p_run.add_argument("config")
    p_run.add_argument("--out", default="out", help="output directory (default: out)")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--ticks", type=int, default=None, help="override max_ticks")
    p_run.add_argument("--weight", type=float, default=None)
    p_run.add_argument("--no-noise", action="store_true")
    p_run.add_argument("--replan-after-waits", type=int, default=None)
    p_run.add_argument("--trace", action="store_true", help="write trace.csv")
    p_run.add_argument("--frames", type=int, default=0, metavar="N",
                       help="write frame_NNNNNN.png every N ticks")
    p_run.add_argument("--seeds", default=None, metavar="A..B",
                       help="sweep seeds A..B and merge the density maps")
    p_run.set_defaults(func=cmd_run)

    p_plan = sub.add_parser("plan", help="debug: plan one path and dump it as CSV")
    p_plan.add_argument("config")
    p_plan.add_argument("--start", required=True, metavar="X,Y")
    p_plan.add_argument("--goal", required=True, metavar="X,Y")
    p_plan.add_argument("--seed", type=int, default=None)
    p_plan.add_argument("--weight", type=float, default=None)
    p_plan.add_argument("--no-noise", action="store_true")
    p_plan.set_defaults(func=cmd_plan)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FloorplanError, InvalidEndpoint, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except InvariantViolation as exc:
        print(f"error: InvariantViolation: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
