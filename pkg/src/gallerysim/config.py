"""Flat key-value run configuration.

One plain-text file names the six layer images (relative paths resolve
against the file's own directory), the spawn/exit cells and the
simulation parameters. Every simulation key can be overridden by the
same-named CLI flag. Cell coordinates in the file are x,y pairs with
x = column and the origin at the top-left.
"""

from __future__ import annotations

import os

from .engine import SimConfig
from .floorplan import LayerSet, LoadConfig
from .planner import PlannerConfig


class ConfigError(Exception):
    pass


LAYER_KEYS = ("window", "structure", "exhibit", "region", "boundary", "floorplan")
CELL_KEYS = ("spawn", "exit")
SIM_KEYS = (
    "seed",
    "max_ticks",
    "spawn_interval",
    "spawn_threshold",
    "spawn_batch_max",
    "weight",
    "noise_variance",
    "noise",
    "replan_after_waits",
    "convergence_interval",
    "convergence_epsilon",
)
KNOWN_KEYS = frozenset(LAYER_KEYS + CELL_KEYS + SIM_KEYS)


def parse_config_file(path):
    """Read `key = value` lines; '#' starts a comment, blank lines ignored."""
    values = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def parse_cells(spec):
    """Cells from 'x0,y0,x1,y1' (inclusive rectangle) or 'x,y;x,y;...'."""
    spec = spec.strip()
    if ";" in spec:
        cells = []
        for pair in spec.split(";"):
            parts = [p.strip() for p in pair.split(",")]
            if len(parts) != 2:
                raise ConfigError(f"bad cell {pair!r} in list {spec!r}")
            x, y = (int(p) for p in parts)
            cells.append((y, x))
        return cells
    parts = [p.strip() for p in spec.split(",")]
    if len(parts) == 2:
        x, y = (int(p) for p in parts)
        return [(y, x)]
    if len(parts) != 4:
        raise ConfigError(f"expected x0,y0,x1,y1 or x,y pairs, got {spec!r}")
    x0, y0, x1, y1 = (int(p) for p in parts)
    if x1 < x0 or y1 < y0:
        raise ConfigError(f"degenerate rectangle {spec!r}")
    return [(y, x) for y in range(y0, y1 + 1) for x in range(x0, x1 + 1)]


def _parse_bool(key, value):
    lowered = value.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def build_plan_inputs(values, base_dir):
    """LayerSet + LoadConfig from parsed config values."""
    missing = [k for k in LAYER_KEYS + CELL_KEYS if k not in values]
    if missing:
        raise ConfigError(f"config is missing required keys: {', '.join(missing)}")
    paths = {k: os.path.join(base_dir, values[k]) for k in LAYER_KEYS}
    layers = LayerSet(**paths)
    load = LoadConfig(spawn_cells=parse_cells(values["spawn"]),
                      exit_cells=parse_cells(values["exit"]))
    return layers, load


def build_sim_config(values, overrides=None):
    """SimConfig from config values, with CLI overrides taking precedence."""
    merged = {k: v for k, v in values.items() if k in SIM_KEYS}
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value

    def take(key, parse, default):
        if key not in merged:
            return default
        raw = merged[key]
        try:
            return raw if not isinstance(raw, str) else parse(raw)
        except ValueError:
            raise ConfigError(f"{key}: cannot parse {raw!r}") from None

    replan = take("replan_after_waits", int, None)
    try:
        planner = PlannerConfig(
            weight=take("weight", float, 10.0),
            noise_variance=take("noise_variance", float, 1000.0),
            noise_enabled=take("noise", lambda v: _parse_bool("noise", v), True),
        )
        return SimConfig(
            seed=take("seed", int, 0),
            max_ticks=take("max_ticks", int, 10000),
            spawn_interval=take("spawn_interval", int, 50),
            spawn_threshold=take("spawn_threshold", int, 30),
            spawn_batch_max=take("spawn_batch_max", int, 10),
            planner=planner,
            replan_after_waits=replan,
            convergence_interval=take("convergence_interval", int, 1000),
            convergence_epsilon=take("convergence_epsilon", float, 1e-3),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_run_setup(config_path, overrides=None):
    """Parse a config file into (LayerSet, LoadConfig, SimConfig)."""
    values = parse_config_file(config_path)
    base_dir = os.path.dirname(os.path.abspath(config_path))
    layers, load = build_plan_inputs(values, base_dir)
    sim = build_sim_config(values, overrides)
    return layers, load, sim
