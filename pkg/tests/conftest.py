import random

import numpy as np
import pytest
from PIL import Image

from gallerysim.data import synthetic_plan_config
from gallerysim.floorplan import Floorplan, LayerSet, load_layers


class StubRandom:
    """Deterministic stand-in: random() replays a queue, gauss() is silent."""

    def __init__(self, *values, randint_value=None):
        self.values = list(values) or [0.0]
        self.index = 0
        self.randint_value = randint_value

    def random(self):
        value = self.values[self.index % len(self.values)]
        self.index += 1
        return value

    def gauss(self, mu, sigma):
        return 0.0

    def randint(self, a, b):
        return a if self.randint_value is None else self.randint_value


def grid_plan(structure, spawn=None, exits=None, **kwargs):
    """Floorplan from a boolean obstacle mask, defaulting spawn/exit to one free cell."""
    structure = np.asarray(structure, dtype=bool)
    if spawn is None:
        free = np.argwhere(~structure)
        spawn = [tuple(free[0])]
    if exits is None:
        exits = spawn
    return Floorplan.from_arrays(structure=structure, spawn_cells=spawn,
                                 exit_cells=exits, **kwargs)


def random_grid_corpus(count, size=20, obstacle_rate=0.2, seed=20250810):
    """Seeded random obstacle grids with random walkable endpoints."""
    rng = random.Random(seed)
    corpus = []
    for _ in range(count):
        structure = np.array(
            [[rng.random() < obstacle_rate for _ in range(size)] for _ in range(size)],
            dtype=bool)
        free = [tuple(cell) for cell in np.argwhere(~structure)]
        if len(free) < 2:
            continue
        start = free[rng.randrange(len(free))]
        goal = free[rng.randrange(len(free))]
        corpus.append((grid_plan(structure, spawn=[start]), start, goal))
    return corpus


def museum_16():
    """Tiny fixture: one gallery region with a 2x2 exhibit, one opening, one exit."""
    shape = (16, 16)
    structure = np.zeros(shape, dtype=bool)
    structure[0, :] = structure[-1, :] = True
    structure[:, 0] = structure[:, -1] = True
    exhibit = np.zeros(shape, dtype=bool)
    exhibit[3:5, 3:5] = True
    region = np.full(shape, -1)
    region[2:7, 2:9] = 0
    boundary = np.full(shape, -1)
    boundary[7, 4:7] = 0
    return Floorplan.from_arrays(structure=structure, exhibit=exhibit,
                                 region_id=region, boundary_id=boundary,
                                 spawn_cells=[(14, 1), (14, 2)],
                                 exit_cells=[(14, 14)])


def write_binary_layer(path, mask):
    mask = np.asarray(mask, dtype=bool)
    img = np.where(mask[:, :, None], 0, 255).astype(np.uint8)
    Image.fromarray(np.repeat(img, 3, axis=2), mode="RGB").save(path)


def write_color_layer(path, rgb):
    Image.fromarray(np.asarray(rgb, dtype=np.uint8), mode="RGB").save(path)


def write_layer_set(directory, shape, structure=None, window=None, exhibit=None,
                    region=None, boundary=None):
    """Write six layer PNGs into `directory`; missing layers come out empty."""
    blank_mask = np.zeros(shape, dtype=bool)
    blank_rgb = np.full(shape + (3,), 255, dtype=np.uint8)
    write_binary_layer(directory / "structure.png", blank_mask if structure is None else structure)
    write_binary_layer(directory / "window.png", blank_mask if window is None else window)
    write_binary_layer(directory / "exhibit.png", blank_mask if exhibit is None else exhibit)
    write_color_layer(directory / "region.png", blank_rgb if region is None else region)
    write_color_layer(directory / "boundary.png", blank_rgb if boundary is None else boundary)
    write_color_layer(directory / "floorplan.png", blank_rgb)
    return LayerSet(window=str(directory / "window.png"),
                    structure=str(directory / "structure.png"),
                    exhibit=str(directory / "exhibit.png"),
                    region=str(directory / "region.png"),
                    boundary=str(directory / "boundary.png"),
                    floorplan=str(directory / "floorplan.png"))


def corridor_world(length=64, bay=None):
    """Width-1 corridor with exits at both ends; optional passing bay row."""
    from gallerysim.engine import World

    height = 4 if bay else 3
    structure = np.ones((height, length), dtype=bool)
    main = height - 2
    structure[main, 1:length - 1] = False
    if bay:
        structure[1, bay[0]:bay[1] + 1] = False
    fp = grid_plan(structure, spawn=[(main, 1)],
                   exits=[(main, 1), (main, length - 2)])
    return World(fp, seed=123), fp, main


def head_on_agents(world, fp, row, left_start, right_start, thr=10):
    """Two exit-bound agents facing each other on the corridor's main row."""
    from gallerysim.behavior import AgentProfile, BehaviorState, Target, TargetKind
    from gallerysim.planner import PlannerConfig, plan_path

    exact = PlannerConfig(weight=1.0, noise_variance=0.0, noise_enabled=False)
    prof = AgentProfile(p1=0.7, p2=0.7, lam=1 / 1000, near_threshold=thr)
    agents = []
    for start, goal_col in ((left_start, fp.width - 2), (right_start, 1)):
        agent = world.add_agent((row, start), prof, state=BehaviorState.SEEK_EXIT_FAR)
        goal = (row, goal_col)
        agent.set_course(Target(TargetKind.EXIT, None, goal),
                         plan_path(fp, agent.position, goal, exact))
        agents.append(agent)
    return agents


@pytest.fixture(scope="session")
def bundled_plan_path():
    return synthetic_plan_config()


@pytest.fixture(scope="session")
def bundled_plan():
    from gallerysim.config import load_run_setup

    layers, load, _ = load_run_setup(synthetic_plan_config())
    return load_layers(layers, load)
