"""Discrete-time multi-agent tick loop.

Agents are processed strictly in ascending id order against a live
occupancy map, so a move granted earlier in the tick blocks later agents
from the same destination. Blocked moves turn into waits and drop the
agent back to its collision-check state; two agents waiting on each
other therefore stall forever unless the optional replan-after-waits
mitigation is enabled. A single world-owned random stream consumed in a
fixed order (spawn draws first, then per-agent draws by id) makes every
run replayable from its seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace

from .behavior import (
    FAR_OF_KIND,
    Agent,
    BehaviorState,
    IntentKind,
    complete_move,
    decide,
    deny_move,
    sample_profile,
)
from .density import DensityAccumulator, convergence_check, l1_delta, record_tick, render_frame
from .planner import PlannerConfig, plan_path


class InvariantViolation(Exception):
    """A world invariant broke; this is a defect, not a runtime condition."""


@dataclass
class SimConfig:
    seed: int = 0
    max_ticks: int = 10000
    spawn_interval: int = 50
    spawn_threshold: int = 30
    spawn_batch_max: int = 10
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    replan_after_waits: int | None = None
    spawn_enabled: bool = True
    convergence_interval: int = 1000
    convergence_epsilon: float = 1e-3

    def __post_init__(self):
        if self.spawn_batch_max < 1:
            raise ValueError("spawn_batch_max must be >= 1")
        if self.spawn_threshold < 1:
            raise ValueError("spawn_threshold must be >= 1")


@dataclass
class TickReport:
    moves: int = 0
    waits: int = 0
    despawns: int = 0
    spawns: int = 0
    replans: int = 0


@dataclass
class RunReport:
    ticks_executed: int = 0
    agents_spawned: int = 0
    agents_despawned: int = 0
    agents_remaining: int = 0
    total_agent_ticks: int = 0
    mitigation_replans: int = 0
    convergence_tick: int | None = None
    seed: int = 0


class World:
    def __init__(self, fp, seed):
        self.floorplan = fp
        self.agents = {}  # id -> Agent, ascending insertion
        self.occupancy = {}  # cell -> agent id
        self.tick_count = 0
        self.rng = random.Random(seed)
        self._next_id = 0

    def add_agent(self, position, profile, state=BehaviorState.IN_FLOOR):
        if position in self.occupancy:
            raise InvariantViolation(f"cell {position} already occupied")
        if not self.floorplan.walkable[position]:
            raise InvariantViolation(f"cell {position} is not walkable")
        agent = Agent(id=self._next_id, position=position, profile=profile, state=state)
        self._next_id += 1
        self.agents[agent.id] = agent
        self.occupancy[position] = agent.id
        return agent

    def positions(self):
        return [a.position for a in self.agents.values()]


def spawn_agents(world, cfg, rng):
    """Add a uniform 1..batch_max batch on free spawn cells, gated by the threshold."""
    if len(world.agents) >= cfg.spawn_threshold:
        return 0
    k = rng.randint(1, cfg.spawn_batch_max)
    spawned = 0
    for cell in world.floorplan.spawn_cells:  # sorted: deterministic placement
        if spawned == k:
            break
        if cell in world.occupancy:
            continue
        world.add_agent(cell, sample_profile(rng))
        spawned += 1
    return spawned


def _check_invariants(world, cfg):
    fp = world.floorplan
    if len(world.occupancy) != len(world.agents):
        raise InvariantViolation("occupancy map out of sync with agent count")
    for agent in world.agents.values():
        owner = world.occupancy.get(agent.position)
        if owner != agent.id:
            raise InvariantViolation(
                f"agent {agent.id} at {agent.position} but occupancy says {owner}")
        if not fp.walkable[agent.position]:
            raise InvariantViolation(f"agent {agent.id} on non-walkable {agent.position}")
    bound = cfg.spawn_threshold - 1 + cfg.spawn_batch_max
    if len(world.agents) > bound:
        raise InvariantViolation(f"{len(world.agents)} agents exceeds the {bound} bound")


def tick(world, cfg, trace=None):
    """Advance the world one tick; returns per-tick counters."""
    report = TickReport()
    fp = world.floorplan

    if cfg.spawn_enabled and world.tick_count % cfg.spawn_interval == 0:
        report.spawns = spawn_agents(world, cfg, world.rng)

    despawned = []
    for agent in list(world.agents.values()):
        intent = decide(agent, fp, world.occupancy, world.rng, cfg.planner)

        if intent.kind is IntentKind.MOVE:
            dest = intent.dest
            dr = abs(dest[0] - agent.position[0]) + abs(dest[1] - agent.position[1])
            if dr != 1 or not fp.walkable[dest]:
                raise InvariantViolation(
                    f"agent {agent.id} proposed illegal move {agent.position}->{dest}")
            if dest in world.occupancy:
                deny_move(agent)
                agent.wait_ticks += 1
                report.waits += 1
                intent = replace(intent, kind=IntentKind.STAY, blocked=True)
            else:
                del world.occupancy[agent.position]
                world.occupancy[dest] = agent.id
                agent.position = dest
                agent.wait_ticks = 0
                report.moves += 1
                if complete_move(agent, fp):
                    despawned.append(agent)
                    intent = replace(intent, kind=IntentKind.DESPAWN)
        elif intent.kind is IntentKind.DESPAWN:
            despawned.append(agent)
        elif intent.blocked:
            agent.wait_ticks += 1
            report.waits += 1

        if trace is not None:
            r, c = agent.position
            trace.write(f"{world.tick_count},{agent.id},{agent.state.value},"
                        f"{c},{r},{intent.label()}\n")

    for agent in despawned:
        del world.occupancy[agent.position]
        del world.agents[agent.id]
        report.despawns += 1

    if cfg.replan_after_waits is not None:
        for agent in world.agents.values():
            if agent.wait_ticks <= cfg.replan_after_waits or agent.target is None:
                continue
            path = plan_path(fp, agent.position, agent.target.goal_cell,
                             cfg.planner, world.rng)
            if path is not None:
                agent.path = path
                agent.path_index = 0
                agent.state = FAR_OF_KIND[agent.target.kind]
                report.replans += 1
            agent.wait_ticks = 0

    world.tick_count += 1
    _check_invariants(world, cfg)
    return report


class DensitySink:
    """Accumulates occupancy after every tick and watches for convergence."""

    def __init__(self, shape, interval=1000, epsilon=1e-3):
        self.accumulator = DensityAccumulator(shape)
        self.interval = interval
        self.epsilon = epsilon
        self.deltas = []  # (tick, L1 delta between consecutive snapshots)
        self.convergence_tick = None

    def after_tick(self, world):
        record_tick(self.accumulator, world.positions())
        acc = self.accumulator
        if world.tick_count % self.interval == 0 and acc.total_agent_ticks > 0:
            acc.take_snapshot(world.tick_count)
            if len(acc.snapshots) == 2:
                (t0, prev), (t1, cur) = acc.snapshots
                delta = l1_delta(prev, cur)
                self.deltas.append((world.tick_count, delta))
                if self.convergence_tick is None and convergence_check(
                        acc, self.interval, self.epsilon):
                    self.convergence_tick = world.tick_count

    @property
    def converged(self):
        return self.convergence_tick is not None


class FrameSink:
    """Writes a rendered simulation frame every `interval` ticks."""

    def __init__(self, directory, interval=1):
        self.directory = directory
        self.interval = max(1, interval)

    def after_tick(self, world):
        if world.tick_count % self.interval == 0:
            path = f"{self.directory}/frame_{world.tick_count:06d}.png"
            render_frame(world.floorplan, world.positions(), path)


def run(fp, cfg, density=None, trace=None, frames=None):
    """Run ticks until max_ticks or density convergence; fully seed-deterministic."""
    world = World(fp, cfg.seed)
    report = RunReport(seed=cfg.seed)
    while world.tick_count < cfg.max_ticks:
        tr = tick(world, cfg, trace)
        report.ticks_executed += 1
        report.agents_spawned += tr.spawns
        report.agents_despawned += tr.despawns
        report.mitigation_replans += tr.replans
        report.total_agent_ticks += len(world.agents)
        if density is not None:
            density.after_tick(world)
        if frames is not None:
            frames.after_tick(world)
        if density is not None and density.converged:
            report.convergence_tick = density.convergence_tick
            break
    report.agents_remaining = len(world.agents)
    return report
