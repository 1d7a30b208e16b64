"""Per-agent decision model: mental states, range detection, dwell decay.

Each simulation tick an agent makes exactly one decision. Seeking is a
two-beat cycle: the *far* state runs the one-step collision check, the
*safe* state takes the actual step, so an unobstructed agent advances one
cell every second tick. Arrival at a target is range-based: the agent is
"near" once the Euclidean distance to the target's cells drops below its
personal threshold, at which point a boundary turns into gallery
membership, an exhibit into viewing, and an exit into despawning.

While viewing, the agent keeps looking with probability exp(-lambda * t)
where t counts consecutive viewing ticks, so long stays become ever less
likely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .floorplan import Cell
from .planner import Path, plan_path

P1_RANGE = (0.5, 1.0)
P2_RANGE = (0.5, 1.0)
LAMBDA_RANGE = (1.0 / 7000.0, 1.0 / 500.0)
NEAR_THRESHOLD_RANGE = (10, 20)


class EmptyTarget(Exception):
    pass


class BehaviorState(Enum):
    IN_FLOOR = "in_floor"
    LEAVING = "leaving"
    SEEK_BOUNDARY_FAR = "seek_boundary_far"
    SEEK_BOUNDARY_SAFE = "seek_boundary_safe"
    IN_GALLERY = "in_gallery"
    SEEK_EXHIBIT_FAR = "seek_exhibit_far"
    SEEK_EXHIBIT_SAFE = "seek_exhibit_safe"
    VIEWING = "viewing"
    SEEK_EXIT_FAR = "seek_exit_far"
    SEEK_EXIT_SAFE = "seek_exit_safe"


class TargetKind(Enum):
    BOUNDARY = "boundary"
    EXHIBIT = "exhibit"
    EXIT = "exit"


S = BehaviorState

FAR_OF_SAFE = {
    S.SEEK_BOUNDARY_SAFE: S.SEEK_BOUNDARY_FAR,
    S.SEEK_EXHIBIT_SAFE: S.SEEK_EXHIBIT_FAR,
    S.SEEK_EXIT_SAFE: S.SEEK_EXIT_FAR,
}
SAFE_OF_FAR = {far: safe for safe, far in FAR_OF_SAFE.items()}
FAR_OF_KIND = {
    TargetKind.BOUNDARY: S.SEEK_BOUNDARY_FAR,
    TargetKind.EXHIBIT: S.SEEK_EXHIBIT_FAR,
    TargetKind.EXIT: S.SEEK_EXIT_FAR,
}
FAR_STATES = frozenset(SAFE_OF_FAR)
SAFE_STATES = frozenset(FAR_OF_SAFE)


@dataclass
class AgentProfile:
    """Characteristic parameters drawn once per agent."""

    p1: float
    p2: float
    lam: float
    near_threshold: int

    def __post_init__(self):
        for name, value, (lo, hi) in (
            ("p1", self.p1, P1_RANGE),
            ("p2", self.p2, P2_RANGE),
            ("lambda", self.lam, LAMBDA_RANGE),
            ("near_threshold", self.near_threshold, NEAR_THRESHOLD_RANGE),
        ):
            if not lo <= value <= hi:
                raise ValueError(f"{name}={value} outside [{lo}, {hi}]")


@dataclass
class Target:
    kind: TargetKind
    id: int | None
    goal_cell: Cell


class IntentKind(Enum):
    MOVE = "move"
    STAY = "stay"
    DESPAWN = "despawn"
    REPLAN = "replan"


@dataclass(frozen=True)
class Intent:
    kind: IntentKind
    dest: Cell | None = None
    replan_kind: TargetKind | None = None
    blocked: bool = False  # Stay forced by another agent

    def label(self):
        if self.kind is IntentKind.REPLAN:
            return f"replan-{self.replan_kind.value}"
        return self.kind.value


_STAY = Intent(IntentKind.STAY)
_BLOCKED = Intent(IntentKind.STAY, blocked=True)
_DESPAWN = Intent(IntentKind.DESPAWN)


@dataclass
class Agent:
    id: int
    position: Cell
    profile: AgentProfile
    state: BehaviorState = S.IN_FLOOR
    target: Target | None = None
    path: Path | None = None
    path_index: int = 0
    visited_boundaries: set[int] = field(default_factory=set)
    visited_exhibits: set[int] = field(default_factory=set)
    gallery_id: int | None = None  # region of the boundary reached last
    dwell_ticks: int = 0
    wait_ticks: int = 0

    def next_path_cell(self):
        if self.path is not None and self.path_index + 1 < len(self.path.cells):
            return self.path.cells[self.path_index + 1]
        return None

    def set_course(self, target, path):
        self.target = target
        self.path = path
        self.path_index = 0

    def clear_course(self):
        self.target = None
        self.path = None
        self.path_index = 0


def sample_profile(rng):
    """Draw characteristic parameters uniformly from their allowed ranges."""
    p1 = P1_RANGE[0] + rng.random() * (P1_RANGE[1] - P1_RANGE[0])
    p2 = P2_RANGE[0] + rng.random() * (P2_RANGE[1] - P2_RANGE[0])
    lam = LAMBDA_RANGE[0] + rng.random() * (LAMBDA_RANGE[1] - LAMBDA_RANGE[0])
    lo, hi = NEAR_THRESHOLD_RANGE
    near = lo + int(rng.random() * (hi - lo + 1))
    return AgentProfile(p1=p1, p2=p2, lam=lam, near_threshold=min(near, hi))


def range_classify(pos, target_cells, threshold):
    """True when the nearest target cell lies within the Euclidean threshold."""
    if not target_cells:
        raise EmptyTarget("range check against an empty cell set")
    r, c = pos
    t2 = threshold * threshold
    for tr, tc in target_cells:
        if (tr - r) ** 2 + (tc - c) ** 2 <= t2:
            return True
    return False


def dwell_continue(t, lam, rng):
    """Stay viewing with probability exp(-lam * t)."""
    return rng.random() < math.exp(-lam * t)


def _dist2(a, b):
    return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2


def select_target(agent, fp, kind):
    """Pick the nearest unvisited target of the given kind, or None.

    Distances are Euclidean from the agent; ties fall to the lower id.
    Exhibit candidates are confined to the agent's current gallery.
    """
    pos = agent.position
    if kind is TargetKind.BOUNDARY:
        best = None
        for b in fp.boundaries:
            if b.id in agent.visited_boundaries:
                continue
            key = (_dist2(pos, b.anchor), b.id)
            if best is None or key < best[0]:
                best = (key, b)
        if best is None:
            return None
        return Target(TargetKind.BOUNDARY, best[1].id, best[1].goal_cell)

    if kind is TargetKind.EXHIBIT:
        region = agent.gallery_id
        if region is None:
            region = fp.region_at(pos)
        if region is None:
            return None
        best = None
        for ex_id in fp.regions[region].exhibit_ids:
            if ex_id in agent.visited_exhibits:
                continue
            ex = fp.exhibits[ex_id]
            d2 = min(_dist2(pos, cell) for cell in ex.cells)
            key = (d2, ex.id)
            if best is None or key < best[0]:
                best = (key, ex)
        if best is None:
            return None
        ex = best[1]
        goal = min(ex.viewing_cells, key=lambda cell: (_dist2(pos, cell), cell))
        return Target(TargetKind.EXHIBIT, ex.id, goal)

    if kind is TargetKind.EXIT:
        return Target(TargetKind.EXIT, None, fp.nearest_exit(pos))

    raise ValueError(f"unknown target kind: {kind!r}")


def _near_target(agent, fp):
    target = agent.target
    thr = agent.profile.near_threshold
    if target.kind is TargetKind.EXIT:
        return fp.exit_within(agent.position, thr)
    if target.kind is TargetKind.BOUNDARY:
        cells = fp.boundaries[target.id].cells
    else:
        cells = fp.exhibits[target.id].cells
    return range_classify(agent.position, cells, thr)


def _arrive(agent, fp):
    """Apply the near-target outcome; returns the intent for this tick."""
    target = agent.target
    if target.kind is TargetKind.BOUNDARY:
        agent.visited_boundaries.add(target.id)
        agent.gallery_id = fp.boundaries[target.id].region_id
        agent.clear_course()
        agent.state = S.IN_GALLERY
        return _STAY
    if target.kind is TargetKind.EXHIBIT:
        agent.visited_exhibits.add(target.id)
        agent.clear_course()
        agent.dwell_ticks = 0
        agent.state = S.VIEWING
        return _STAY
    return _DESPAWN


def _course_to(agent, fp, kind, planner_cfg, rng):
    """select_target + plan; returns the new course's intent or None."""
    target = select_target(agent, fp, kind)
    if target is None:
        return None
    path = plan_path(fp, agent.position, target.goal_cell, planner_cfg, rng)
    if path is None:
        # unreachable: mark visited so the agent cannot loop on it,
        # then fall through to the not-found branch
        if kind is TargetKind.BOUNDARY:
            agent.visited_boundaries.add(target.id)
        elif kind is TargetKind.EXHIBIT:
            agent.visited_exhibits.add(target.id)
        return None
    agent.set_course(target, path)
    agent.state = FAR_OF_KIND[kind]
    return Intent(IntentKind.REPLAN, replan_kind=kind)


def decide(agent, fp, occupancy, rng, planner_cfg):
    """One decision step; mutates the agent and returns its intent.

    For safe-state moves the returned MOVE intent is a proposal: the
    engine grants or denies it against the occupancy map and then calls
    complete_move or deny_move to finish the transition.
    """
    state = agent.state

    if state is S.IN_FLOOR:
        if rng.random() < agent.profile.p1:
            intent = _course_to(agent, fp, TargetKind.BOUNDARY, planner_cfg, rng)
            if intent is None:
                agent.state = S.LEAVING
                return _STAY
            return intent
        intent = _course_to(agent, fp, TargetKind.EXIT, planner_cfg, rng)
        return _STAY if intent is None else intent

    if state is S.LEAVING:
        intent = _course_to(agent, fp, TargetKind.EXIT, planner_cfg, rng)
        return _STAY if intent is None else intent

    if state is S.IN_GALLERY:
        intent = _course_to(agent, fp, TargetKind.EXHIBIT, planner_cfg, rng)
        if intent is None:
            agent.clear_course()
            agent.state = S.IN_FLOOR
            return _STAY
        return intent

    if state is S.VIEWING:
        if dwell_continue(agent.dwell_ticks, agent.profile.lam, rng):
            agent.dwell_ticks += 1
        else:
            agent.dwell_ticks = 0
            agent.clear_course()
            agent.state = S.IN_GALLERY if rng.random() < agent.profile.p2 else S.IN_FLOOR
        return _STAY

    if state in FAR_STATES:
        nxt = agent.next_path_cell()
        if nxt is None:
            # already standing on the goal cell: range is trivially near
            return _arrive(agent, fp)
        if nxt in occupancy:
            return _BLOCKED
        agent.state = SAFE_OF_FAR[state]
        return _STAY

    if state in SAFE_STATES:
        nxt = agent.next_path_cell()
        if nxt is None:
            return _arrive(agent, fp)
        return Intent(IntentKind.MOVE, dest=nxt)

    raise AssertionError(f"unhandled state {state}")


def complete_move(agent, fp):
    """Finish a granted move: advance the path and run range detection.

    Returns True when the agent arrived near its exit and must despawn.
    """
    agent.path_index += 1
    if _near_target(agent, fp):
        return _arrive(agent, fp).kind is IntentKind.DESPAWN
    agent.state = FAR_OF_SAFE[agent.state]
    return False


def deny_move(agent):
    """A same-tick reservation beat the agent: fall back to the far state."""
    agent.state = FAR_OF_SAFE[agent.state]
