"""Weighted A* path search on the walkable grid, plus an exact BFS oracle.

The search key is f(n) = g(n) + w * max(0, h(n) + eps(n)) where g is the
unit-cost path length from the start, h the Manhattan distance to the
goal, and eps zero-mean Gaussian noise drawn once per node per search.
The clamp at zero keeps the key non-negative so exhaustive expansion (and
with it completeness) survives any noise draw. Ties in f are broken by
larger g, then by lower (row, col).
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass

from .floorplan import N4, Cell


class InvalidEndpoint(Exception):
    """Start or goal cell is outside the grid or not walkable."""


@dataclass
class PlannerConfig:
    weight: float = 10.0
    noise_variance: float = 1000.0
    noise_enabled: bool = True

    def __post_init__(self):
        if self.weight < 1:
            raise ValueError(f"weight must be >= 1, got {self.weight}")
        if self.noise_variance < 0:
            raise ValueError(f"noise_variance must be >= 0, got {self.noise_variance}")


@dataclass
class Path:
    """Ordered walkable cells from start to goal inclusive; 4-adjacent steps."""

    cells: list[Cell]

    @property
    def cost(self):
        return len(self.cells) - 1

    def __len__(self):
        return len(self.cells)


def manhattan(a, b):
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def _check_endpoint(fp, cell, label):
    if not fp.in_bounds(cell):
        raise InvalidEndpoint(f"{label} cell {cell} is out of bounds")
    if not fp.walkable[cell]:
        raise InvalidEndpoint(f"{label} cell {cell} is not walkable")


def bfs_oracle(fp, start, goal):
    """Exact shortest 4-connected path cost by breadth-first search.

    Returns None when the goal is unreachable. Kept free of any A*
    machinery so it can serve as an independent test oracle.
    """
    _check_endpoint(fp, start, "start")
    _check_endpoint(fp, goal, "goal")
    if start == goal:
        return 0
    h, w = fp.height, fp.width
    walk = fp.walkable
    dist = {start: 0}
    queue = deque([start])
    while queue:
        r, c = queue.popleft()
        d = dist[(r, c)]
        for dr, dc in N4:
            n = (r + dr, c + dc)
            if n in dist:
                continue
            nr, nc = n
            if 0 <= nr < h and 0 <= nc < w and walk[nr, nc]:
                if n == goal:
                    return d + 1
                dist[n] = d + 1
                queue.append(n)
    return None


def search(fp, start, goal, cfg, rng=None):
    """Run the weighted search; returns (cell list or None, expanded count)."""
    _check_endpoint(fp, start, "start")
    _check_endpoint(fp, goal, "goal")
    if cfg.noise_enabled and rng is None:
        raise ValueError("noise-enabled search needs a random stream")
    if start == goal:
        return [start], 0

    height, width = fp.height, fp.width
    walk = fp._walk_flat
    weight = cfg.weight
    sigma = math.sqrt(cfg.noise_variance)
    noisy = cfg.noise_enabled and sigma > 0
    gr, gc = goal

    noise = {}

    def hkey(r, c):
        h = abs(r - gr) + abs(c - gc)
        if noisy:
            idx = r * width + c
            eps = noise.get(idx)
            if eps is None:
                eps = rng.gauss(0.0, sigma)
                noise[idx] = eps
            h = h + eps
            if h < 0.0:
                h = 0.0
        return h

    g = {start: 0}
    parent = {}
    closed = set()
    open_heap = [(weight * hkey(*start), 0, start[0], start[1])]
    expanded = 0

    while open_heap:
        _, neg_g, r, c = heapq.heappop(open_heap)
        node = (r, c)
        if node in closed:
            continue
        if node == goal:
            cells = [node]
            while node != start:
                node = parent[node]
                cells.append(node)
            cells.reverse()
            return cells, expanded
        closed.add(node)
        expanded += 1
        ng = -neg_g + 1
        for dr, dc in N4:
            nr, nc = r + dr, c + dc
            if not (0 <= nr < height and 0 <= nc < width) or not walk[nr * width + nc]:
                continue
            n = (nr, nc)
            known = g.get(n)
            if known is not None and known <= ng:
                continue
            g[n] = ng
            parent[n] = node
            heapq.heappush(open_heap, (ng + weight * hkey(nr, nc), -ng, nr, nc))
    return None, expanded


def plan_path(fp, start, goal, cfg, rng=None):
    """Plan a walkable path from start to goal; None when unreachable."""
    cells, _ = search(fp, start, goal, cfg, rng)
    return None if cells is None else Path(cells)
