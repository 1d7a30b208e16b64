"""Occupancy accumulation, convergence detection and map export.

The density estimate is the per-cell visit frequency: every tick each
agent adds one count to its cell, and the map is counts divided by the
total number of agent-ticks. Convergence compares the normalized map
against a snapshot taken a fixed number of ticks earlier and fires when
the L1 distance (sum of absolute per-cell differences) drops below a
threshold.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .floorplan import OutOfBounds


class EmptyAccumulator(Exception):
    """Nothing recorded yet; the map is undefined."""


@dataclass
class DensityMap:
    probabilities: np.ndarray


class DensityAccumulator:
    def __init__(self, shape):
        self.counts = np.zeros(shape, dtype=np.int64)
        self.total_agent_ticks = 0
        self.snapshots = deque(maxlen=2)  # (tick, normalized map)

    def merge(self, other):
        """Pure count-wise sum of two accumulators (parallel seed sweeps)."""
        if other.counts.shape != self.counts.shape:
            raise ValueError("cannot merge accumulators of different shapes")
        merged = DensityAccumulator(self.counts.shape)
        merged.counts = self.counts + other.counts
        merged.total_agent_ticks = self.total_agent_ticks + other.total_agent_ticks
        return merged

    def take_snapshot(self, tick):
        self.snapshots.append((tick, normalize(self).probabilities))


def record_tick(acc, agent_positions):
    """Add one count per agent at its current cell."""
    h, w = acc.counts.shape
    for r, c in agent_positions:
        if not (0 <= r < h and 0 <= c < w):
            raise OutOfBounds(f"agent position {(r, c)} outside the {w}x{h} grid")
        acc.counts[r, c] += 1
        acc.total_agent_ticks += 1


def normalize(acc):
    if acc.total_agent_ticks == 0:
        raise EmptyAccumulator("no agent-ticks recorded")
    return DensityMap(acc.counts / acc.total_agent_ticks)


def convergence_check(acc, interval, epsilon):
    """True once two snapshots `interval` ticks apart differ by less than epsilon."""
    if len(acc.snapshots) < 2:
        return False
    (t0, prev), (t1, cur) = acc.snapshots
    if t1 - t0 != interval:
        raise ValueError(f"snapshots are {t1 - t0} ticks apart, expected {interval}")
    return l1_delta(prev, cur) < epsilon


def l1_delta(a, b):
    return float(np.abs(a - b).sum())


def export_density(dmap, png_path, csv_path):
    """Write the map as an 8-bit grayscale PNG and a full-precision CSV.

    PNG brightness is scaled by the maximum cell probability so sparse
    maps stay readable; an all-zero map renders black.
    """
    probs = dmap.probabilities
    peak = probs.max()
    if peak > 0:
        pixels = np.rint(255.0 * probs / peak).astype(np.uint8)
    else:
        pixels = np.zeros(probs.shape, dtype=np.uint8)
    Image.fromarray(pixels, mode="L").save(png_path)
    with open(csv_path, "w") as fh:
        for row in probs:
            fh.write(",".join(repr(v) for v in row.tolist()))
            fh.write("\n")


def read_density_csv(path):
    with open(path) as fh:
        rows = [[float(v) for v in line.strip().split(",")] for line in fh if line.strip()]
    return np.array(rows, dtype=np.float64)


STRUCTURE_COLOR = (0, 0, 0)
WINDOW_COLOR = (255, 0, 0)
EXHIBIT_COLOR = (0, 255, 0)
AGENT_COLOR = (0, 0, 255)
BACKGROUND_COLOR = (255, 255, 255)


def render_frame(fp, agent_positions, path):
    """Simulation snapshot: black structure, red windows, green exhibits, blue agents."""
    img = np.full((fp.height, fp.width, 3), 255, dtype=np.uint8)
    img[fp.window] = WINDOW_COLOR
    img[fp.exhibit] = EXHIBIT_COLOR
    img[fp.structure] = STRUCTURE_COLOR
    for r, c in agent_positions:
        img[r, c] = AGENT_COLOR
    Image.fromarray(img, mode="RGB").save(path)
