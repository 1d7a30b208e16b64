"""Grid world parsed from color-coded floorplan layer images.

Six raster layers describe one floor: three visible element layers
(window, structure, exhibit), two id layers (region, boundary) and a
composite render layer. Visible layers are binary (a pixel belongs to
the element iff its luminance is below 128 against a white background);
id layers map each distinct non-white color to one component.

Cells are (row, col) tuples with the origin at the top-left corner.
Movement and component connectivity are 4-connected throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from PIL import Image

Cell = tuple[int, int]

N4 = ((-1, 0), (1, 0), (0, -1), (0, 1))

LUMA_THRESHOLD = 128


class FloorplanError(Exception):
    """Base class for floorplan load/validation failures."""


class DimensionMismatch(FloorplanError):
    pass


class UnreachableRegion(FloorplanError):
    pass


class OrphanBoundary(FloorplanError):
    pass


class BlockedExhibit(FloorplanError):
    pass


class BadSpawn(FloorplanError):
    pass


class DisconnectedComponent(FloorplanError):
    pass


class OutOfBounds(FloorplanError):
    pass


@dataclass
class LayerSet:
    """File paths of the six layer images."""

    window: str
    structure: str
    exhibit: str
    region: str
    boundary: str
    floorplan: str

    def paths(self):
        return [
            ("window", self.window),
            ("structure", self.structure),
            ("exhibit", self.exhibit),
            ("region", self.region),
            ("boundary", self.boundary),
            ("floorplan", self.floorplan),
        ]


@dataclass
class LoadConfig:
    """Spawn/exit cells; the layers never mark them, so they come from config."""

    spawn_cells: list[Cell]
    exit_cells: list[Cell]


@dataclass
class Region:
    id: int
    cells: list[Cell]
    boundary_ids: list[int] = field(default_factory=list)
    exhibit_ids: list[int] = field(default_factory=list)


@dataclass
class Boundary:
    id: int
    cells: list[Cell]
    region_id: int
    anchor: Cell
    goal_cell: Cell  # nearest walkable cell to the anchor


@dataclass
class ExhibitSite:
    id: int
    cells: list[Cell]
    region_id: int | None
    viewing_cells: list[Cell]


def _luma(rgb):
    # PIL "L" convention: (299 R + 587 G + 114 B) / 1000
    r = rgb[:, :, 0].astype(np.int32)
    g = rgb[:, :, 1].astype(np.int32)
    b = rgb[:, :, 2].astype(np.int32)
    return (299 * r + 587 * g + 114 * b) // 1000


def _binary_mask(rgb):
    return _luma(rgb) < LUMA_THRESHOLD


def _connected_components(mask):
    """4-connected components of a boolean mask, ordered by lowest (row, col) member."""
    h, w = mask.shape
    seen = np.zeros_like(mask, dtype=bool)
    comps = []
    for r in range(h):
        row = mask[r]
        for c in range(w):
            if not row[c] or seen[r, c]:
                continue
            stack = [(r, c)]
            seen[r, c] = True
            cells = []
            while stack:
                cr, cc = stack.pop()
                cells.append((cr, cc))
                for dr, dc in N4:
                    nr, nc = cr + dr, cc + dc
                    if 0 <= nr < h and 0 <= nc < w and mask[nr, nc] and not seen[nr, nc]:
                        seen[nr, nc] = True
                        stack.append((nr, nc))
            cells.sort()
            comps.append(cells)
    return comps


def extract_components(raster, mode):
    """Split a layer raster into cell sets.

    mode="by_color": one component per distinct non-white color.
    mode="by_connectivity": 4-connected components of the element pixels
    (luminance < 128). Components are ordered by their lowest (row, col)
    member; an empty layer yields an empty list.
    """
    if mode == "by_connectivity":
        return _connected_components(_binary_mask(raster))
    if mode != "by_color":
        raise ValueError(f"unknown extraction mode: {mode!r}")
    packed = (
        raster[:, :, 0].astype(np.int32) << 16
        | raster[:, :, 1].astype(np.int32) << 8
        | raster[:, :, 2].astype(np.int32)
    )
    white = (255 << 16) | (255 << 8) | 255
    comps = {}
    rs, cs = np.nonzero(packed != white)
    for r, c in zip(rs.tolist(), cs.tolist()):
        comps.setdefault(packed[r, c], []).append((r, c))
    out = [sorted(cells) for cells in comps.values()]
    out.sort(key=lambda cells: cells[0])
    return out


def _is_connected(cells):
    cellset = set(cells)
    stack = [cells[0]]
    seen = {cells[0]}
    while stack:
        r, c = stack.pop()
        for dr, dc in N4:
            n = (r + dr, c + dc)
            if n in cellset and n not in seen:
                seen.add(n)
                stack.append(n)
    return len(seen) == len(cellset)


class Floorplan:
    """Immutable grid world; safe to share read-only once constructed."""

    def __init__(self, structure, window, exhibit, region_id, boundary_id,
                 spawn_cells, exit_cells):
        self.structure = structure
        self.window = window
        self.exhibit = exhibit
        self.region_id = region_id
        self.boundary_id = boundary_id
        self.height, self.width = structure.shape
        self.walkable = ~(structure | window | exhibit)
        self.spawn_cells = sorted(set(spawn_cells))
        self.exit_cells = sorted(set(exit_cells))

        self._check_endpoint_cells(self.spawn_cells, "spawn")
        self._check_endpoint_cells(self.exit_cells, "exit")

        self.regions = self._build_regions()
        self.boundaries = self._build_boundaries()
        self.exhibits = self._build_exhibits()
        for b in self.boundaries:
            self.regions[b.region_id].boundary_ids.append(b.id)
        for region in self.regions:
            if not region.boundary_ids:
                raise UnreachableRegion(f"region {region.id} has no boundary opening")
        for ex in self.exhibits:
            if ex.region_id is not None:
                self.regions[ex.region_id].exhibit_ids.append(ex.id)

        # flattened walkability for the planner hot loop
        self._walk_flat = self.walkable.reshape(-1).tobytes()
        self._exit_dist2, self._exit_goal = self._exit_fields()

    # -- construction -------------------------------------------------

    @classmethod
    def from_arrays(cls, structure=None, window=None, exhibit=None,
                    region_id=None, boundary_id=None, *, shape=None,
                    spawn_cells=(), exit_cells=()):
        """Build a floorplan from per-cell arrays, filling absent layers with defaults."""
        for a in (structure, window, exhibit, region_id, boundary_id):
            if a is not None:
                shape = a.shape
                break
        if shape is None:
            raise ValueError("need at least one layer array or an explicit shape")

        def bools(a):
            return np.zeros(shape, dtype=bool) if a is None else a.astype(bool)

        def ids(a):
            return np.full(shape, -1, dtype=np.int32) if a is None else a.astype(np.int32)

        return cls(bools(structure), bools(window), bools(exhibit),
                   ids(region_id), ids(boundary_id),
                   list(spawn_cells), list(exit_cells))

    def _check_endpoint_cells(self, cells, kind):
        if not cells:
            raise BadSpawn(f"no {kind} cells configured")
        for cell in cells:
            if not self.in_bounds(cell):
                raise BadSpawn(f"{kind} cell {cell} outside the {self.width}x{self.height} grid")
            if not self.walkable[cell]:
                raise BadSpawn(f"{kind} cell {cell} is not walkable")

    def _component_list(self, id_array, what):
        groups = {}
        rs, cs = np.nonzero(id_array >= 0)
        for r, c in zip(rs.tolist(), cs.tolist()):
            groups.setdefault(int(id_array[r, c]), []).append((r, c))
        comps = [sorted(cells) for cells in groups.values()]
        comps.sort(key=lambda cells: cells[0])
        for i, cells in enumerate(comps):
            if not _is_connected(cells):
                raise DisconnectedComponent(f"{what} component {i} is not 4-connected")
        return comps

    def _build_regions(self):
        comps = self._component_list(self.region_id, "region")
        # renumber ids to match the deterministic component order
        self.region_id = np.full(self.region_id.shape, -1, dtype=np.int32)
        regions = []
        for i, cells in enumerate(comps):
            for cell in cells:
                self.region_id[cell] = i
            regions.append(Region(id=i, cells=cells))
        return regions

    def _build_boundaries(self):
        comps = self._component_list(self.boundary_id, "boundary")
        self.boundary_id = np.full(self.boundary_id.shape, -1, dtype=np.int32)
        boundaries = []
        for i, cells in enumerate(comps):
            for cell in cells:
                self.boundary_id[cell] = i
            votes = {}
            for r, c in cells:
                for dr, dc in N4:
                    n = (r + dr, c + dc)
                    if self.in_bounds(n):
                        rid = int(self.region_id[n])
                        if rid >= 0:
                            votes[rid] = votes.get(rid, 0) + 1
            if not votes:
                raise OrphanBoundary(f"boundary {i} touches no region")
            region = min(votes, key=lambda rid: (-votes[rid], rid))
            anchor = self._anchor_cell(cells, self.regions[region].cells)
            goal = self.nearest_walkable(anchor)
            boundaries.append(Boundary(id=i, cells=cells, region_id=region,
                                       anchor=anchor, goal_cell=goal))
        return boundaries

    @staticmethod
    def _anchor_cell(cells, region_cells):
        cr = sum(r for r, _ in region_cells) / len(region_cells)
        cc = sum(c for _, c in region_cells) / len(region_cells)
        return min(cells, key=lambda cell: ((cell[0] - cr) ** 2 + (cell[1] - cc) ** 2,
                                            cell[0], cell[1]))

    def _build_exhibits(self):
        comps = _connected_components(self.exhibit)
        exhibits = []
        for i, cells in enumerate(comps):
            viewing = set()
            votes = {}
            for r, c in cells:
                rid = int(self.region_id[r, c])
                if rid >= 0:
                    votes[rid] = votes.get(rid, 0) + 1
                for dr, dc in N4:
                    n = (r + dr, c + dc)
                    if self.in_bounds(n) and self.walkable[n]:
                        viewing.add(n)
            if not viewing:
                raise BlockedExhibit(f"exhibit {i} has no adjacent walkable viewing cell")
            region = min(votes, key=lambda rid: (-votes[rid], rid)) if votes else None
            exhibits.append(ExhibitSite(id=i, cells=cells, region_id=region,
                                        viewing_cells=sorted(viewing)))
        return exhibits

    def _exit_fields(self):
        """Exact squared Euclidean distance to the nearest exit cell, plus its index."""
        rows = np.arange(self.height, dtype=np.int64)[None, :, None]
        cols = np.arange(self.width, dtype=np.int64)[None, None, :]
        exits = np.array(self.exit_cells, dtype=np.int64)
        dist2 = np.full((self.height, self.width), np.iinfo(np.int64).max, dtype=np.int64)
        goal = np.zeros((self.height, self.width), dtype=np.int32)
        chunk = 32
        for lo in range(0, len(exits), chunk):
            er = exits[lo:lo + chunk, 0][:, None, None]
            ec = exits[lo:lo + chunk, 1][:, None, None]
            d2 = (rows - er) ** 2 + (cols - ec) ** 2
            d2_min = d2.min(axis=0)
            d2_arg = d2.argmin(axis=0).astype(np.int32) + lo  # first index wins ties
            better = d2_min < dist2  # strict: earlier (sorted) exit cells win ties
            dist2[better] = d2_min[better]
            goal[better] = d2_arg[better]
        return dist2, goal

    # -- queries ------------------------------------------------------

    def in_bounds(self, cell):
        r, c = cell
        return 0 <= r < self.height and 0 <= c < self.width

    def is_walkable(self, cell):
        """True iff the cell carries no structure, window or exhibit flag."""
        if not self.in_bounds(cell):
            raise OutOfBounds(f"cell {cell} outside the {self.width}x{self.height} grid")
        return bool(self.walkable[cell])

    def region_at(self, cell):
        rid = int(self.region_id[cell])
        return rid if rid >= 0 else None

    def nearest_exit(self, cell):
        return self.exit_cells[int(self._exit_goal[cell])]

    def exit_within(self, cell, threshold):
        return int(self._exit_dist2[cell]) <= threshold * threshold

    def nearest_walkable(self, cell):
        """Nearest walkable cell by Euclidean distance (ties: lowest row, then col)."""
        if self.walkable[cell]:
            return cell
        r0, c0 = cell
        best = None
        best_d2 = None
        radius = 1
        limit = max(self.height, self.width)
        while radius <= limit:
            for r in range(max(0, r0 - radius), min(self.height, r0 + radius + 1)):
                for c in range(max(0, c0 - radius), min(self.width, c0 + radius + 1)):
                    if max(abs(r - r0), abs(c - c0)) != radius or not self.walkable[r, c]:
                        continue
                    d2 = (r - r0) ** 2 + (c - c0) ** 2
                    key = (d2, r, c)
                    if best is None or key < best:
                        best = key
                        best_d2 = d2
            # cells in ring radius+1 have d2 >= (radius+1)^2, so only an
            # equal-distance tie could still improve the (d2, row, col) key
            if best is not None and best_d2 < (radius + 1) ** 2:
                break
            radius += 1
        if best is None:
            raise FloorplanError(f"no walkable cell anywhere near {cell}")
        return (best[1], best[2])


def _read_rgb(name, path):
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"))
    except FileNotFoundError:
        raise FloorplanError(f"{name} layer not found: {path}") from None
    except Exception as exc:
        raise FloorplanError(f"{name} layer failed to decode: {path} ({exc})") from None


def load_layers(layers, config):
    """Parse the six layer images into a validated :class:`Floorplan`."""
    rasters = {name: _read_rgb(name, path) for name, path in layers.paths()}
    shapes = {raster.shape[:2] for raster in rasters.values()}
    if len(shapes) != 1:
        detail = ", ".join(f"{name}={r.shape[1]}x{r.shape[0]}" for name, r in rasters.items())
        raise DimensionMismatch(f"layer sizes differ: {detail}")
    shape = shapes.pop()

    structure = _binary_mask(rasters["structure"])
    window = _binary_mask(rasters["window"])
    exhibit = _binary_mask(rasters["exhibit"])

    region_id = np.full(shape, -1, dtype=np.int32)
    for i, cells in enumerate(extract_components(rasters["region"], "by_color")):
        for cell in cells:
            region_id[cell] = i
    boundary_id = np.full(shape, -1, dtype=np.int32)
    for i, cells in enumerate(extract_components(rasters["boundary"], "by_color")):
        for cell in cells:
            boundary_id[cell] = i

    return Floorplan(structure, window, exhibit, region_id, boundary_id,
                     config.spawn_cells, config.exit_cells)
