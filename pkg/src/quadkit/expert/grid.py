"""Occupancy grid used by the path planners.

The grid rasterizes the scene's blocking geometry (obstacles, letter boxes,
tunnel walls) at a fixed resolution and then inflates it by the robot's
footprint radius plus a safety margin, so planners can treat the robot as a
point. Bars and target objects never enter the grid: the robot crawls under
the former and is allowed to stop next to the latter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..config import SimConfig
from ..world.entities import Entity, EntityKind, SOLID_KINDS
from ..world.scene import Scene

Cell = tuple[int, int]


def _disk(radius_cells: int) -> np.ndarray:
    if radius_cells <= 0:
        return np.ones((1, 1), dtype=bool)
    span = np.arange(-radius_cells, radius_cells + 1)
    yy, xx = np.meshgrid(span, span, indexing="ij")
    return xx * xx + yy * yy <= radius_cells * radius_cells


@dataclass(frozen=True)
class OccupancyGrid:
    """Boolean occupancy over a rectangular region.

    ``occupied[iy, ix]`` covers the square whose center is
    ``origin + resolution * (ix + 0.5, iy + 0.5)``. Cells are addressed as
    ``(ix, iy)`` tuples everywhere in the planner API.
    """

    origin: tuple[float, float]
    resolution: float
    occupied: np.ndarray

    def __post_init__(self):
        if self.resolution <= 0:
            raise ValueError(f"resolution must be positive, got {self.resolution}")
        if self.occupied.dtype != np.bool_ or self.occupied.ndim != 2:
            raise ValueError("occupied must be a 2-D boolean array")
        self.occupied.setflags(write=False)

    @property
    def nx(self) -> int:
        return self.occupied.shape[1]

    @property
    def ny(self) -> int:
        return self.occupied.shape[0]

    def world_to_cell(self, x: float, y: float) -> Cell:
        ix = int(math.floor((x - self.origin[0]) / self.resolution))
        iy = int(math.floor((y - self.origin[1]) / self.resolution))
        return ix, iy

    def cell_to_world(self, cell: Cell) -> tuple[float, float]:
        ix, iy = cell
        return (
            self.origin[0] + (ix + 0.5) * self.resolution,
            self.origin[1] + (iy + 0.5) * self.resolution,
        )

    def in_bounds(self, cell: Cell) -> bool:
        ix, iy = cell
        return 0 <= ix < self.nx and 0 <= iy < self.ny

    def is_free(self, cell: Cell) -> bool:
        ix, iy = cell
        return self.in_bounds(cell) and not self.occupied[iy, ix]

    def with_cell(self, cell: Cell, occupied: bool) -> "OccupancyGrid":
        """Copy of this grid with one cell toggled (for incremental planning)."""
        if not self.in_bounds(cell):
            raise ValueError(f"cell {cell} out of bounds")
        grid = self.occupied.copy()
        grid[cell[1], cell[0]] = occupied
        return OccupancyGrid(self.origin, self.resolution, grid)

    def inflate(self, radius: float) -> "OccupancyGrid":
        """Dilate occupancy by a disk of the given metric radius."""
        cells = int(math.ceil(radius / self.resolution))
        dilated = ndimage.binary_dilation(self.occupied, structure=_disk(cells))
        return OccupancyGrid(self.origin, self.resolution, dilated)

    def nearest_free(self, cell: Cell, max_radius_cells: int = 40) -> Cell:
        """Closest free cell to ``cell``, searching outward ring by ring."""
        if self.is_free(cell):
            return cell
        cx, cy = cell
        for r in range(1, max_radius_cells + 1):
            best = None
            for dx in range(-r, r + 1):
                for dy in range(-r, r + 1):
                    if max(abs(dx), abs(dy)) != r:
                        continue
                    cand = (cx + dx, cy + dy)
                    if self.is_free(cand):
                        d = dx * dx + dy * dy
                        if best is None or d < best[0]:
                            best = (d, cand)
            if best is not None:
                return best[1]
        raise ValueError(f"no free cell within {max_radius_cells} cells of {cell}")


def _rasterize_box(mask: np.ndarray, grid: OccupancyGrid, center: tuple[float, float],
                   half_extents: tuple[float, float], yaw: float) -> None:
    res = grid.resolution
    xs = grid.origin[0] + (np.arange(grid.nx) + 0.5) * res
    ys = grid.origin[1] + (np.arange(grid.ny) + 0.5) * res
    gx, gy = np.meshgrid(xs, ys)
    c, s = math.cos(-yaw), math.sin(-yaw)
    u = (gx - center[0]) * c - (gy - center[1]) * s
    v = (gx - center[0]) * s + (gy - center[1]) * c
    # Any cell whose center lies within half a cell of the box is blocked.
    pad = res / 2.0
    mask |= (np.abs(u) <= half_extents[0] + pad) & (np.abs(v) <= half_extents[1] + pad)


def _rasterize_entity(mask: np.ndarray, grid: OccupancyGrid, ent: Entity) -> None:
    x, y, yaw = ent.pose
    if ent.kind in SOLID_KINDS:
        _rasterize_box(mask, grid, (x, y), (ent.dims[0] / 2.0, ent.dims[1] / 2.0), yaw)
    elif ent.kind is EntityKind.TUNNEL:
        passage = ent.attributes["passage_width"]
        thickness = ent.attributes.get(
            "wall_thickness", ent.attributes["outer_halfwidth"] - passage / 2.0
        )
        wall_center = passage / 2.0 + thickness / 2.0
        for side in (-1.0, 1.0):
            cy = y + side * wall_center
            _rasterize_box(mask, grid, (x, cy), (ent.dims[0] / 2.0, thickness / 2.0), yaw)


def grid_from_scene(scene: Scene, sim: SimConfig | None = None,
                    resolution: float = 0.05,
                    inflation: float | None = None) -> OccupancyGrid:
    """Build the planning grid for a scene over the arena bounds.

    ``inflation`` defaults to the footprint radius plus 0.05 m; the expert
    pipeline passes a larger margin so tracked paths keep clearance.
    """
    sim = sim or SimConfig()
    if inflation is None:
        inflation = sim.footprint_radius + 0.05
    x0, x1, y0, y1 = sim.arena
    nx = int(round((x1 - x0) / resolution))
    ny = int(round((y1 - y0) / resolution))
    mask = np.zeros((ny, nx), dtype=bool)
    grid = OccupancyGrid((x0, y0), resolution, mask.copy())
    for ent in scene.entities:
        _rasterize_entity(mask, grid, ent)
    return OccupancyGrid((x0, y0), resolution, mask).inflate(inflation)
