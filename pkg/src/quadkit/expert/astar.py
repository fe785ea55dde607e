"""Grid path planning with A*.

Movement contract (shared by every planner in this package and by their
tests): 8-connected moves between free cells, cardinal steps cost one cell
resolution, diagonal steps cost resolution * sqrt(2), and a diagonal move is
legal only when both adjacent cardinal cells are free (no corner cutting).
The octile heuristic is consistent under this contract, so returned costs
are optimal.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .grid import Cell, OccupancyGrid

SQRT2 = math.sqrt(2.0)

# Fixed neighbor order keeps expansion, and therefore returned paths,
# deterministic.
NEIGHBOR_OFFSETS = (
    (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1),
)


class NoPathError(RuntimeError):
    """No collision-free path exists between the requested endpoints."""


@dataclass(frozen=True)
class PlannedPath:
    """A planned route: cell-center waypoints in meters plus total cost."""

    waypoints: tuple[tuple[float, float], ...]
    cells: tuple[Cell, ...]
    cost: float

    def __len__(self) -> int:
        return len(self.waypoints)


def octile(a: Cell, b: Cell, resolution: float) -> float:
    dx, dy = abs(a[0] - b[0]), abs(a[1] - b[1])
    return resolution * (max(dx, dy) + (SQRT2 - 1.0) * min(dx, dy))


def grid_neighbors(grid: OccupancyGrid, cell: Cell):
    """Yield (neighbor, step_cost_m) pairs under the movement contract."""
    x, y = cell
    res = grid.resolution
    for dx, dy in NEIGHBOR_OFFSETS:
        nxt = (x + dx, y + dy)
        if not grid.is_free(nxt):
            continue
        if dx != 0 and dy != 0:
            if not (grid.is_free((x + dx, y)) and grid.is_free((x, y + dy))):
                continue
            yield nxt, res * SQRT2
        else:
            yield nxt, res


def plan_astar(grid: OccupancyGrid, start_xy: tuple[float, float],
               goal_xy: tuple[float, float], snap: bool = True) -> PlannedPath:
    """Optimal path between two world points, snapping endpoints to free cells."""
    start = grid.world_to_cell(*start_xy)
    goal = grid.world_to_cell(*goal_xy)
    if snap:
        try:
            start = grid.nearest_free(start)
            goal = grid.nearest_free(goal)
        except ValueError as exc:
            raise NoPathError(str(exc)) from exc
    if not grid.is_free(start) or not grid.is_free(goal):
        raise NoPathError(f"endpoint blocked: start={start} goal={goal}")

    res = grid.resolution
    g = {start: 0.0}
    parent: dict[Cell, Cell] = {}
    counter = 0
    open_heap = [(octile(start, goal, res), counter, start)]
    closed: set[Cell] = set()
    while open_heap:
        _, _, cur = heapq.heappop(open_heap)
        if cur in closed:
            continue
        if cur == goal:
            return _extract(grid, parent, start, goal, g[goal])
        closed.add(cur)
        for nxt, step in grid_neighbors(grid, cur):
            if nxt in closed:
                continue
            cand = g[cur] + step
            if cand < g.get(nxt, math.inf) - 1e-12:
                g[nxt] = cand
                parent[nxt] = cur
                counter += 1
                heapq.heappush(open_heap, (cand + octile(nxt, goal, res), counter, nxt))
    raise NoPathError(f"goal unreachable: start={start} goal={goal}")


def line_of_sight(grid: OccupancyGrid, a: tuple[float, float],
                  b: tuple[float, float]) -> bool:
    """True if the straight segment a-b stays in free cells (sampled at half
    the grid resolution)."""
    length = math.hypot(b[0] - a[0], b[1] - a[1])
    n = max(1, int(math.ceil(length / (grid.resolution / 2.0))))
    for i in range(n + 1):
        t = i / n
        x = a[0] + t * (b[0] - a[0])
        y = a[1] + t * (b[1] - a[1])
        if not grid.is_free(grid.world_to_cell(x, y)):
            return False
    return True


def smooth_path(grid: OccupancyGrid, path: PlannedPath) -> PlannedPath:
    """Prune grid stairsteps: keep the farthest waypoint each anchor can see.

    The result is no longer grid-optimal in cost (its cost field is the sum
    of its segment lengths); use the raw A* output where optimality matters.
    """
    wps = path.waypoints
    if len(wps) <= 2:
        return path
    kept_idx = [0]
    i = 0
    last = len(wps) - 1
    while i < last:
        j = last
        while j > i + 1 and not line_of_sight(grid, wps[i], wps[j]):
            j -= 1
        kept_idx.append(j)
        i = j
    waypoints = tuple(wps[k] for k in kept_idx)
    cells = tuple(path.cells[k] for k in kept_idx)
    cost = sum(
        math.hypot(b[0] - a[0], b[1] - a[1])
        for a, b in zip(waypoints, waypoints[1:])
    )
    return PlannedPath(waypoints=waypoints, cells=cells, cost=cost)


def _extract(grid: OccupancyGrid, parent: dict[Cell, Cell], start: Cell,
             goal: Cell, cost: float) -> PlannedPath:
    cells = [goal]
    while cells[-1] != start:
        cells.append(parent[cells[-1]])
    cells.reverse()
    waypoints = tuple(grid.cell_to_world(c) for c in cells)
    # Canonicalize the cost from step counts: optimal n_cardinal/n_diagonal
    # pairs are unique, so equal-cost planners agree bit for bit.
    diag = sum(1 for a, b in zip(cells, cells[1:]) if a[0] != b[0] and a[1] != b[1])
    straight = len(cells) - 1 - diag
    canonical = grid.resolution * straight + grid.resolution * SQRT2 * diag
    return PlannedPath(waypoints=waypoints, cells=tuple(cells), cost=canonical)
