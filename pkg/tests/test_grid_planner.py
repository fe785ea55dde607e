"""Grid planners: A* against a Dijkstra oracle, D* Lite against fresh A*,
occupancy-grid geometry, and path smoothing."""

import math

import numpy as np
import pytest

from quadkit.expert import (
    DStarLitePlanner,
    NoPathError,
    OccupancyGrid,
    line_of_sight,
    plan_astar,
    smooth_path,
)
from quadkit.expert.astar import SQRT2

from oracles import dijkstra_cost, random_grid


def empty_grid(n: int = 12, res: float = 0.05) -> OccupancyGrid:
    return OccupancyGrid((0.0, 0.0), res, np.zeros((n, n), dtype=bool))


def path_is_valid(grid: OccupancyGrid, path) -> bool:
    """Every cell free, every step 8-adjacent, no corner cutting, cost honest."""
    cells = path.cells
    if not all(grid.is_free(c) for c in cells):
        return False
    diag = straight = 0
    for (ax, ay), (bx, by) in zip(cells, cells[1:]):
        dx, dy = bx - ax, by - ay
        if max(abs(dx), abs(dy)) != 1 or (dx, dy) == (0, 0):
            return False
        if dx != 0 and dy != 0:
            if not (grid.is_free((ax + dx, ay)) and grid.is_free((ax, ay + dy))):
                return False
            diag += 1
        else:
            straight += 1
    want = grid.resolution * straight + grid.resolution * SQRT2 * diag
    return path.cost == want


def test_astar_cost_matches_dijkstra_on_random_grids():
    rng = np.random.default_rng(20240)
    solved = 0
    for _ in range(60):
        grid = random_grid(rng)
        start = grid.cell_to_world((0, 0))
        goal = grid.cell_to_world((grid.nx - 1, grid.ny - 1))
        oracle = dijkstra_cost(grid, (0, 0), (grid.nx - 1, grid.ny - 1))
        if oracle is None:
            with pytest.raises(NoPathError):
                plan_astar(grid, start, goal, snap=False)
            continue
        path = plan_astar(grid, start, goal, snap=False)
        assert path.cost == oracle  # both canonicalize counts, so exact
        assert path_is_valid(grid, path)
        assert path.cells[0] == (0, 0)
        assert path.cells[-1] == (grid.nx - 1, grid.ny - 1)
        solved += 1
    assert solved >= 40  # the fill rate leaves most grids solvable


def test_straight_and_diagonal_costs_are_exact():
    grid = empty_grid()
    res = grid.resolution
    straight = plan_astar(grid, grid.cell_to_world((0, 0)), grid.cell_to_world((9, 0)))
    assert straight.cost == 9 * res
    diag = plan_astar(grid, grid.cell_to_world((0, 0)), grid.cell_to_world((9, 9)))
    assert diag.cost == 9 * res * SQRT2


def test_diagonal_squeeze_through_blocked_corner_is_forbidden():
    occupied = np.zeros((2, 2), dtype=bool)
    occupied[0, 1] = True  # cell (1, 0)
    occupied[1, 0] = True  # cell (0, 1)
    grid = OccupancyGrid((0.0, 0.0), 0.05, occupied)
    with pytest.raises(NoPathError):
        plan_astar(grid, grid.cell_to_world((0, 0)), grid.cell_to_world((1, 1)),
                   snap=False)


def test_snap_moves_blocked_endpoints_to_nearest_free_cell():
    occupied = np.zeros((8, 8), dtype=bool)
    occupied[0, 0] = True
    grid = OccupancyGrid((0.0, 0.0), 0.05, occupied)
    path = plan_astar(grid, grid.cell_to_world((0, 0)), grid.cell_to_world((7, 7)))
    assert grid.is_free(path.cells[0])
    assert max(abs(path.cells[0][0]), abs(path.cells[0][1])) == 1


def test_inflate_blocks_exactly_a_euclidean_disk():
    occupied = np.zeros((11, 11), dtype=bool)
    occupied[5, 5] = True
    grid = OccupancyGrid((0.0, 0.0), 0.05, occupied).inflate(2 * 0.05)
    for ix in range(11):
        for iy in range(11):
            inside = (ix - 5) ** 2 + (iy - 5) ** 2 <= 4
            assert grid.occupied[iy, ix] == inside, (ix, iy)


def test_nearest_free_prefers_smallest_euclidean_distance():
    occupied = np.zeros((9, 9), dtype=bool)
    occupied[0:3, 0:3] = True  # 3x3 block in the corner
    grid = OccupancyGrid((0.0, 0.0), 0.05, occupied)
    found = grid.nearest_free((0, 0))
    assert grid.is_free(found)
    # (0, 3) and (3, 0) tie at Euclidean distance 3; nothing free is closer.
    assert found[0] ** 2 + found[1] ** 2 == 9
    assert grid.nearest_free((4, 4)) == (4, 4)


def test_dstar_matches_fresh_astar_after_random_updates():
    rng = np.random.default_rng(77)
    for _ in range(25):
        grid = random_grid(rng, fill=0.15)
        start = grid.cell_to_world((0, 0))
        goal = grid.cell_to_world((grid.nx - 1, grid.ny - 1))
        planner = DStarLitePlanner(grid, start, goal)
        current = grid
        for _round in range(4):
            changes = []
            for _k in range(6):
                cell = (int(rng.integers(0, grid.nx)), int(rng.integers(0, grid.ny)))
                if cell in ((0, 0), (grid.nx - 1, grid.ny - 1)):
                    continue
                occ = bool(rng.integers(0, 2))
                changes.append((cell, occ))
                current = current.with_cell(cell, occ)
            planner.update_cells(changes)
            try:
                fresh = plan_astar(current, start, goal, snap=False)
            except NoPathError:
                with pytest.raises(NoPathError):
                    planner.plan()
                continue
            incremental = planner.plan()
            assert incremental.cost == fresh.cost  # canonical counts, exact
            assert path_is_valid(current, incremental)


def test_dstar_move_start_follows_the_robot():
    rng = np.random.default_rng(9)
    grid = random_grid(rng, fill=0.2)
    start = grid.cell_to_world((0, 0))
    goal = grid.cell_to_world((grid.nx - 1, grid.ny - 1))
    planner = DStarLitePlanner(grid, start, goal)
    path = planner.plan()
    # Walk three waypoints down the path, replanning at each.
    for step in (1, 2, 3):
        if step >= len(path.cells) - 1:
            break
        new_start = grid.cell_to_world(path.cells[step])
        planner.move_start(new_start)
        fresh = plan_astar(grid, new_start, goal, snap=False)
        assert planner.plan().cost == fresh.cost


def test_smooth_path_preserves_endpoints_and_visibility():
    rng = np.random.default_rng(4242)
    checked = 0
    for _ in range(30):
        grid = random_grid(rng, fill=0.2)
        start = grid.cell_to_world((0, 0))
        goal = grid.cell_to_world((grid.nx - 1, grid.ny - 1))
        try:
            raw = plan_astar(grid, start, goal, snap=False)
        except NoPathError:
            continue
        smooth = smooth_path(grid, raw)
        assert smooth.waypoints[0] == raw.waypoints[0]
        assert smooth.waypoints[-1] == raw.waypoints[-1]
        assert len(smooth) <= len(raw)
        for a, b in zip(smooth.waypoints, smooth.waypoints[1:]):
            assert line_of_sight(grid, a, b)
        euclid = sum(
            math.hypot(b[0] - a[0], b[1] - a[1])
            for a, b in zip(smooth.waypoints, smooth.waypoints[1:])
        )
        assert smooth.cost == pytest.approx(euclid)
        assert smooth.cost <= raw.cost + 1e-9  # shortcutting never lengthens
        checked += 1
    assert checked >= 20


def test_smooth_path_collapses_a_clear_staircase():
    grid = empty_grid(16)
    raw = plan_astar(grid, grid.cell_to_world((0, 0)), grid.cell_to_world((15, 7)))
    smooth = smooth_path(grid, raw)
    assert len(smooth) == 2  # open room: one straight shot
    assert smooth.cost == pytest.approx(
        math.hypot(15 * grid.resolution, 7 * grid.resolution)
    )


def test_line_of_sight_detects_blockers():
    occupied = np.zeros((9, 9), dtype=bool)
    occupied[4, 4] = True
    grid = OccupancyGrid((0.0, 0.0), 0.05, occupied)
    a = grid.cell_to_world((0, 4))
    b = grid.cell_to_world((8, 4))
    assert not line_of_sight(grid, a, b)
    assert line_of_sight(grid, grid.cell_to_world((0, 0)), grid.cell_to_world((8, 0)))
