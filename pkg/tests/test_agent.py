import random
from dataclasses import dataclass

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmensemble.agent import (
    AgentState,
    JumpModel,
    Terrain,
    check_playable,
    estimate_jump_model,
    find_path,
    room_rect,
    start_tile,
    successors,
)
from mmensemble.corpus import RoomSize, TileGrid
from mmensemble.errors import ConfigError, NoStartTile

from oracles import bfs_distance, first_standing_tile

HALF = RoomSize(8, 15)


@dataclass
class Level:
    grid: TileGrid
    path: list
    room_size: RoomSize


def two_rooms(rows):
    """A 16x15 grid treated as two 8x15 rooms, left to right."""
    return Level(TileGrid(tuple(rows)), [(0, 0), (1, 0)], HALF)


def floor_room(body_rows):
    return body_rows + ["#" * 16]


def corridor():
    return floor_room(["-" * 16] * 14)


def test_corridor_walk(alphabet):
    verdict = check_playable(two_rooms(corridor()), JumpModel(), alphabet)
    assert verdict.playable
    assert verdict.start == AgentState(0, 13)
    # goal is the first column of the right room
    assert verdict.cost == 8


def test_single_room_corridor_cost(alphabet):
    # goal room is one column wide at the far right: width - 1 walks
    grid = TileGrid(tuple(corridor()))
    lvl = Level(grid, [(0, 0), (15, 0)], RoomSize(1, 15))
    assert check_playable(lvl, JumpModel(), alphabet).cost == 15


def wall(height, rows=15, width=16, x=8):
    grid = [["-"] * width for _ in range(rows)]
    grid[-1] = ["#"] * width
    for y in range(rows - 1 - height, rows - 1):
        grid[y][x] = "#"
    return ["".join(r) for r in grid]


def test_wall_needs_enough_rise(alphabet):
    lvl = two_rooms(wall(3, x=6))
    assert check_playable(lvl, JumpModel(max_rise=4), alphabet).playable
    assert not check_playable(lvl, JumpModel(max_rise=2), alphabet).playable


def ladder_shaft(with_ladder):
    rows = []
    for y in range(15):
        if y == 0:
            rows.append("#######l-#######" if with_ladder else "#######--#######")
        elif y == 14:
            rows.append("#" * 16)
        else:
            rows.append("#------l-------#" if with_ladder else "#--------------#")
    return rows


def test_ladder_climb(alphabet):
    up_room = ["-" * 16] * 13 + ["#######-########", "#######l########"]
    level = Level(TileGrid(tuple(up_room + ladder_shaft(True))), [(0, 1), (0, 0)], RoomSize(16, 15))
    level_no = Level(TileGrid(tuple(up_room[:-1] + ["#######-########"] + ladder_shaft(False))),
                     [(0, 1), (0, 0)], RoomSize(16, 15))
    assert check_playable(level, JumpModel(), alphabet).playable
    assert not check_playable(level_no, JumpModel(), alphabet).playable


def test_hazards_block(alphabet):
    rows = corridor()
    rows[-2] = "-" * 4 + "H" + "-" * 11
    rows[-3] = "-" * 4 + "H" + "-" * 11
    rows[-4] = "-" * 4 + "H" + "-" * 11
    rows = ["----H" + "-" * 11] * 11 + rows[-4:]
    assert not check_playable(two_rooms(rows), JumpModel(), alphabet).playable


def test_no_start_tile(alphabet):
    with pytest.raises(NoStartTile):
        check_playable(two_rooms(["-" * 16] * 15), JumpModel(), alphabet)


def test_empty_path(alphabet):
    assert not check_playable(Level(TileGrid(("-",)), [], HALF), JumpModel(), alphabet).playable


def test_jump_model_validation():
    with pytest.raises(ConfigError):
        JumpModel(0, 3)


def random_level(rng):
    weights = rng.choice([
        {"-": 60, "#": 28, "l": 6, "H": 4, "@": 2},
        {"-": 75, "#": 18, "l": 4, "H": 2, "M": 1},
        {"-": 50, "#": 40, "l": 5, "B": 5},
    ])
    symbols, w = zip(*weights.items())
    rows = ["".join(rng.choices(symbols, w, k=16)) for _ in range(15)]
    if rng.random() < 0.8:
        rows[-1] = "".join(rng.choice("###-") for _ in range(16))
    return rows


def test_astar_matches_bfs_oracle(alphabet):
    rng = random.Random(515)
    jumps = [JumpModel(4, 5), JumpModel(2, 2), JumpModel(1, 1), JumpModel(5, 3)]
    results = {"playable": 0, "unplayable": 0, "no_start": 0}
    disagreements = []
    for case in range(1200):
        rows = random_level(rng)
        jump = jumps[case % len(jumps)]
        oracle_start = first_standing_tile(rows, 0, 0, 7, 14)
        try:
            verdict = check_playable(two_rooms(rows), jump, alphabet)
        except NoStartTile:
            assert oracle_start is None
            results["no_start"] += 1
            continue
        assert (verdict.start.x, verdict.start.y) == oracle_start
        dist = bfs_distance(rows, oracle_start, (8, 0, 15, 14), jump.max_rise, jump.max_horizontal)
        if verdict.playable != (dist is not None) or (dist is not None and verdict.cost != dist):
            disagreements.append((case, verdict.cost, dist))
        results["playable" if verdict.playable else "unplayable"] += 1
    assert disagreements == []
    assert results["playable"] >= 150 and results["unplayable"] >= 150


def test_astar_path_uses_legal_moves(alphabet):
    rng = random.Random(77)
    checked = 0
    while checked < 100:
        rows = random_level(rng)
        level = two_rooms(rows)
        try:
            verdict = check_playable(level, JumpModel(), alphabet)
        except NoStartTile:
            continue
        if not verdict.playable:
            continue
        terrain = Terrain(level.grid, alphabet)
        for a, b in zip(verdict.path, verdict.path[1:]):
            assert b in set(successors(terrain, a, JumpModel()))
        checked += 1


@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.integers(1, 5), st.integers(0, 2), st.integers(0, 2))
@settings(max_examples=150, deadline=None)
def test_bigger_budgets_never_hurt(seed, rise, horiz, extra_r, extra_h):
    from mmensemble.corpus import TileAlphabet
    alphabet = TileAlphabet.load()
    rows = random_level(random.Random(seed))
    level = two_rooms(rows)
    try:
        small = check_playable(level, JumpModel(rise, horiz), alphabet)
    except NoStartTile:
        return
    big = check_playable(level, JumpModel(rise + extra_r, horiz + extra_h), alphabet)
    if small.playable:
        assert big.playable and big.cost <= small.cost


def test_find_path_node_limit(alphabet):
    terrain = Terrain(TileGrid(tuple(corridor())), alphabet)
    start = start_tile(terrain, room_rect((0, 0), HALF))
    verdict = find_path(terrain, start, room_rect((1, 0), HALF), JumpModel(), max_nodes=2)
    assert not verdict.playable


def test_estimate_jump_model(alphabet):
    rows = corridor()
    grid = TileGrid(tuple(rows))
    # walk, hop three tiles up and two across, land
    path = [(0, 13), (1, 13), (1, 12), (2, 11), (2, 10), (3, 10), (3, 11), (3, 12), (3, 13), (4, 13)]
    est = estimate_jump_model(grid, path, alphabet)
    assert est == JumpModel(3, 2)
