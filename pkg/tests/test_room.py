import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmensemble.corpus import Direction, RoomType, TileGrid
from mmensemble.cpd import ConditionalTable
from mmensemble.errors import EmptyTraining, NoSharedStructure
from mmensemble.room import (
    CpdDifference,
    LContext,
    RoomModel,
    generate_room,
    room_cpd_difference,
    train_ensemble,
    train_room_model,
)


def brute_contexts(rows, code, border="%"):
    counts = Counter()
    h, w = len(rows), len(rows[0])
    for y in range(h):
        for x in range(w):
            left = rows[y][x - 1] if x > 0 else border
            below = rows[y + 1][x] if y + 1 < h else border
            below_left = rows[y + 1][x - 1] if y + 1 < h and x > 0 else border
            counts[(left, below, below_left, code), rows[y][x]] += 1
    return counts


def model_counts(model):
    return Counter({(tuple(ctx), out): n for ctx, out, n, _ in model.table.rows()})


def test_two_by_two_room():
    grid = TileGrid(("##", "--"))
    model = train_room_model([(grid, Direction.RIGHT)], True)
    assert model_counts(model) == Counter({
        (("%", "%", "%", "R"), "-"): 1,
        (("-", "%", "%", "R"), "-"): 1,
        (("%", "-", "%", "R"), "#"): 1,
        (("#", "-", "-", "R"), "#"): 1,
    })


def test_contexts_match_brute_force_on_small_grids():
    rng = random.Random(5)
    for _ in range(300):
        w, h = rng.randint(1, 3), rng.randint(1, 3)
        rooms = []
        for _ in range(rng.randint(1, 3)):
            rows = tuple("".join(rng.choice("-#l") for _ in range(w)) for _ in range(h))
            rooms.append((TileGrid(rows), rng.choice(list(Direction))))
        model = train_room_model(rooms, True)
        expected = Counter()
        for grid, d in rooms:
            expected += brute_contexts(grid.rows, d.value)
        assert model_counts(model) == expected


def test_direction_free_model_uses_placeholder():
    model = train_room_model([(TileGrid(("-",)), Direction.UP)], False)
    assert model.table.contexts() == [LContext("%", "%", "%", "-")]


def test_all_empty_room_generates_all_empty():
    room = TileGrid.filled(16, 15, "-")
    model = train_room_model([(room, Direction.RIGHT)], True)
    for ctx in model.table.contexts():
        assert model.table.distribution(ctx) == {"-": 1.0}
    assert generate_room(model, Direction.RIGHT, np.random.default_rng(0)) == room


def test_unseen_context_falls_back_to_empty():
    model = train_room_model([(TileGrid(("##", "##")), Direction.RIGHT)], True)
    # no context carries the Up code, so every cell falls back
    out = generate_room(model, Direction.UP, np.random.default_rng(0))
    assert out.rows == ("--", "--")


def test_generation_is_seeded(synthetic):
    ensemble = train_ensemble(synthetic.levels)
    a = generate_room(ensemble.vertical, Direction.UP, np.random.default_rng(17))
    b = generate_room(ensemble.vertical, Direction.UP, np.random.default_rng(17))
    assert a == b and (a.width, a.height) == (16, 15)


def test_ensemble_members_differ(synthetic):
    ensemble = train_ensemble(synthetic.levels)
    h, v = ensemble.horizontal.context_set(), ensemble.vertical.context_set()
    assert h != v
    ladder = [c for c in v - h if "l" in c[:3]]
    assert ladder, "vertical rooms should carry ladder contexts horizontal rooms lack"
    assert ensemble.model_for(RoomType.HORIZONTAL) is ensemble.horizontal
    with pytest.raises(ValueError):
        ensemble.model_for(RoomType.NULL)


def test_training_errors():
    with pytest.raises(EmptyTraining):
        train_room_model([], True)
    with pytest.raises(ValueError):
        train_room_model([(TileGrid(("-",)), None), (TileGrid(("--",)), None)], False)


def single_context_model(outcome):
    table = ConditionalTable().observe(("a", "b", "c", "R"), outcome).freeze()
    return RoomModel(table, True, 1, 1)


def test_difference_hand_example():
    d = room_cpd_difference(single_context_model("x"), single_context_model("y"))
    assert d == CpdDifference(2.0, 1.0, 2)


def test_self_difference_is_zero(synthetic):
    model = train_ensemble(synthetic.levels).vertical
    d = room_cpd_difference(model, model)
    assert (d.total, d.mean) == (0.0, 0.0)


def test_difference_only_counts_reference_contexts():
    a = ConditionalTable().observe(("a",), "x").observe(("z",), "q").freeze()
    b = ConditionalTable().observe(("a",), "x", 1).observe(("a",), "y", 1).freeze()
    d = room_cpd_difference(RoomModel(a, True, 1, 1), RoomModel(b, True, 1, 1))
    # context a: (1 - 0.5)^2 + (0 - 0.5)^2
    assert d == CpdDifference(0.5, 0.25, 2)


def test_difference_needs_reference():
    empty = RoomModel(ConditionalTable(), True, 1, 1)
    with pytest.raises(NoSharedStructure):
        room_cpd_difference(single_context_model("x"), empty)


def test_pooled_difference():
    pooled = CpdDifference(2.0, 1.0, 2) + CpdDifference(1.0, 0.25, 4)
    assert pooled == CpdDifference(3.0, 0.5, 6)


tiny_rooms = st.lists(
    st.lists(st.text("-#l", min_size=3, max_size=3), min_size=2, max_size=2).map(tuple),
    min_size=1, max_size=4,
)


@given(tiny_rooms, st.integers(0, 2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_generated_rooms_use_training_symbols(rooms, seed):
    model = train_room_model([(TileGrid(r), Direction.RIGHT) for r in rooms], True)
    out = generate_room(model, Direction.RIGHT, np.random.default_rng(seed))
    allowed = set("".join("".join(r) for r in rooms)) | {"-"}
    assert (out.width, out.height) == (3, 2)
    assert out.symbols() <= allowed


@given(tiny_rooms, tiny_rooms)
@settings(max_examples=100, deadline=None)
def test_difference_is_non_negative_and_bounded(ra, rb):
    a = train_room_model([(TileGrid(r), Direction.RIGHT) for r in ra], True)
    b = train_room_model([(TileGrid(r), Direction.RIGHT) for r in rb], True)
    d = room_cpd_difference(a, b)
    assert 0 <= d.total <= 2 * len(b.table)
    assert d.mean == pytest.approx(d.total / d.entries)
