import random
from collections import Counter

import numpy as np

from mmensemble.hierarchical import (
    build_hierarchical_baseline,
    endpoints,
    generate_hierarchical_level,
    generate_room_grid,
    grid_path,
    non_null,
    room_grid_probability,
    sample_layout,
    train_room_grid_chain,
)
from mmensemble.metrics import layout_is_playable
from mmensemble.seeding import layout_stream, room_stream

from oracles import layout_connected_by_enumeration


def test_toy_grid_counts():
    chain = train_room_grid_chain([["HV", "NH"]])
    got = Counter({(tuple(c), o): n for c, o, n, _ in chain.table.rows()})
    assert got == Counter({
        (("%", "%", "%"), "N"): 1,
        (("N", "%", "%"), "H"): 1,
        (("%", "N", "%"), "H"): 1,
        (("H", "H", "N"), "V"): 1,
    })


def test_closed_support_without_nulls():
    chain = train_room_grid_chain([["HH", "VV"], ["HVH", "VHH"]])
    rng = np.random.default_rng(0)
    for _ in range(50):
        labels = generate_room_grid(chain, 3, 3, rng)
        assert "N" not in "".join(labels)


def test_unseen_contexts_take_most_frequent_label():
    chain = train_room_grid_chain([["H"]])
    assert generate_room_grid(chain, 2, 1, np.random.default_rng(0)) == ["HH"]
    chain = train_room_grid_chain([["NNH", "NVV"]])
    assert chain.fallback == "N"
    assert generate_room_grid(chain, 1, 3, np.random.default_rng(0))[0] == "N"


def test_probability_of_training_grid():
    chain = train_room_grid_chain([["HV", "NH"]])
    assert room_grid_probability(chain, ["HV", "NH"]) == 1.0
    assert room_grid_probability(chain, ["HH", "NH"]) == 0.0


def test_endpoints_and_path():
    labels = ["NHV", "HHN", "NNV"]
    starts, ends = endpoints(labels)
    assert starts == [(0, 1)] and ends == [(2, 0), (2, 2)]
    assert grid_path(labels) == [(0, 1), (1, 1), (1, 0), (2, 0)]
    assert grid_path(["HN", "NV"]) is None
    assert non_null(["NN"]) == set()


def test_grid_path_agrees_with_enumeration():
    rng = random.Random(3)
    for _ in range(2000):
        labels = ["".join(rng.choice("HVNN") for _ in range(4)) for _ in range(3)]
        path = grid_path(labels)
        assert (path is not None) == layout_connected_by_enumeration(labels) == layout_is_playable(labels)
        if path:
            assert all(labels[y][x] != "N" for x, y in path)
            assert all(abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1 for a, b in zip(path, path[1:]))


def test_baseline_on_synthetic(synthetic, alphabet):
    model = build_hierarchical_baseline(synthetic.levels, alphabet)
    assert model.shape == (6, 3)
    labels, hit = sample_layout(model, 9, np.random.default_rng(2))
    assert len(labels) == 3 and all(len(r) == 6 for r in labels)
    if hit:
        assert len(non_null(labels)) == 9


def test_generated_level_structure(synthetic, alphabet):
    model = build_hierarchical_baseline(synthetic.levels, alphabet)
    for index in range(10):
        lvl = generate_hierarchical_level(model, 12, layout_stream(1, index),
                                          lambda j: room_stream(1, index, j), alphabet, 70, 1, index)
        labels = lvl.notes["labels"]
        assert (lvl.grid.width, lvl.grid.height) == (6 * 16, 3 * 15)
        assert set(lvl.rooms) == non_null(labels)
        if lvl.path:
            assert lvl.path == grid_path(labels)
            assert lvl.resample_count <= 70
        else:
            assert lvl.resample_count == 70 and lvl.capped
