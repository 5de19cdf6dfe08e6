import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmensemble.cpd import ConditionalTable
from mmensemble.errors import FrozenTableError

from oracles import recount


def table_of(observations):
    t = ConditionalTable()
    for ctx, out in observations:
        t.observe(ctx, out)
    return t


def test_hand_counts():
    t = table_of([(("c",), "a"), (("c",), "a"), (("c",), "b")])
    assert t.fraction(("c",), "a") == Fraction(2, 3)
    assert t.fraction(("c",), "b") == Fraction(1, 3)
    assert t.probability(("c",), "a") == pytest.approx(2 / 3, abs=1e-15)


def test_single_observation_is_certain():
    t = table_of([(("c",), "a")])
    assert t.probability(("c",), "a") == 1.0
    rng = np.random.default_rng(0)
    assert {t.sample(("c",), rng) for _ in range(50)} == {"a"}


def test_unseen_lookups():
    t = table_of([(("c",), "a")])
    assert t.sample(("zzz",), np.random.default_rng(0)) is None
    assert ("zzz",) not in t
    assert t.probability(("zzz",), "a") == 0.0
    assert t.probability(("c",), "b") == 0.0
    assert t.distribution(("zzz",)) == {}


def test_sampling_frequency():
    t = ConditionalTable().observe(("c",), "a", 2).observe(("c",), "b", 1)
    rng = np.random.default_rng(1234)
    draws = [t.sample(("c",), rng) for _ in range(10_000)]
    assert abs(draws.count("a") / len(draws) - 2 / 3) <= 0.03


def test_sampling_is_seeded():
    t = ConditionalTable().observe(("c",), "a", 3).observe(("c",), "b", 5).observe(("c",), "x", 1)
    a = [t.sample(("c",), np.random.default_rng(9)) for _ in range(5)]
    b = [t.sample(("c",), np.random.default_rng(9)) for _ in range(5)]
    assert a == b


def test_frozen_table_rejects_updates():
    t = table_of([(("c",), "a")]).freeze()
    with pytest.raises(FrozenTableError):
        t.observe(("c",), "b")


def test_observe_counts():
    with pytest.raises(ValueError):
        ConditionalTable().observe(("c",), "a", -1)
    t = ConditionalTable().observe(("c",), "a", 0)
    assert ("c",) not in t


def random_observations(rng, n):
    contexts = [tuple(rng.choice("ab%-") for _ in range(rng.randint(1, 3))) for _ in range(rng.randint(1, 6))]
    return [(rng.choice(contexts), rng.choice("-#lMH")) for _ in range(n)]


def test_counting_oracle_1000_lists():
    rng = random.Random(20210)
    disagreements = 0
    for _ in range(1000):
        obs = random_observations(rng, rng.randint(1, 60))
        t = table_of(obs)
        expected = recount(obs)
        assert set(t.contexts()) == set(expected)
        for ctx, dist in expected.items():
            for out, p in dist.items():
                if t.fraction(ctx, out) != p or abs(t.probability(ctx, out) - float(p)) > 1e-12:
                    disagreements += 1
    assert disagreements == 0


def test_records_are_lexicographic_and_round_trip():
    t = table_of([(("b", "x"), "z"), (("a", "y"), "q"), (("a", "y"), "a")])
    records = t.to_records()
    assert [(r["context"], r["outcome"]) for r in records] == [
        (["a", "y"], "a"), (["a", "y"], "q"), (["b", "x"], "z")
    ]
    assert records[0]["probability"] == 0.5
    assert ConditionalTable.from_records(records) == t


obs_strategy = st.lists(
    st.tuples(st.tuples(st.sampled_from("ab%"), st.sampled_from("-#")), st.sampled_from("-#lH")),
    min_size=1, max_size=40,
)


@given(obs_strategy)
@settings(max_examples=200, deadline=None)
def test_distributions_sum_to_one(obs):
    t = table_of(obs)
    for ctx in t.contexts():
        assert sum(t.fraction(ctx, o) for o in t.outcomes(ctx)) == 1
        assert abs(sum(t.distribution(ctx).values()) - 1.0) <= 1e-12


@given(obs_strategy, st.integers(0, 2**32 - 1))
@settings(max_examples=200, deadline=None)
def test_samples_are_observed_outcomes(obs, seed):
    t = table_of(obs)
    rng = np.random.default_rng(seed)
    for ctx in t.contexts():
        assert t.sample(ctx, rng) in t.outcomes(ctx)


@given(obs_strategy)
@settings(max_examples=100, deadline=None)
def test_export_round_trip(obs):
    t = table_of(obs)
    assert ConditionalTable.from_records(t.to_records()) == t
