"""First-order Markov chain over room types (the game-path model)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .corpus import RoomSequence, RoomType
from .cpd import ConditionalTable
from .errors import DeadEnd, EmptyTraining

PLAYABLE_TYPES = (RoomType.HORIZONTAL, RoomType.VERTICAL)
INITIAL_PROBABILITY = 1 / len(PLAYABLE_TYPES)


@dataclass
class RoomTypeChain:
    """P(type_i | type_{i-1}) with a uniform choice for the first room."""

    table: ConditionalTable = field(default_factory=ConditionalTable)

    def transition(self, prev: RoomType, nxt: RoomType) -> float:
        return self.table.probability((prev.value,), nxt.value)


def _as_types(seq: RoomSequence | Sequence[RoomType] | str) -> list[RoomType]:
    if isinstance(seq, RoomSequence):
        return seq.types
    return [RoomType(t) for t in seq]


def train_high(sequences: Iterable[RoomSequence | Sequence[RoomType] | str]) -> RoomTypeChain:
    """Count every adjacent (previous type -> next type) pair."""
    chain = RoomTypeChain()
    for seq in sequences:
        types = _as_types(seq)
        if len(types) < 2:
            raise ValueError("room sequences need at least two rooms to train on")
        for prev, nxt in zip(types, types[1:]):
            if RoomType.NULL in (prev, nxt):
                raise ValueError("null rooms cannot appear in a room sequence")
            chain.table.observe((prev.value,), nxt.value)
    if not len(chain.table):
        raise EmptyTraining("no room sequences to train the room-type chain")
    chain.table.freeze()
    return chain


def generate_sequence(chain: RoomTypeChain, length: int, rng: np.random.Generator) -> list[RoomType]:
    if length < 1:
        raise ValueError("sequence length must be positive")
    types = [PLAYABLE_TYPES[int(rng.integers(len(PLAYABLE_TYPES)))]]
    while len(types) < length:
        nxt = chain.table.sample((types[-1].value,), rng)
        if nxt is None:
            raise DeadEnd(f"no learned successor for room type {types[-1].value}")
        types.append(RoomType(nxt))
    return types


def sequence_probability(chain: RoomTypeChain, types: RoomSequence | Sequence[RoomType] | str) -> float:
    """Probability that ``generate_sequence`` emits exactly ``types``."""
    types = _as_types(types)
    if not types:
        raise ValueError("empty room sequence")
    p = INITIAL_PROBABILITY
    for prev, nxt in zip(types, types[1:]):
        p *= chain.transition(prev, nxt)
    return p


def format_sequence(types: Iterable[RoomType]) -> str:
    return "".join(t.value for t in types)


def parse_sequence(text: str) -> list[RoomType]:
    text = text.strip()
    bad = set(text) - {"H", "V"}
    if bad:
        raise ValueError(f"room sequence may only contain H and V, found {sorted(bad)}")
    return [RoomType(c) for c in text]
