"""Stable per-level / per-room random streams derived from one master seed."""

from __future__ import annotations

import numpy as np

LAYOUT_STREAM = 0
ROOM_STREAM = 1


def stream(master: int, *key: int) -> np.random.Generator:
    """Independent generator for ``key`` under ``master``.

    Streams are addressed by index, so adding levels or rooms to a batch
    never changes the draws of earlier ones.
    """
    return np.random.default_rng(np.random.SeedSequence(master, spawn_key=tuple(key)))


def layout_stream(master: int, level: int) -> np.random.Generator:
    return stream(master, level, LAYOUT_STREAM)


def room_stream(master: int, level: int, room: int) -> np.random.Generator:
    return stream(master, level, ROOM_STREAM, room)
