"""Non-ensemble hierarchical baseline.

The level layout is a grid of room labels (H, V or N for null) sampled with
the same L-shaped chain used for tiles, sized to the median room grid of the
corpus. Non-null rooms are filled by one direction-free room model trained on
every playable room. The game path is recovered afterwards as the shortest
route through non-null rooms from a leftmost room to a rightmost one.
"""

from __future__ import annotations

import statistics
from collections import Counter, deque
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .assembler import DEFAULT_RESAMPLE_CAP, GeneratedLevel, compose_grid, fill_path
from .corpus import Coord, RoomSize, RoomType, TileAlphabet
from .cpd import ConditionalTable
from .errors import EmptyTraining
from .room import RoomModel, generate_room, l_shaped_cells, train_room_model, training_rooms

NULL_LABEL = RoomType.NULL.value
LAYOUT_ATTEMPTS = 70


@dataclass
class RoomGridChain:
    """L-shaped chain over room labels."""

    table: ConditionalTable
    border_symbol: str = "%"
    fallback: str = NULL_LABEL


def train_room_grid_chain(label_grids: Sequence[Sequence[str]], border_symbol: str = "%") -> RoomGridChain:
    """Count label contexts; the fallback for unseen contexts is the most frequent label."""
    table = ConditionalTable()
    labels: Counter = Counter()
    for rows in label_grids:
        for x, y, left, below, below_left in l_shaped_cells(rows, border_symbol):
            table.observe((left, below, below_left), rows[y][x])
            labels[rows[y][x]] += 1
    if not len(table):
        raise EmptyTraining("no room grids to train the layout chain")
    table.freeze()
    fallback = min(labels, key=lambda k: (-labels[k], k))
    return RoomGridChain(table, border_symbol, fallback)


def generate_room_grid(chain: RoomGridChain, cols: int, rows: int, rng: np.random.Generator) -> list[str]:
    """Sample a label grid bottom row first; unseen contexts take the chain's fallback label."""
    border = chain.border_symbol
    out = [[""] * cols for _ in range(rows)]
    for y in range(rows - 1, -1, -1):
        under = out[y + 1] if y + 1 < rows else None
        for x in range(cols):
            ctx = (
                out[y][x - 1] if x else border,
                under[x] if under is not None else border,
                under[x - 1] if under is not None and x else border,
            )
            label = chain.table.sample(ctx, rng)
            out[y][x] = chain.fallback if label is None else label
    return ["".join(r) for r in out]


def room_grid_probability(chain: RoomGridChain, labels: Sequence[str]) -> float:
    """Probability of sampling exactly ``labels`` (product of per-cell probabilities)."""
    p = 1.0
    for x, y, left, below, below_left in l_shaped_cells(labels, chain.border_symbol):
        p *= chain.table.probability((left, below, below_left), labels[y][x])
        if p == 0.0:
            break
    return p


def non_null(labels: Sequence[str]) -> set[Coord]:
    return {(x, y) for y, row in enumerate(labels) for x, c in enumerate(row) if c != NULL_LABEL}


def endpoints(labels: Sequence[str]) -> tuple[list[Coord], list[Coord]]:
    """Start rooms (leftmost non-null column) and end rooms (rightmost one)."""
    cells = non_null(labels)
    if not cells:
        return [], []
    lo = min(x for x, _ in cells)
    hi = max(x for x, _ in cells)
    starts = sorted((c for c in cells if c[0] == lo), key=lambda c: c[1])
    ends = sorted((c for c in cells if c[0] == hi), key=lambda c: c[1])
    return starts, ends


def grid_path(labels: Sequence[str]) -> list[Coord] | None:
    """Shortest 4-connected route through non-null rooms from a start to an end room."""
    cells = non_null(labels)
    starts, ends = endpoints(labels)
    goal = set(ends)
    parent: dict[Coord, Coord | None] = {s: None for s in starts}
    queue = deque(starts)
    while queue:
        cur = queue.popleft()
        if cur in goal:
            path = [cur]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return path[::-1]
        x, y = cur
        for nxt in ((x + 1, y), (x, y - 1), (x, y + 1), (x - 1, y)):
            if nxt in cells and nxt not in parent:
                parent[nxt] = cur
                queue.append(nxt)
    return None


@dataclass
class HierarchicalModel:
    layout: RoomGridChain
    rooms: RoomModel
    shape: tuple[int, int]  # (cols, rows) of generated room grids


def build_hierarchical_baseline(levels, alphabet: TileAlphabet) -> HierarchicalModel:
    levels = list(levels)
    if not levels:
        raise EmptyTraining("no levels for the hierarchical baseline")
    chain = train_room_grid_chain([lvl.type_grid() for lvl in levels], alphabet.border_symbol)
    rooms = train_room_model(training_rooms(levels), False, alphabet.border_symbol, alphabet.empty_symbol)
    shape = (
        statistics.median_low(lvl.room_cols for lvl in levels),
        statistics.median_low(lvl.room_rows for lvl in levels),
    )
    return HierarchicalModel(chain, rooms, shape)


def sample_layout(model: HierarchicalModel, target_rooms: int, rng: np.random.Generator,
                  attempts: int = LAYOUT_ATTEMPTS) -> tuple[list[str], bool]:
    """Resample label grids until ``target_rooms`` are non-null.

    Returns (labels, hit). When no attempt hits the target the closest one
    (first on ties) is kept and ``hit`` is False.
    """
    cols, rows = model.shape
    best: list[str] | None = None
    best_gap = None
    for _ in range(max(attempts, 1)):
        labels = generate_room_grid(model.layout, cols, rows, rng)
        gap = abs(len(non_null(labels)) - target_rooms)
        if gap == 0:
            return labels, True
        if best_gap is None or gap < best_gap:
            best, best_gap = labels, gap
    return best, False


def generate_hierarchical_level(model: HierarchicalModel, target_rooms: int, layout_rng: np.random.Generator,
                                room_rngs: Callable[[int], np.random.Generator], alphabet: TileAlphabet,
                                resample_cap: int = DEFAULT_RESAMPLE_CAP, seed: int = 0,
                                index: int = 0) -> GeneratedLevel:
    """One baseline level.

    Rooms on the recovered path get seam resampling like the sequence-based
    approaches. If no path exists the level can never be repaired by
    resampling, so it is charged the full cap and flagged.
    """
    labels, hit = sample_layout(model, target_rooms, layout_rng)
    size = RoomSize(model.rooms.width, model.rooms.height)
    path = grid_path(labels)

    def sample(_i: int, rng: np.random.Generator):
        return generate_room(model.rooms, None, rng)

    rooms = {}
    count, capped = 0, False
    if path is not None:
        grids, count, capped = fill_path(path, sample, room_rngs, alphabet, resample_cap)
        rooms.update(zip(path, grids))
    else:
        count, capped = resample_cap, True
    offset = len(path or ())
    extras = sorted(non_null(labels) - set(rooms), key=lambda c: (c[1], c[0]))
    for k, coord in enumerate(extras):
        rooms[coord] = sample(offset + k, room_rngs(offset + k))
    grid = compose_grid(rooms, model.shape, size, alphabet.null_symbol)
    notes = {"labels": labels, "room_target_hit": hit}
    return GeneratedLevel(None, grid, rooms, path or [], size, count, capped, seed, index, plan=labels, notes=notes)
