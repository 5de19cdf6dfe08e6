"""L-shaped multidimensional Markov chains for room interiors.

Each tile is conditioned on its left, below and below-left neighbours plus,
optionally, the direction the player must travel to reach the next room.
Neighbours outside the room read as the border symbol, so the bottom row and
left column are learned and generated like any other cell.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .corpus import Direction, Room, RoomType, TileGrid
from .cpd import ConditionalTable
from .errors import EmptyTraining, NoSharedStructure

NO_DIRECTION = "-"


class LContext(NamedTuple):
    left: str
    below: str
    below_left: str
    direction: str = NO_DIRECTION


def direction_code(direction: Direction | str | None) -> str:
    if direction is None:
        return NO_DIRECTION
    return Direction(direction).value


def l_shaped_cells(rows: Sequence[str], border: str) -> Iterator[tuple[int, int, str, str, str]]:
    """Yield ``(x, y, left, below, below_left)`` for every cell, bottom row first."""
    height, width = len(rows), len(rows[0])
    for y in range(height - 1, -1, -1):
        row = rows[y]
        under = rows[y + 1] if y + 1 < height else None
        for x in range(width):
            left = row[x - 1] if x else border
            below = under[x] if under is not None else border
            below_left = under[x - 1] if under is not None and x else border
            yield x, y, left, below, below_left


@dataclass
class RoomModel:
    table: ConditionalTable
    uses_direction: bool
    width: int = 16
    height: int = 15
    border_symbol: str = "%"
    empty_symbol: str = "-"

    def context(self, left: str, below: str, below_left: str, direction) -> LContext:
        code = direction_code(direction) if self.uses_direction else NO_DIRECTION
        return LContext(left, below, below_left, code)

    def context_set(self) -> set[tuple]:
        return set(self.table.contexts())


@dataclass
class RoomEnsemble:
    horizontal: RoomModel
    vertical: RoomModel

    def __post_init__(self):
        if not (self.horizontal.uses_direction and self.vertical.uses_direction):
            raise ValueError("ensemble members must condition on direction")

    def model_for(self, room_type: RoomType) -> RoomModel:
        if room_type is RoomType.HORIZONTAL:
            return self.horizontal
        if room_type is RoomType.VERTICAL:
            return self.vertical
        raise ValueError("null rooms have no model")


def _grid_of(item: Room | TileGrid) -> TileGrid:
    return item.grid if isinstance(item, Room) else item


def train_room_model(rooms: Iterable[tuple[Room | TileGrid, Direction | None]], use_direction: bool,
                     border_symbol: str = "%", empty_symbol: str = "-") -> RoomModel:
    """Count one observation per cell of every training room."""
    table = ConditionalTable()
    size = None
    for item, direction in rooms:
        grid = _grid_of(item)
        if size is None:
            size = (grid.width, grid.height)
        elif size != (grid.width, grid.height):
            raise ValueError(f"room of size {grid.width}x{grid.height} mixed with {size[0]}x{size[1]}")
        code = direction_code(direction) if use_direction else NO_DIRECTION
        for x, y, left, below, below_left in l_shaped_cells(grid.rows, border_symbol):
            table.observe(LContext(left, below, below_left, code), grid.rows[y][x])
    if size is None:
        raise EmptyTraining("no rooms to train the room model")
    table.freeze()
    return RoomModel(table, use_direction, size[0], size[1], border_symbol, empty_symbol)


def training_rooms(levels, room_type: RoomType | None = None) -> list[tuple[Room, Direction]]:
    """(room, direction) pairs from annotated levels, optionally of one type."""
    return [
        (room, room.direction)
        for level in levels
        for _, room in level.sequence.rooms
        if room_type is None or room.room_type is room_type
    ]


def train_ensemble(levels, border_symbol: str = "%", empty_symbol: str = "-") -> RoomEnsemble:
    return RoomEnsemble(
        train_room_model(training_rooms(levels, RoomType.HORIZONTAL), True, border_symbol, empty_symbol),
        train_room_model(training_rooms(levels, RoomType.VERTICAL), True, border_symbol, empty_symbol),
    )


def generate_room(model: RoomModel, direction: Direction | None, rng: np.random.Generator) -> TileGrid:
    """Sample a room bottom row first, left to right within each row.

    Cells whose context never occurred in training become the empty tile.
    """
    w, h, border = model.width, model.height, model.border_symbol
    code = direction_code(direction) if model.uses_direction else NO_DIRECTION
    table, empty = model.table, model.empty_symbol
    rows: list[list[str]] = [[""] * w for _ in range(h)]
    for y in range(h - 1, -1, -1):
        row = rows[y]
        under = rows[y + 1] if y + 1 < h else None
        for x in range(w):
            ctx = (
                row[x - 1] if x else border,
                under[x] if under is not None else border,
                under[x - 1] if under is not None and x else border,
                code,
            )
            tile = table.sample(ctx, rng)
            row[x] = empty if tile is None else tile
    return TileGrid(tuple("".join(r) for r in rows))


class CpdDifference(NamedTuple):
    total: float
    mean: float
    entries: int

    def __add__(self, other: CpdDifference) -> CpdDifference:
        total = self.total + other.total
        entries = self.entries + other.entries
        return CpdDifference(total, total / entries if entries else 0.0, entries)


def room_cpd_difference(a: RoomModel, b: RoomModel) -> CpdDifference:
    """Sum of squared probability differences over the contexts of ``b``.

    ``b`` is the reference model (trained on the withheld level). For each of
    its contexts every outcome seen under that context in either model counts
    as one entry.
    """
    if a.uses_direction != b.uses_direction:
        raise ValueError("cannot compare models with and without the direction node")
    if not len(b.table):
        raise NoSharedStructure("reference model has no contexts")
    total = 0.0
    entries = 0
    for ctx in b.table.contexts():
        outcomes = set(b.table.outcomes(ctx)) | set(a.table.outcomes(ctx))
        for outcome in sorted(outcomes):
            diff = a.table.probability(ctx, outcome) - b.table.probability(ctx, outcome)
            total += diff * diff
            entries += 1
    return CpdDifference(total, total / entries, entries)
