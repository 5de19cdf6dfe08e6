"""Turn room-type sequences into levels.

Layout planning puts the first room at the origin and places each following
room relative to its predecessor: horizontal rooms go to the right, vertical
rooms go up or down (chosen uniformly among free cells; Right can be enabled
as an extra candidate). Room
interiors are then sampled in path order, and a fresh room is resampled while
the seam to its predecessor is closed, up to a per-level cap.

Plane coordinates use screen orientation: ``(0, -1)`` is above ``(0, 0)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .corpus import Coord, Direction, RoomSize, RoomType, TileAlphabet, TileGrid, direction_between
from .room import RoomEnsemble, RoomModel, generate_room

DEFAULT_RESAMPLE_CAP = 70

VERTICAL_CHOICES = (Direction.UP, Direction.DOWN)
VERTICAL_CHOICES_WITH_RIGHT = (Direction.UP, Direction.DOWN, Direction.RIGHT)


@dataclass(frozen=True)
class Placement:
    coord: Coord
    room_type: RoomType
    direction: Direction


@dataclass(frozen=True)
class LevelLayout:
    placements: tuple[Placement, ...]

    def __post_init__(self):
        if not self.placements:
            raise ValueError("layout needs at least one room")
        coords = [p.coord for p in self.placements]
        if len(set(coords)) != len(coords):
            raise ValueError("layout places two rooms on one coordinate")
        for a, b in zip(self.placements, self.placements[1:]):
            if direction_between(a.coord, b.coord) is not a.direction:
                raise ValueError(f"room at {a.coord} does not point at its successor {b.coord}")
        if self.placements[-1].direction is not Direction.RIGHT:
            raise ValueError("last room must travel right")

    @property
    def coords(self) -> list[Coord]:
        return [p.coord for p in self.placements]

    @property
    def occupancy(self) -> set[Coord]:
        return set(self.coords)

    @property
    def bounding_box(self) -> tuple[int, int, int, int]:
        """(min_col, min_row, max_col, max_row) in plane coordinates."""
        xs = [c[0] for c in self.coords]
        ys = [c[1] for c in self.coords]
        return min(xs), min(ys), max(xs), max(ys)

    @property
    def shape(self) -> tuple[int, int]:
        """(room columns, room rows) of the bounding box."""
        x0, y0, x1, y1 = self.bounding_box
        return x1 - x0 + 1, y1 - y0 + 1

    def room_coords(self) -> list[Coord]:
        """Placement coordinates shifted so the bounding box starts at (0, 0)."""
        x0, y0, _, _ = self.bounding_box
        return [(x - x0, y - y0) for x, y in self.coords]

    @property
    def types(self) -> list[RoomType]:
        return [p.room_type for p in self.placements]


@dataclass(frozen=True)
class SelfCollision:
    """Planning stopped because every candidate cell was occupied."""

    types: tuple[RoomType, ...]
    index: int
    coords: tuple[Coord, ...]


def plan_layout(types: Sequence[RoomType], rng: np.random.Generator,
                vertical_choices: Sequence[Direction] = VERTICAL_CHOICES) -> LevelLayout | SelfCollision:
    """Place rooms on the plane; ``SelfCollision`` if some room has no free cell.

    A vertical room placed to the right would be entered from the left and,
    when followed by a right move, look like a horizontal room that the
    vertical model never saw, hence the up/down default.
    """
    if not types:
        raise ValueError("cannot plan an empty room sequence")
    coords: list[Coord] = [(0, 0)]
    occupied = {(0, 0)}
    for i in range(1, len(types)):
        x, y = coords[-1]
        if types[i] is RoomType.HORIZONTAL:
            candidates = [Direction.RIGHT]
        elif types[i] is RoomType.VERTICAL:
            candidates = list(vertical_choices)
        else:
            raise ValueError("null rooms cannot be planned")
        free = [d for d in candidates if (x + d.offset[0], y + d.offset[1]) not in occupied]
        if not free:
            return SelfCollision(tuple(types), i, tuple(coords))
        d = free[int(rng.integers(len(free)))] if len(free) > 1 else free[0]
        nxt = (x + d.offset[0], y + d.offset[1])
        coords.append(nxt)
        occupied.add(nxt)
    directions = [direction_between(a, b) for a, b in zip(coords, coords[1:])] + [Direction.RIGHT]
    return LevelLayout(tuple(Placement(c, t, d) for c, t, d in zip(coords, types, directions)))


def seam_open(a: TileGrid, b: TileGrid, relation: Direction, alphabet: TileAlphabet) -> bool:
    """Whether the player can cross from room ``a`` into neighbour ``b``.

    Side seams need a two-tile-tall opening aligned on both sides; top and
    bottom seams need one aligned open column.
    """
    is_open = alphabet.is_open
    if relation is Direction.RIGHT:
        right = [is_open(c) for c in a.column(a.width - 1)]
        left = [is_open(c) for c in b.column(0)]
        both = [p and q for p, q in zip(right, left)]
        return any(both[r] and both[r + 1] for r in range(len(both) - 1))
    if relation is Direction.UP:
        edge_a, edge_b = a.rows[0], b.rows[-1]
    elif relation is Direction.DOWN:
        edge_a, edge_b = a.rows[-1], b.rows[0]
    else:
        raise ValueError(f"unsupported seam relation {relation!r}")
    return any(is_open(p) and is_open(q) for p, q in zip(edge_a, edge_b))


RoomSampler = Callable[[Placement, np.random.Generator], TileGrid]


def model_sampler(models: RoomEnsemble | RoomModel) -> RoomSampler:
    """Room sampler for an ensemble (picked by room type) or a single model.

    Horizontal rooms are always generated with the Right direction, the only
    value their training data carries.
    """
    def sample(placement: Placement, rng: np.random.Generator) -> TileGrid:
        model = models.model_for(placement.room_type) if isinstance(models, RoomEnsemble) else models
        direction = Direction.RIGHT if placement.room_type is RoomType.HORIZONTAL else placement.direction
        return generate_room(model, direction, rng)
    return sample


def room_size_of(models: RoomEnsemble | RoomModel) -> RoomSize:
    model = models.horizontal if isinstance(models, RoomEnsemble) else models
    return RoomSize(model.width, model.height)


@dataclass
class GeneratedLevel:
    layout: LevelLayout | None
    grid: TileGrid
    rooms: dict[Coord, TileGrid]  # keyed by room coordinates in ``grid``
    path: list[Coord]  # game path in room coordinates of ``grid``
    room_size: RoomSize
    resample_count: int = 0
    capped: bool = False
    seed: int = 0
    index: int = 0
    plan: object = None  # LevelLayout, SelfCollision or room-label rows
    notes: dict = field(default_factory=dict)

    def sidecar(self) -> dict:
        doc = {
            "seed": self.seed,
            "index": self.index,
            "resample_count": self.resample_count,
            "capped": self.capped,
            "room_size": [self.room_size.width, self.room_size.height],
            "grid_rooms": [self.grid.width // self.room_size.width, self.grid.height // self.room_size.height],
            "path": [list(c) for c in self.path],
            "placements": [],
        }
        if self.layout is not None:
            doc["placements"] = [
                {"plane": list(p.coord), "room": list(rc), "type": p.room_type.value, "direction": p.direction.value}
                for p, rc in zip(self.layout.placements, self.layout.room_coords())
            ]
        doc.update(self.notes)
        return doc

    def sidecar_text(self) -> str:
        return json.dumps(self.sidecar(), indent=1, sort_keys=True) + "\n"


def compose_grid(rooms: Mapping[Coord, TileGrid], shape: tuple[int, int], size: RoomSize,
                 null_symbol: str) -> TileGrid:
    """Lay rooms out on a ``shape`` = (cols, rows) room grid; gaps become null rooms."""
    null_room = TileGrid.filled(size.width, size.height, null_symbol)
    cols, rows = shape
    return TileGrid.stack([[rooms.get((c, r), null_room) for c in range(cols)] for r in range(rows)])


def seam_between(a: TileGrid, a_coord: Coord, b: TileGrid, b_coord: Coord, alphabet: TileAlphabet) -> bool:
    """``seam_open`` for two 4-adjacent rooms given by their coordinates (any side)."""
    dx, dy = b_coord[0] - a_coord[0], b_coord[1] - a_coord[1]
    if (dx, dy) == (-1, 0):
        return seam_open(b, a, Direction.RIGHT, alphabet)
    return seam_open(a, b, direction_between(a_coord, b_coord), alphabet)


def fill_path(coords: Sequence[Coord], sample: Callable[[int, np.random.Generator], TileGrid],
              rngs: Callable[[int], np.random.Generator], alphabet: TileAlphabet,
              resample_cap: int = DEFAULT_RESAMPLE_CAP) -> tuple[list[TileGrid], int, bool]:
    """Sample rooms in path order with seam resampling.

    Returns (room grids, resample count, capped). Only the newest room is
    ever resampled; once the level-wide budget is spent rooms are kept as
    sampled and the level is marked capped.
    """
    if resample_cap < 0:
        raise ValueError("resample cap must be non-negative")
    grids: list[TileGrid] = []
    count = 0
    capped = False
    for i, coord in enumerate(coords):
        rng = rngs(i)
        grid = sample(i, rng)
        if i:
            while not seam_between(grids[-1], coords[i - 1], grid, coord, alphabet):
                if count >= resample_cap:
                    capped = True
                    break
                count += 1
                grid = sample(i, rng)
        grids.append(grid)
    return grids, count, capped


def _rng_factory(rng) -> Callable[[int], np.random.Generator]:
    if isinstance(rng, np.random.Generator):
        return lambda _i: rng
    return rng


def assemble(layout: LevelLayout, models: RoomEnsemble | RoomModel | RoomSampler,
             rng: np.random.Generator | Callable[[int], np.random.Generator],
             alphabet: TileAlphabet, resample_cap: int = DEFAULT_RESAMPLE_CAP,
             room_size: RoomSize | None = None, seed: int = 0, index: int = 0) -> GeneratedLevel:
    """Fill ``layout`` with rooms and compose the level grid.

    ``rng`` is a single generator shared by all rooms, or a callable mapping
    the room index to its own generator. ``models`` may also be a bare
    sampler callable (used for scripted tests); then ``room_size`` is needed.
    """
    if callable(models) and not isinstance(models, (RoomEnsemble, RoomModel)):
        sampler = models
        if room_size is None:
            raise ValueError("room_size is required with a custom sampler")
    else:
        sampler = model_sampler(models)
        room_size = room_size or room_size_of(models)
    placements = layout.placements
    grids, count, capped = fill_path(
        layout.coords, lambda i, r: sampler(placements[i], r), _rng_factory(rng), alphabet, resample_cap
    )
    coords = layout.room_coords()
    rooms = dict(zip(coords, grids))
    grid = compose_grid(rooms, layout.shape, room_size, alphabet.null_symbol)
    return GeneratedLevel(layout, grid, rooms, coords, room_size, count, capped, seed, index, plan=layout)
