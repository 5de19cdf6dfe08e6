"""Tile-scale A* playability check for Mega Man style levels.

The player is one tile wide and two tiles tall; its position is the tile its
feet occupy. Both body tiles must be passable or climbable. A state is either
*supported* (standing on a solid/climbable tile, or holding a ladder) or
*airborne* with a remaining rise budget and horizontal budget.

Moves, all with unit cost:

supported
    walk one tile left/right (walking off a ledge starts a fall), climb
    up/down ladders, jump to any of the three tiles above, and let go of a
    ladder (fall moves).
airborne
    rise to one of the three tiles above while rise budget remains, move
    sideways while horizontal budget remains, or fall to one of the three
    tiles below (one tile of drift per tile fallen). Falling spends the
    whole jump.

Any move that ends on a supported tile lands. Hazard and null tiles are never
entered, so a level whose only route crosses spikes is reported unplayable;
the verdict is a lower bound on what a human could finish.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

from .corpus import Coord, RoomSize, TileAlphabet, TileGrid
from .errors import ConfigError, NoStartTile

SUPPORTED = -1


@dataclass(frozen=True)
class JumpModel:
    max_rise: int = 4
    max_horizontal: int = 5

    def __post_init__(self):
        if self.max_rise < 1 or self.max_horizontal < 1:
            raise ConfigError("jump budgets must be at least one tile")


class AgentState(NamedTuple):
    x: int
    y: int
    rise: int = SUPPORTED
    horizontal: int = SUPPORTED

    @property
    def supported(self) -> bool:
        return self.rise == SUPPORTED


@dataclass
class PlayabilityVerdict:
    playable: bool
    path: list[AgentState] | None = None
    nodes_expanded: int = 0
    start: AgentState | None = None

    @property
    def cost(self) -> int | None:
        return len(self.path) - 1 if self.path else None

    def coords(self) -> list[Coord]:
        return [(s.x, s.y) for s in self.path or []]


class Terrain:
    """Per-tile movement predicates for one grid."""

    def __init__(self, grid: TileGrid, alphabet: TileAlphabet):
        w, h = grid.width, grid.height
        self.width, self.height = w, h
        open_ = [[alphabet.is_open(c) for c in row] for row in grid.rows]
        climb = [[c in alphabet.climbable for c in row] for row in grid.rows]
        solid = [[c in alphabet.solid for c in row] for row in grid.rows]
        self.climbable = climb
        self.solid = solid
        # body fits with feet at (x, y) and head at (x, y - 1)
        self.body = [[y >= 1 and open_[y][x] and open_[y - 1][x] for x in range(w)] for y in range(h)]
        self.stands = [
            [y + 1 < h and (solid[y + 1][x] or climb[y + 1][x]) for x in range(w)] for y in range(h)
        ]
        self.supported = [
            [self.body[y][x] and (climb[y][x] or self.stands[y][x]) for x in range(w)] for y in range(h)
        ]

    def fits(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height and self.body[y][x]


def successors(terrain: Terrain, state: AgentState, jump: JumpModel) -> Iterator[AgentState]:
    x, y, rise, horiz = state
    fits = terrain.fits
    supported = terrain.supported

    def land(nx: int, ny: int, r: int, h: int) -> AgentState:
        if supported[ny][nx]:
            return AgentState(nx, ny)
        return AgentState(nx, ny, r, h)

    if rise == SUPPORTED:
        for dx in (-1, 1):
            if fits(x + dx, y):
                yield land(x + dx, y, 0, 0)
        on_ladder = terrain.climbable[y][x]
        if fits(x, y - 1) and (on_ladder or terrain.climbable[y - 1][x]):
            yield land(x, y - 1, 0, 0)
        if y + 1 < terrain.height and terrain.climbable[y + 1][x] and fits(x, y + 1):
            yield land(x, y + 1, 0, 0)
        for dx in (-1, 0, 1):
            if fits(x + dx, y - 1):
                yield land(x + dx, y - 1, jump.max_rise - 1, jump.max_horizontal - abs(dx))
        if on_ladder and not terrain.stands[y][x]:
            for dx in (-1, 0, 1):
                if fits(x + dx, y + 1):
                    yield land(x + dx, y + 1, 0, 0)
        return

    if rise > 0:
        for dx in (-1, 0, 1):
            if horiz >= abs(dx) and fits(x + dx, y - 1):
                yield land(x + dx, y - 1, rise - 1, horiz - abs(dx))
    if horiz > 0:
        for dx in (-1, 1):
            if fits(x + dx, y):
                yield land(x + dx, y, rise, horiz - 1)
    for dx in (-1, 0, 1):
        if fits(x + dx, y + 1):
            yield land(x + dx, y + 1, 0, 0)


Rect = tuple[int, int, int, int]  # x0, y0, x1, y1 inclusive


def room_rect(room: Coord, size: RoomSize) -> Rect:
    c, r = room
    return c * size.width, r * size.height, (c + 1) * size.width - 1, (r + 1) * size.height - 1


def start_tile(terrain: Terrain, rect: Rect) -> AgentState:
    """Leftmost column with a standing spot on solid ground; lowest spot in it."""
    x0, y0, x1, y1 = rect
    for x in range(x0, x1 + 1):
        for y in range(y1, y0 - 1, -1):
            if terrain.body[y][x] and y + 1 < terrain.height and terrain.solid[y + 1][x]:
                return AgentState(x, y)
    raise NoStartTile(f"no supported standing tile in room rect {rect}")


def find_path(terrain: Terrain, start: AgentState, goal: Rect, jump: JumpModel,
              max_nodes: int | None = None) -> PlayabilityVerdict:
    """A* from ``start`` until any state with feet inside ``goal``."""
    gx0, gy0, gx1, gy1 = goal

    def heuristic(x: int, y: int) -> int:
        dx = max(gx0 - x, 0, x - gx1)
        dy = max(gy0 - y, 0, y - gy1)
        return dx if dx > dy else dy

    tie = itertools.count()
    best = {start: 0}
    parent: dict[AgentState, AgentState | None] = {start: None}
    frontier = [(heuristic(start.x, start.y), 0, next(tie), start)]
    expanded = 0
    while frontier:
        _, g, _, state = heapq.heappop(frontier)
        if g > best[state]:
            continue
        if gx0 <= state.x <= gx1 and gy0 <= state.y <= gy1:
            path = [state]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return PlayabilityVerdict(True, path[::-1], expanded, start)
        expanded += 1
        if max_nodes is not None and expanded > max_nodes:
            break
        for nxt in successors(terrain, state, jump):
            ng = g + 1
            if ng < best.get(nxt, ng + 1):
                best[nxt] = ng
                parent[nxt] = state
                heapq.heappush(frontier, (ng + heuristic(nxt.x, nxt.y), ng, next(tie), nxt))
    return PlayabilityVerdict(False, None, expanded, start)


def check_playable(level, jump: JumpModel, alphabet: TileAlphabet,
                   max_nodes: int | None = None) -> PlayabilityVerdict:
    """Run the agent from the first path room to the last one.

    ``level`` is anything with ``grid``, ``path`` (room coordinates) and
    ``room_size``: an :class:`~mmensemble.corpus.AnnotatedLevel` or a
    :class:`~mmensemble.assembler.GeneratedLevel`.
    """
    if not level.path:
        return PlayabilityVerdict(False)
    terrain = Terrain(level.grid, alphabet)
    start = start_tile(terrain, room_rect(level.path[0], level.room_size))
    return find_path(terrain, start, room_rect(level.path[-1], level.room_size), jump, max_nodes)


def estimate_jump_model(grid: TileGrid, player_path: Sequence[Coord], alphabet: TileAlphabet,
                        floor: JumpModel = JumpModel(1, 1)) -> JumpModel:
    """Estimate jump budgets from an annotated player path.

    The path is split into airborne stretches (feet neither standing nor on a
    ladder). The rise budget is the largest climb within a stretch, the
    horizontal budget the widest horizontal span of one.
    """
    terrain = Terrain(grid, alphabet)
    max_rise, max_span = floor.max_rise, floor.max_horizontal
    segment: list[Coord] = []

    def close(seg: list[Coord], takeoff: Coord | None):
        nonlocal max_rise, max_span
        if not seg:
            return
        pts = ([takeoff] if takeoff else []) + seg
        ys = [p[1] for p in pts]
        xs = [p[0] for p in pts]
        max_rise = max(max_rise, pts[0][1] - min(ys))
        max_span = max(max_span, max(xs) - min(xs))

    takeoff: Coord | None = None
    for x, y in player_path:
        grounded = terrain.stands[y][x] or terrain.climbable[y][x]
        if grounded:
            close(segment, takeoff)
            segment = []
            takeoff = (x, y)
        else:
            segment.append((x, y))
    close(segment, takeoff)
    return JumpModel(max_rise, max_span)
