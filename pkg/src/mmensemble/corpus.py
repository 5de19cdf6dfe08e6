"""VGLC level parsing, room segmentation and game-path annotation.

Levels are stored as plain text, one row per line, top row first. A level is
cut into fixed-size rooms (16 wide, 15 tall for Mega Man) and the rooms on the
game path are typed from how the path enters and leaves them:

* entered from the left and left to the right  -> Horizontal
* any entrance or exit through the top/bottom  -> Vertical
* not on the path                              -> Null

The path itself comes from a sidecar file next to each level (``<stem>.path``)
listing ``col,row`` room coordinates, origin at the top-left room.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import yaml

from .errors import (
    BrokenPath,
    EmptyCorpus,
    EmptyInput,
    MissingSidecar,
    NonDivisibleDimensions,
    OutOfBounds,
    RaggedRows,
    RevisitedRoom,
    UnknownSymbol,
    UnsupportedDirection,
    DataError,
    ConfigError,
)

logger = logging.getLogger(__name__)

Coord = tuple[int, int]  # (col, row), row grows downward

LEVEL_SUFFIX = ".txt"
SIDECAR_SUFFIX = ".path"
TILE_CLASSES = ("passable", "solid", "hazard", "climbable")


@dataclass(frozen=True)
class RoomSize:
    width: int = 16
    height: int = 15

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ConfigError(f"room size must be positive, got {self.width}x{self.height}")


MEGA_MAN_ROOM = RoomSize(16, 15)


@dataclass(frozen=True)
class TileGrid:
    """Rectangular grid of single-character tiles, stored as rows top to bottom."""

    rows: tuple[str, ...]

    def __post_init__(self):
        if not self.rows or not self.rows[0]:
            raise EmptyInput("tile grid needs at least one row and one column")
        expected = len(self.rows[0])
        for i, row in enumerate(self.rows):
            if len(row) != expected:
                raise RaggedRows(i, expected, len(row))

    @property
    def width(self) -> int:
        return len(self.rows[0])

    @property
    def height(self) -> int:
        return len(self.rows)

    def at(self, x: int, y: int) -> str:
        return self.rows[y][x]

    @property
    def cells(self) -> list[str]:
        """Row-major list of tile symbols."""
        return [c for row in self.rows for c in row]

    def symbols(self) -> set[str]:
        return set("".join(self.rows))

    def column(self, x: int) -> str:
        return "".join(row[x] for row in self.rows)

    def crop(self, x: int, y: int, width: int, height: int) -> TileGrid:
        return TileGrid(tuple(row[x:x + width] for row in self.rows[y:y + height]))

    def to_text(self) -> str:
        return "\n".join(self.rows) + "\n"

    @classmethod
    def filled(cls, width: int, height: int, symbol: str) -> TileGrid:
        return cls(tuple(symbol * width for _ in range(height)))

    @classmethod
    def from_rows(cls, rows: Iterable[str]) -> TileGrid:
        return cls(tuple(rows))

    @classmethod
    def stack(cls, blocks: Sequence[Sequence[TileGrid]]) -> TileGrid:
        """Concatenate a 2D array of equally sized blocks (indexed [row][col])."""
        rows: list[str] = []
        for block_row in blocks:
            for y in range(block_row[0].height):
                rows.append("".join(b.rows[y] for b in block_row))
        return cls(tuple(rows))


class RoomType(str, enum.Enum):
    HORIZONTAL = "H"
    VERTICAL = "V"
    NULL = "N"


class Direction(str, enum.Enum):
    """Travel direction towards the next room on the path."""

    UP = "U"
    DOWN = "D"
    RIGHT = "R"

    @property
    def offset(self) -> Coord:
        return _OFFSETS[self]


_OFFSETS = {Direction.UP: (0, -1), Direction.DOWN: (0, 1), Direction.RIGHT: (1, 0)}
_BY_OFFSET = {v: k for k, v in _OFFSETS.items()}


def direction_between(a: Coord, b: Coord) -> Direction:
    """Direction of travel from room ``a`` to the adjacent room ``b``."""
    delta = (b[0] - a[0], b[1] - a[1])
    if abs(delta[0]) + abs(delta[1]) != 1:
        raise BrokenPath(f"rooms {a} and {b} are not 4-adjacent")
    try:
        return _BY_OFFSET[delta]
    except KeyError:
        raise UnsupportedDirection(f"path moves left from {a} to {b}; levels must progress rightward") from None


@dataclass(frozen=True)
class TileAlphabet:
    symbols: frozenset[str]
    passable: frozenset[str]
    solid: frozenset[str]
    hazard: frozenset[str]
    climbable: frozenset[str]
    null_symbol: str = "@"
    border_symbol: str = "%"
    empty_symbol: str = "-"

    def __post_init__(self):
        classes = (self.passable, self.solid, self.hazard, self.climbable)
        union: set[str] = set()
        for cls in classes:
            if union & cls:
                raise ConfigError(f"tile classes overlap on {sorted(union & cls)}")
            union |= cls
        if union != set(self.symbols):
            raise ConfigError(f"tile classes do not cover {sorted(set(self.symbols) ^ union)}")
        for reserved in (self.null_symbol, self.border_symbol):
            if len(reserved) != 1:
                raise ConfigError(f"reserved symbol {reserved!r} must be one character")
            if reserved in self.symbols:
                raise ConfigError(f"reserved symbol {reserved!r} is also a tile")
        if self.null_symbol == self.border_symbol:
            raise ConfigError("null and border symbols must differ")
        if self.empty_symbol not in self.passable:
            raise ConfigError(f"empty symbol {self.empty_symbol!r} must be passable")

    @classmethod
    def from_mapping(cls, tiles: Mapping[str, str], null_symbol: str = "@",
                     border_symbol: str = "%", empty_symbol: str = "-") -> TileAlphabet:
        groups: dict[str, set[str]] = {name: set() for name in TILE_CLASSES}
        for symbol, klass in tiles.items():
            if len(symbol) != 1:
                raise ConfigError(f"tile symbol {symbol!r} must be one character")
            if klass not in groups:
                raise ConfigError(f"tile {symbol!r} has unknown class {klass!r}")
            groups[klass].add(symbol)
        return cls(
            symbols=frozenset(tiles),
            passable=frozenset(groups["passable"]),
            solid=frozenset(groups["solid"]),
            hazard=frozenset(groups["hazard"]),
            climbable=frozenset(groups["climbable"]),
            null_symbol=null_symbol,
            border_symbol=border_symbol,
            empty_symbol=empty_symbol,
        )

    @classmethod
    def load(cls, path: str | Path | None = None) -> TileAlphabet:
        """Read an alphabet config; ``None`` loads the bundled Mega Man table."""
        if path is None:
            text = resources.files("mmensemble").joinpath("data/alphabet.yaml").read_text()
        else:
            try:
                text = Path(path).read_text()
            except OSError as exc:
                raise ConfigError(f"cannot read alphabet config {path}: {exc}") from exc
        doc = yaml.safe_load(text)
        if not isinstance(doc, dict) or "tiles" not in doc:
            raise ConfigError("alphabet config needs a 'tiles' mapping")
        return cls.from_mapping(
            {str(k): str(v) for k, v in doc["tiles"].items()},
            null_symbol=doc.get("null_symbol", "@"),
            border_symbol=doc.get("border_symbol", "%"),
            empty_symbol=doc.get("empty_symbol", "-"),
        )

    def is_open(self, symbol: str) -> bool:
        """Tiles the player body may occupy."""
        return symbol in self.passable or symbol in self.climbable

    def validate(self, grid: TileGrid, source: str | None = None) -> None:
        allowed = self.symbols | {self.null_symbol}
        for symbol in sorted(grid.symbols() - allowed):
            raise UnknownSymbol(symbol, source)


@dataclass(frozen=True)
class Room:
    grid: TileGrid
    room_type: RoomType
    direction: Direction | None = None

    def __post_init__(self):
        if self.room_type is RoomType.NULL:
            if self.direction is not None:
                raise ValueError("null rooms carry no direction")
        elif self.direction is None:
            raise ValueError("playable rooms need a travel direction")
        if self.room_type is RoomType.HORIZONTAL and self.direction is not Direction.RIGHT:
            raise ValueError("horizontal rooms always travel right")


@dataclass(frozen=True)
class RoomSequence:
    """The game path: ordered (room coordinate, room) pairs."""

    rooms: tuple[tuple[Coord, Room], ...]

    def __post_init__(self):
        seen: set[Coord] = set()
        for i, (coord, room) in enumerate(self.rooms):
            if room.room_type is RoomType.NULL:
                raise ValueError(f"null room at {coord} on the game path")
            if coord in seen:
                raise RevisitedRoom(f"room {coord} appears twice on the path")
            seen.add(coord)
            if i:
                prev = self.rooms[i - 1][0]
                if abs(prev[0] - coord[0]) + abs(prev[1] - coord[1]) != 1:
                    raise BrokenPath(f"rooms {prev} and {coord} are not adjacent")

    def __len__(self) -> int:
        return len(self.rooms)

    @property
    def types(self) -> list[RoomType]:
        return [room.room_type for _, room in self.rooms]

    @property
    def coords(self) -> list[Coord]:
        return [coord for coord, _ in self.rooms]

    def type_string(self) -> str:
        return "".join(t.value for t in self.types)


@dataclass(frozen=True)
class AnnotatedLevel:
    grid: TileGrid
    room_grid: tuple[tuple[Room, ...], ...]  # indexed [row][col]
    sequence: RoomSequence
    name: str = ""
    room_size: RoomSize = field(default=MEGA_MAN_ROOM)

    @property
    def path(self) -> list[Coord]:
        return self.sequence.coords

    @property
    def room_cols(self) -> int:
        return len(self.room_grid[0])

    @property
    def room_rows(self) -> int:
        return len(self.room_grid)

    def type_grid(self) -> list[str]:
        """Room type labels as strings, one per room row."""
        return ["".join(room.room_type.value for room in row) for row in self.room_grid]


def parse_level(text: str) -> TileGrid:
    """Parse VGLC level text. Trailing newlines are ignored; blank rows are not."""
    if not text or not text.strip("\r\n"):
        raise EmptyInput("level text is empty")
    lines = text.replace("\r\n", "\n").rstrip("\n").split("\n")
    return TileGrid(tuple(lines))


def segment(grid: TileGrid, size: RoomSize = MEGA_MAN_ROOM, pad: bool = False,
            null_symbol: str = "@") -> list[list[TileGrid]]:
    """Cut ``grid`` into rooms, returned as a [row][col] array.

    With ``pad`` the right and top edges are filled with ``null_symbol`` up to
    the next multiple of the room size instead of raising.
    """
    if pad:
        extra_w = -grid.width % size.width
        extra_h = -grid.height % size.height
        if extra_w or extra_h:
            width = grid.width + extra_w
            rows = [null_symbol * width] * extra_h + [row + null_symbol * extra_w for row in grid.rows]
            grid = TileGrid(tuple(rows))
    if grid.width % size.width:
        raise NonDivisibleDimensions("width", grid.width, size.width)
    if grid.height % size.height:
        raise NonDivisibleDimensions("height", grid.height, size.height)
    return [
        [grid.crop(c * size.width, r * size.height, size.width, size.height)
         for c in range(grid.width // size.width)]
        for r in range(grid.height // size.height)
    ]


def _check_path(path: Sequence[Coord], cols: int, rows: int) -> None:
    if not path:
        raise BrokenPath("game path is empty")
    seen: set[Coord] = set()
    for i, (c, r) in enumerate(path):
        if not (0 <= c < cols and 0 <= r < rows):
            raise OutOfBounds(f"room ({c},{r}) outside the {cols}x{rows} room grid")
        if (c, r) in seen:
            raise RevisitedRoom(f"room ({c},{r}) appears twice on the path")
        seen.add((c, r))
        if i:
            direction_between(path[i - 1], (c, r))


def annotate(chunks: Sequence[Sequence[TileGrid]], path: Sequence[Coord],
             null_symbol: str = "@", name: str = "") -> AnnotatedLevel:
    """Type every chunk from the game path and build the room sequence."""
    rows, cols = len(chunks), len(chunks[0])
    path = [tuple(p) for p in path]
    _check_path(path, cols, rows)
    room_w, room_h = chunks[0][0].width, chunks[0][0].height

    moves = [direction_between(path[i], path[i + 1]) for i in range(len(path) - 1)]
    placed: dict[Coord, Room] = {}
    for i, coord in enumerate(path):
        # first room is entered from the left, last room exits right
        entered_right = i == 0 or moves[i - 1] is Direction.RIGHT
        exit_dir = moves[i] if i < len(moves) else Direction.RIGHT
        horizontal = entered_right and exit_dir is Direction.RIGHT
        room_type = RoomType.HORIZONTAL if horizontal else RoomType.VERTICAL
        placed[coord] = Room(chunks[coord[1]][coord[0]], room_type, exit_dir)

    null_grid = TileGrid.filled(room_w, room_h, null_symbol)
    null_room = Room(null_grid, RoomType.NULL)
    room_grid = tuple(
        tuple(placed.get((c, r), null_room) for c in range(cols)) for r in range(rows)
    )
    sequence = RoomSequence(tuple((coord, placed[coord]) for coord in path))
    full = TileGrid.stack(chunks)
    return AnnotatedLevel(full, room_grid, sequence, name, RoomSize(room_w, room_h))


def parse_sidecar(text: str) -> list[Coord]:
    """Read ``col,row`` lines; blank lines and ``;`` comments are skipped."""
    path: list[Coord] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        try:
            col, row = (int(v) for v in line.split(","))
        except ValueError:
            raise DataError(f"line {lineno}: expected 'col,row', got {raw!r}") from None
        path.append((col, row))
    return path


def format_sidecar(path: Iterable[Coord]) -> str:
    return "".join(f"{c},{r}\n" for c, r in path)


@dataclass(frozen=True)
class Corpus:
    levels: tuple[AnnotatedLevel, ...]
    alphabet: TileAlphabet
    observed_symbols: frozenset[str]

    def __len__(self) -> int:
        return len(self.levels)

    def names(self) -> list[str]:
        return [lvl.name for lvl in self.levels]

    def split(self, test_name: str) -> tuple[list[AnnotatedLevel], AnnotatedLevel]:
        """Return (training levels, withheld level) for the named file."""
        stem = Path(test_name).stem
        matches = [lvl for lvl in self.levels if lvl.name == stem]
        if not matches:
            raise ConfigError(f"test level {test_name} not found in corpus")
        return [lvl for lvl in self.levels if lvl.name != stem], matches[0]


def load_level(level_file: Path, alphabet: TileAlphabet, size: RoomSize = MEGA_MAN_ROOM,
               pad: bool = False) -> AnnotatedLevel:
    sidecar = level_file.with_suffix(SIDECAR_SUFFIX)
    if not sidecar.exists():
        raise MissingSidecar(level_file.name)
    try:
        grid = parse_level(level_file.read_text())
        alphabet.validate(grid, level_file.name)
        chunks = segment(grid, size, pad=pad, null_symbol=alphabet.null_symbol)
        return annotate(chunks, parse_sidecar(sidecar.read_text()),
                        null_symbol=alphabet.null_symbol, name=level_file.stem)
    except DataError as exc:
        exc.filename = level_file.name
        if level_file.name not in str(exc):
            exc.args = (f"{level_file.name}: {exc}",)
        raise


def synthetic_corpus_dir() -> Path:
    """Directory of the bundled three-level synthetic corpus."""
    return Path(str(resources.files("mmensemble").joinpath("data/synthetic")))


def load_corpus(directory: str | Path, alphabet: TileAlphabet | None = None,
                size: RoomSize = MEGA_MAN_ROOM, pad: bool = False) -> Corpus:
    """Load every ``*.txt`` level in ``directory`` together with its path sidecar."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ConfigError(f"corpus directory {directory} does not exist")
    alphabet = alphabet or TileAlphabet.load()
    files = sorted(directory.glob("*" + LEVEL_SUFFIX))
    if not files:
        raise EmptyCorpus(f"no level files in {directory}")
    levels = tuple(load_level(f, alphabet, size, pad) for f in files)
    observed = frozenset().union(*(lvl.grid.symbols() for lvl in levels)) - {alphabet.null_symbol}
    logger.info("loaded %d levels from %s (%d tile symbols)", len(levels), directory, len(observed))
    return Corpus(levels, alphabet, observed)
