"""Exception hierarchy shared across the package."""

from __future__ import annotations


class LevelGenError(Exception):
    """Base class for every error raised by mmensemble."""


class DataError(LevelGenError):
    """Problems with corpus contents or trained models."""


class ConfigError(LevelGenError):
    """Problems with user supplied configuration."""


class EmptyInput(DataError):
    pass


class RaggedRows(DataError):
    def __init__(self, row: int, expected: int, got: int):
        self.row, self.expected, self.got = row, expected, got
        super().__init__(f"row {row} has {got} tiles, expected {expected}")


class NonDivisibleDimensions(DataError):
    def __init__(self, axis: str, size: int, chunk: int):
        self.axis, self.size, self.chunk = axis, size, chunk
        super().__init__(f"{axis} {size} is not divisible by room {axis} {chunk}")


class UnknownSymbol(DataError):
    def __init__(self, symbol: str, source: str | None = None):
        self.symbol, self.source = symbol, source
        where = f" in {source}" if source else ""
        super().__init__(f"tile symbol {symbol!r}{where} is not in the alphabet")


class AnnotationError(DataError):
    """Invalid room path annotation."""


class BrokenPath(AnnotationError):
    pass


class RevisitedRoom(AnnotationError):
    pass


class OutOfBounds(AnnotationError):
    pass


class UnsupportedDirection(AnnotationError):
    pass


class MissingSidecar(DataError):
    def __init__(self, level_file: str):
        self.level_file = level_file
        super().__init__(f"no path sidecar found for level file {level_file}")


class EmptyCorpus(DataError):
    pass


class EmptyTraining(DataError):
    pass


class DeadEnd(DataError):
    pass


class NoSharedStructure(DataError):
    pass


class NoStartTile(DataError):
    pass


class FrozenTableError(LevelGenError):
    pass
