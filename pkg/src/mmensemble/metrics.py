"""Training, batch generation and the five evaluation metrics for all approaches."""

from __future__ import annotations

import enum
import logging
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Sequence

from . import __version__
from .agent import JumpModel, check_playable
from .assembler import (
    DEFAULT_RESAMPLE_CAP,
    VERTICAL_CHOICES,
    GeneratedLevel,
    LevelLayout,
    SelfCollision,
    assemble,
    compose_grid,
    plan_layout,
)
from .corpus import AnnotatedLevel, Direction, RoomSize, RoomType, TileAlphabet
from .errors import NoStartTile, NoSharedStructure
from .hierarchical import (
    HierarchicalModel,
    build_hierarchical_baseline,
    endpoints,
    generate_hierarchical_level,
    non_null,
    room_grid_probability,
)
from .room import (
    CpdDifference,
    RoomEnsemble,
    RoomModel,
    room_cpd_difference,
    train_ensemble,
    train_room_model,
    training_rooms,
)
from .seeding import layout_stream, room_stream
from .sequence import RoomTypeChain, generate_sequence, sequence_probability, train_high

logger = logging.getLogger(__name__)


class Approach(str, enum.Enum):
    ENSEMBLE = "ensemble"
    SIMPLIFIED = "simplified"
    HIERARCHICAL = "hierarchical"

    @property
    def label(self) -> str:
        return _LABELS[self]


_LABELS = {
    Approach.HIERARCHICAL: "Simple Hierarchical MC",
    Approach.SIMPLIFIED: "Simplified (single MdMC)",
    Approach.ENSEMBLE: "Ensemble",
}


@dataclass
class TrainedApproach:
    approach: Approach
    alphabet: TileAlphabet
    sequence: RoomTypeChain | None = None
    rooms: RoomEnsemble | RoomModel | None = None
    hierarchical: HierarchicalModel | None = None

    def chains(self) -> dict[str, object]:
        """Named chains making up the approach, in a fixed order."""
        if self.approach is Approach.HIERARCHICAL:
            return {"layout_grid": self.hierarchical.layout, "room_all": self.hierarchical.rooms}
        out: dict[str, object] = {"sequence": self.sequence}
        if isinstance(self.rooms, RoomEnsemble):
            out["room_horizontal"] = self.rooms.horizontal
            out["room_vertical"] = self.rooms.vertical
        else:
            out["room_all"] = self.rooms
        return out

    @property
    def room_size(self) -> RoomSize:
        if self.hierarchical is not None:
            model = self.hierarchical.rooms
        elif isinstance(self.rooms, RoomEnsemble):
            model = self.rooms.horizontal
        else:
            model = self.rooms
        return RoomSize(model.width, model.height)


def train_approach(approach: Approach | str, levels: Sequence[AnnotatedLevel], alphabet: TileAlphabet) -> TrainedApproach:
    approach = Approach(approach)
    levels = list(levels)
    if approach is Approach.HIERARCHICAL:
        return TrainedApproach(approach, alphabet, hierarchical=build_hierarchical_baseline(levels, alphabet))
    chain = train_high(lvl.sequence for lvl in levels)
    if approach is Approach.ENSEMBLE:
        rooms = train_ensemble(levels, alphabet.border_symbol, alphabet.empty_symbol)
    else:
        rooms = train_room_model(training_rooms(levels), True, alphabet.border_symbol, alphabet.empty_symbol)
    return TrainedApproach(approach, alphabet, sequence=chain, rooms=rooms)


def generate_level(trained: TrainedApproach, index: int, rooms_per_level: int, seed: int,
                   resample_cap: int = DEFAULT_RESAMPLE_CAP,
                   forced_types: Sequence[RoomType] | None = None,
                   vertical_choices: Sequence[Direction] = VERTICAL_CHOICES) -> GeneratedLevel:
    """Level ``index`` of the batch under master ``seed``; independent of other levels."""
    rng = layout_stream(seed, index)
    room_rngs = lambda j: room_stream(seed, index, j)  # noqa: E731
    alphabet = trained.alphabet
    if trained.approach is Approach.HIERARCHICAL:
        return generate_hierarchical_level(trained.hierarchical, rooms_per_level, rng, room_rngs,
                                           alphabet, resample_cap, seed, index)
    types = list(forced_types) if forced_types else generate_sequence(trained.sequence, rooms_per_level, rng)
    layout = plan_layout(types, rng, vertical_choices)
    if isinstance(layout, SelfCollision):
        size = trained.room_size
        grid = compose_grid({}, (1, 1), size, alphabet.null_symbol)
        return GeneratedLevel(None, grid, {}, [], size, 0, False, seed, index, plan=layout,
                              notes={"self_collision": True})
    return assemble(layout, trained.rooms, room_rngs, alphabet, resample_cap, seed=seed, index=index)


def generate_batch(trained: TrainedApproach, batch_size: int, rooms_per_level: int, seed: int,
                   resample_cap: int = DEFAULT_RESAMPLE_CAP, jobs: int = 1,
                   forced_types: Sequence[RoomType] | None = None,
                   vertical_choices: Sequence[Direction] = VERTICAL_CHOICES) -> list[GeneratedLevel]:
    if batch_size < 1 or rooms_per_level < 1:
        raise ValueError("batch size and rooms per level must be positive")

    def one(i: int) -> GeneratedLevel:
        return generate_level(trained, i, rooms_per_level, seed, resample_cap, forced_types, vertical_choices)

    if jobs <= 1:
        return [one(i) for i in range(batch_size)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(one, range(batch_size)))


def rooms_connected(cells: set, starts: Iterable, ends: Iterable) -> bool:
    """Breadth-first search over 4-adjacent room cells."""
    goal = set(ends)
    seen = {s for s in starts if s in cells}
    queue = deque(seen)
    while queue:
        cur = queue.popleft()
        if cur in goal:
            return True
        x, y = cur
        for nxt in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if nxt in cells and nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return False


def layout_is_playable(plan) -> bool:
    """Whether a layout connects its start and end rooms through non-null rooms.

    ``plan`` is a :class:`LevelLayout` (start/end are the first/last
    placements), a :class:`SelfCollision` (never playable) or a grid of room
    labels (start: any leftmost room, end: any rightmost room).
    """
    if isinstance(plan, SelfCollision) or plan is None:
        return False
    if isinstance(plan, LevelLayout):
        coords = plan.coords
        return rooms_connected(set(coords), [coords[0]], [coords[-1]])
    starts, ends = endpoints(plan)
    return rooms_connected(non_null(plan), starts, ends)


def layout_playability(layouts: Sequence) -> float:
    if not layouts:
        raise ValueError("no layouts to score")
    plans = [lvl.plan if isinstance(lvl, GeneratedLevel) else lvl for lvl in layouts]
    return sum(layout_is_playable(p) for p in plans) / len(plans)


def level_is_playable(level: GeneratedLevel, jump: JumpModel, alphabet: TileAlphabet) -> bool:
    if not level.path:
        return False
    try:
        return check_playable(level, jump, alphabet).playable
    except NoStartTile:
        return False


def overall_playability(levels: Sequence[GeneratedLevel], jump: JumpModel, alphabet: TileAlphabet,
                        jobs: int = 1) -> float:
    if not levels:
        raise ValueError("no levels to score")
    if jobs <= 1:
        verdicts = [level_is_playable(lvl, jump, alphabet) for lvl in levels]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            verdicts = list(pool.map(lambda lvl: level_is_playable(lvl, jump, alphabet), levels))
    return sum(verdicts) / len(levels)


def mean_resampling(levels: Sequence[GeneratedLevel]) -> float:
    if not levels:
        raise ValueError("no levels to score")
    return sum(lvl.resample_count for lvl in levels) / len(levels)


def layout_similarity(trained: TrainedApproach, test_level: AnnotatedLevel) -> float:
    """Probability that the approach's layout model produces the test level's layout."""
    if trained.approach is Approach.HIERARCHICAL:
        return room_grid_probability(trained.hierarchical.layout, test_level.type_grid())
    return sequence_probability(trained.sequence, test_level.sequence)


def inverse_content_similarity(trained: TrainedApproach, test_level: AnnotatedLevel) -> CpdDifference | None:
    """Squared CPD difference between the room models and models of the test level.

    ``None`` for the hierarchical baseline. For the ensemble the horizontal and
    vertical comparisons are pooled (totals and entry counts summed).
    """
    alphabet = trained.alphabet
    if trained.approach is Approach.HIERARCHICAL:
        return None
    if trained.approach is Approach.SIMPLIFIED:
        reference = train_room_model(training_rooms([test_level]), True, alphabet.border_symbol, alphabet.empty_symbol)
        return room_cpd_difference(trained.rooms, reference)
    result = None
    for room_type in (RoomType.HORIZONTAL, RoomType.VERTICAL):
        rooms = training_rooms([test_level], room_type)
        if not rooms:
            continue
        reference = train_room_model(rooms, True, alphabet.border_symbol, alphabet.empty_symbol)
        diff = room_cpd_difference(trained.rooms.model_for(room_type), reference)
        result = diff if result is None else result + diff
    if result is None:
        raise NoSharedStructure("test level has no playable rooms")
    return result


@dataclass
class MetricsReport:
    approach: Approach
    layout_playability: float
    overall_playability: float
    mean_resampling: float
    layout_similarity: float
    inverse_content_similarity: CpdDifference | None
    batch_size: int
    rooms_per_level: int
    seed: int
    resample_cap: int = DEFAULT_RESAMPLE_CAP
    test_level: str = ""
    capped_levels: int = 0
    extra: dict = field(default_factory=dict)

    def to_dict(self, stamp: bool = True) -> dict:
        doc = asdict(self)
        doc["approach"] = self.approach.value
        ics = self.inverse_content_similarity
        doc["inverse_content_similarity"] = (
            None if ics is None else {"total": ics.total, "mean": ics.mean, "entries": ics.entries}
        )
        if stamp:
            doc["tool_version"] = __version__
            doc["generated_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> MetricsReport:
        ics = doc.get("inverse_content_similarity")
        fields = {k: v for k, v in doc.items() if k in cls.__dataclass_fields__}
        fields["approach"] = Approach(doc["approach"])
        fields["inverse_content_similarity"] = None if ics is None else CpdDifference(ics["total"], ics["mean"], ics["entries"])
        return cls(**fields)


@dataclass
class Evaluation:
    report: MetricsReport
    trained: TrainedApproach
    levels: list[GeneratedLevel]


def evaluate(approach: Approach | str, corpus_levels: Sequence[AnnotatedLevel], test_level: AnnotatedLevel,
             alphabet: TileAlphabet, batch_size: int = 50, rooms_per_level: int = 12, seed: int = 0,
             resample_cap: int = DEFAULT_RESAMPLE_CAP, jump: JumpModel = JumpModel(),
             jobs: int = 1, vertical_choices: Sequence[Direction] = VERTICAL_CHOICES,
             trained: TrainedApproach | None = None) -> Evaluation:
    """Train on ``corpus_levels`` (minus the test level), generate a batch and score it.

    A ``trained`` approach (e.g. loaded from a bundle) skips the training step.
    """
    approach = Approach(approach)
    if trained is None:
        training = [lvl for lvl in corpus_levels if lvl is not test_level and lvl.name != test_level.name]
        trained = train_approach(approach, training, alphabet)
    elif trained.approach is not approach:
        raise ValueError(f"bundle holds {trained.approach.value}, not {approach.value}")
    levels = generate_batch(trained, batch_size, rooms_per_level, seed, resample_cap, jobs,
                            vertical_choices=vertical_choices)
    report = MetricsReport(
        approach=approach,
        layout_playability=layout_playability(levels),
        overall_playability=overall_playability(levels, jump, alphabet, jobs),
        mean_resampling=mean_resampling(levels),
        layout_similarity=layout_similarity(trained, test_level),
        inverse_content_similarity=inverse_content_similarity(trained, test_level),
        batch_size=batch_size,
        rooms_per_level=rooms_per_level,
        seed=seed,
        resample_cap=resample_cap,
        test_level=test_level.name,
        capped_levels=sum(lvl.capped for lvl in levels),
    )
    logger.info("%s: %s", approach.value, report)
    return Evaluation(report, trained, levels)


TABLE_ORDER = (Approach.HIERARCHICAL, Approach.SIMPLIFIED, Approach.ENSEMBLE)


def comparison_table(reports: Sequence[MetricsReport]) -> str:
    """Aligned text table with one column per approach."""
    by_approach = {r.approach: r for r in reports}
    columns = [a for a in TABLE_ORDER if a in by_approach]

    def pct(v: float) -> str:
        return f"{100 * v:.1f}%"

    def sim(v: float) -> str:
        return "<0.1%" if v < 0.001 else pct(v)

    def ics(r: MetricsReport, part: str) -> str:
        d = r.inverse_content_similarity
        return "n/a" if d is None else f"{getattr(d, part):.6f}"

    rows = [
        ("Layout Playability", lambda r: pct(r.layout_playability)),
        ("Overall Playability", lambda r: pct(r.overall_playability)),
        ("Necessary Resampling", lambda r: f"{r.mean_resampling:.1f}"),
        ("Layout Similarity", lambda r: sim(r.layout_similarity)),
        ("Total Difference", lambda r: ics(r, "total")),
        ("Mean Difference", lambda r: ics(r, "mean")),
    ]
    table = [[""] + [a.label for a in columns]]
    table += [[name] + [fmt(by_approach[a]) for a in columns] for name, fmt in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(table[0]))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in table]
    return "\n".join(lines) + "\n"
