"""Command-line entry point: ``mmensemble {train,generate,evaluate,render,compare}``.

Settings come from built-in defaults, then an optional YAML config file
(``--config``), then ``MMENSEMBLE_OUTPUT_DIR`` (output directory only), then
command-line flags.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

import yaml

from .agent import JumpModel, check_playable
from .assembler import VERTICAL_CHOICES, VERTICAL_CHOICES_WITH_RIGHT
from .bundle import load_bundle, save_bundle
from .corpus import (
    MEGA_MAN_ROOM,
    Corpus,
    RoomSize,
    TileAlphabet,
    TileGrid,
    load_corpus,
    parse_level,
    parse_sidecar,
    synthetic_corpus_dir,
)
from .errors import ConfigError, DataError, LevelGenError, NoStartTile
from .metrics import Approach, MetricsReport, comparison_table, evaluate, generate_batch, train_approach
from .sequence import parse_sequence

logger = logging.getLogger("mmensemble")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_DATA = 3

OUTPUT_ENV = "MMENSEMBLE_OUTPUT_DIR"
ALL = "all"
DEFAULT_OVERLAY = "o"


@dataclass
class RunConfig:
    corpus_dir: Path | None = None  # None means the bundled synthetic corpus
    test_level: str | None = None
    approach: str = Approach.ENSEMBLE.value
    batch_size: int = 50
    rooms_per_level: int = 12
    seed: int = 0
    resample_cap: int = 70
    jump: JumpModel = field(default_factory=JumpModel)
    alphabet: Path | None = None
    output_dir: Path = Path("out")
    jobs: int = 1
    model_dir: Path | None = None
    force_sequence: str | None = None
    vertical_right: bool = False

    def validate(self) -> None:
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.rooms_per_level < 1:
            raise ConfigError(f"rooms_per_level must be >= 1, got {self.rooms_per_level}")
        if self.resample_cap < 0:
            raise ConfigError(f"resample_cap must be >= 0, got {self.resample_cap}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        if self.approach != ALL:
            try:
                Approach(self.approach)
            except ValueError:
                raise ConfigError(f"unknown approach {self.approach!r}") from None

    def approaches(self) -> list[Approach]:
        if self.approach == ALL:
            return list(Approach)
        return [Approach(self.approach)]

    @property
    def vertical_choices(self):
        return VERTICAL_CHOICES_WITH_RIGHT if self.vertical_right else VERTICAL_CHOICES


_PATH_FIELDS = {"corpus_dir", "alphabet", "output_dir", "model_dir"}


def _coerce(name: str, value):
    if value is None:
        return None
    if name in _PATH_FIELDS:
        return Path(value)
    return value


def load_config_file(path: Path) -> dict:
    try:
        doc = yaml.safe_load(Path(path).read_text()) or {}
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path} must be a mapping")
    known = {f.name for f in fields(RunConfig)}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown config keys in {path}: {', '.join(sorted(unknown))}")
    return doc


def build_config(args: argparse.Namespace, environ=os.environ) -> RunConfig:
    values: dict = {}
    if getattr(args, "config", None):
        values.update(load_config_file(args.config))
    jump = values.pop("jump", None) or {}
    if not isinstance(jump, dict):
        raise ConfigError("config key 'jump' must be a mapping with max_rise / max_horizontal")
    if environ.get(OUTPUT_ENV):
        values["output_dir"] = environ[OUTPUT_ENV]
    for f in fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None and f.name != "jump":
            values[f.name] = flag
    if getattr(args, "max_rise", None) is not None:
        jump["max_rise"] = args.max_rise
    if getattr(args, "max_horizontal", None) is not None:
        jump["max_horizontal"] = args.max_horizontal
    try:
        jump_model = JumpModel(**jump)
        config = RunConfig(jump=jump_model, **{k: _coerce(k, v) for k, v in values.items()})
    except TypeError as exc:
        raise ConfigError(f"bad configuration: {exc}") from exc
    config.validate()
    return config


def _alphabet(config: RunConfig) -> TileAlphabet:
    return TileAlphabet.load(config.alphabet)


def _corpus(config: RunConfig, alphabet: TileAlphabet) -> Corpus:
    directory = config.corpus_dir or synthetic_corpus_dir()
    return load_corpus(directory, alphabet)


def _training_levels(config: RunConfig, corpus: Corpus):
    """All levels, or all but the withheld one when a test level is named."""
    if config.test_level is None:
        return list(corpus.levels)
    training, _ = corpus.split(config.test_level)
    return training


def _target(config: RunConfig, approach: Approach, many: bool) -> Path:
    return config.output_dir / approach.value if many else config.output_dir


def cmd_train(config: RunConfig) -> int:
    alphabet = _alphabet(config)
    corpus = _corpus(config, alphabet)
    levels = _training_levels(config, corpus)
    approaches = config.approaches()
    for approach in approaches:
        trained = train_approach(approach, levels, alphabet)
        out = _target(config, approach, len(approaches) > 1)
        manifest = save_bundle(trained, out, levels)
        print(f"{approach.value}: {len(manifest['chains'])} chains -> {out}")
    return EXIT_OK


def _trained_for(config: RunConfig, approach: Approach, alphabet: TileAlphabet, many: bool):
    if config.model_dir is not None:
        bundle = config.model_dir / approach.value if many else config.model_dir
        trained = load_bundle(bundle, alphabet)
        if trained.approach is not approach:
            raise ConfigError(f"bundle in {bundle} holds {trained.approach.value}, not {approach.value}")
        return trained
    corpus = _corpus(config, alphabet)
    return train_approach(approach, _training_levels(config, corpus), alphabet)


def write_levels(levels, directory: Path) -> list[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    width = max(3, len(str(len(levels) - 1)))
    written = []
    for level in levels:
        stem = directory / f"level_{level.index:0{width}d}"
        stem.with_suffix(".txt").write_text(level.grid.to_text())
        stem.with_suffix(".json").write_text(level.sidecar_text())
        written.append(stem.with_suffix(".txt"))
    return written


def cmd_generate(config: RunConfig) -> int:
    alphabet = _alphabet(config)
    forced = None
    rooms = config.rooms_per_level
    if config.force_sequence:
        try:
            forced = parse_sequence(config.force_sequence)
        except ValueError as exc:
            raise ConfigError(f"bad --force-sequence: {exc}") from exc
        rooms = len(forced)
    approaches = config.approaches()
    many = len(approaches) > 1
    for approach in approaches:
        if forced and approach is Approach.HIERARCHICAL:
            raise ConfigError("--force-sequence needs a sequence-based approach")
        trained = _trained_for(config, approach, alphabet, many)
        levels = generate_batch(trained, config.batch_size, rooms, config.seed, config.resample_cap,
                                config.jobs, forced, config.vertical_choices)
        out = _target(config, approach, many)
        write_levels(levels, out)
        capped = sum(lvl.capped for lvl in levels)
        print(f"{approach.value}: {len(levels)} levels -> {out} ({capped} hit the resample cap)")
    return EXIT_OK


def cmd_evaluate(config: RunConfig) -> int:
    alphabet = _alphabet(config)
    corpus = _corpus(config, alphabet)
    test_name = config.test_level or corpus.names()[-1]
    _, test_level = corpus.split(test_name)
    approaches = config.approaches()
    many = len(approaches) > 1
    config.output_dir.mkdir(parents=True, exist_ok=True)
    reports = []
    for approach in approaches:
        trained = _trained_for(config, approach, alphabet, many) if config.model_dir else None
        result = evaluate(approach, corpus.levels, test_level, alphabet, config.batch_size,
                          config.rooms_per_level, config.seed, config.resample_cap, config.jump,
                          config.jobs, config.vertical_choices, trained)
        path = config.output_dir / f"report_{approach.value}.json"
        path.write_text(json.dumps(result.report.to_dict(), indent=1, sort_keys=True) + "\n")
        reports.append(result.report)
        print(f"{approach.value}: report -> {path}")
    if many:
        table = comparison_table(reports)
        (config.output_dir / "comparison.txt").write_text(table)
        print(table, end="")
    return EXIT_OK


def overlay(grid: TileGrid, cells, char: str = DEFAULT_OVERLAY) -> TileGrid:
    """Copy of ``grid`` with ``char`` written on every (x, y) in ``cells``."""
    rows = [list(r) for r in grid.rows]
    for x, y in cells:
        if not (0 <= y < grid.height and 0 <= x < grid.width):
            raise DataError(f"path tile ({x}, {y}) lies outside the {grid.width}x{grid.height} level")
        rows[y][x] = char
    return TileGrid.from_rows("".join(r) for r in rows)


def _room_path(level_file: Path) -> tuple[list, RoomSize]:
    """Room path and size from a generated level's JSON sidecar or a corpus ``.path`` file."""
    sidecar = level_file.with_suffix(".json")
    if sidecar.exists():
        doc = json.loads(sidecar.read_text())
        return [tuple(c) for c in doc["path"]], RoomSize(*doc["room_size"])
    corpus_path = level_file.with_suffix(".path")
    if corpus_path.exists():
        return parse_sidecar(corpus_path.read_text()), MEGA_MAN_ROOM
    raise DataError(f"{level_file.name}: no .json or .path sidecar to solve against")


@dataclass
class _Solvable:
    grid: TileGrid
    path: list
    room_size: RoomSize


def cmd_render(args: argparse.Namespace, config: RunConfig) -> int:
    level_file = Path(args.level)
    try:
        grid = parse_level(level_file.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read level {level_file}: {exc.strerror}") from exc
    alphabet = _alphabet(config)
    char = args.overlay
    if len(char) != 1 or char in alphabet.symbols or char in (alphabet.null_symbol, alphabet.border_symbol):
        raise ConfigError(f"overlay character {char!r} must be a single symbol outside the tile alphabet")
    cells = []
    if args.path:
        cells = parse_sidecar(Path(args.path).read_text())
    elif args.solve:
        path, size = _room_path(level_file)
        try:
            verdict = check_playable(_Solvable(grid, path, size), config.jump, alphabet)
        except NoStartTile as exc:
            raise DataError(f"{level_file.name}: {exc}") from exc
        if not verdict.playable:
            print(f"{level_file.name}: not playable", file=sys.stderr)
        cells = verdict.coords() if verdict.playable else []
    if args.dump_path:
        Path(args.dump_path).write_text("".join(f"{x},{y}\n" for x, y in cells))
    sys.stdout.write(overlay(grid, cells, char).to_text())
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    reports = []
    for name in args.reports:
        try:
            reports.append(MetricsReport.from_dict(json.loads(Path(name).read_text())))
        except OSError as exc:
            raise ConfigError(f"cannot read report {name}: {exc.strerror}") from exc
        except (KeyError, ValueError, TypeError) as exc:
            raise DataError(f"{name} is not a metrics report: {exc}") from exc
    table = comparison_table(reports)
    if args.out:
        Path(args.out).write_text(table)
    sys.stdout.write(table)
    return EXIT_OK


def _add_run_flags(p: argparse.ArgumentParser, approach_all: bool = True) -> None:
    choices = [a.value for a in Approach] + ([ALL] if approach_all else [])
    p.add_argument("--config", type=Path, help="YAML file with RunConfig keys; flags override it")
    p.add_argument("--corpus-dir", dest="corpus_dir", help="level directory (default: bundled synthetic corpus)")
    p.add_argument("--test-level", dest="test_level", help="level file withheld from training")
    p.add_argument("--approach", choices=choices)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--rooms-per-level", dest="rooms_per_level", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--resample-cap", dest="resample_cap", type=int)
    p.add_argument("--max-rise", dest="max_rise", type=int)
    p.add_argument("--max-horizontal", dest="max_horizontal", type=int)
    p.add_argument("--alphabet", help="alphabet YAML (default: bundled)")
    p.add_argument("--output-dir", dest="output_dir", help=f"output directory (env: {OUTPUT_ENV})")
    p.add_argument("--jobs", type=int, help="worker threads")
    p.add_argument("--model-dir", dest="model_dir", help="load a trained bundle instead of training")
    p.add_argument("--vertical-right", dest="vertical_right", action="store_true", default=None,
                   help="let vertical rooms also be placed to the right")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mmensemble", description="Markov-chain Mega Man level generation")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train chains and write a model bundle")
    _add_run_flags(p)

    p = sub.add_parser("generate", help="generate a batch of levels")
    _add_run_flags(p)
    p.add_argument("--force-sequence", dest="force_sequence", help="fixed room types, e.g. HHVVH")

    p = sub.add_parser("evaluate", help="score approaches against a withheld level")
    _add_run_flags(p)

    p = sub.add_parser("render", help="print a level, optionally with a path overlay")
    p.add_argument("level")
    p.add_argument("--path", help="x,y tile coordinates to overlay, one per line")
    p.add_argument("--solve", action="store_true", help="overlay the agent's path from the level sidecar")
    p.add_argument("--dump-path", dest="dump_path", help="write the overlaid coordinates here")
    p.add_argument("--overlay", default=DEFAULT_OVERLAY, help="overlay character")
    p.add_argument("--alphabet")
    p.add_argument("--max-rise", dest="max_rise", type=int)
    p.add_argument("--max-horizontal", dest="max_horizontal", type=int)

    p = sub.add_parser("compare", help="comparison table from report files")
    p.add_argument("reports", nargs="+")
    p.add_argument("--out", help="also write the table here")
    return parser


def run(argv=None, environ=os.environ) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "compare":
            return cmd_compare(args)
        config = build_config(args, environ)
        if args.command == "render":
            return cmd_render(args, config)
        return {"train": cmd_train, "generate": cmd_generate, "evaluate": cmd_evaluate}[args.command](config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except LevelGenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
