"""Persist trained approaches as a directory of CPD exports plus a manifest."""

from __future__ import annotations

import json
import logging
from pathlib import Path

from . import __version__
from .corpus import TileAlphabet
from .cpd import ConditionalTable
from .errors import DataError
from .hierarchical import HierarchicalModel, RoomGridChain
from .metrics import Approach, TrainedApproach
from .room import RoomEnsemble, RoomModel
from .sequence import RoomTypeChain

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"


def _chain_entry(name: str, chain) -> tuple[dict, ConditionalTable]:
    entry = {"name": name, "file": f"{name}.json"}
    if isinstance(chain, RoomModel):
        entry.update(kind="room", uses_direction=chain.uses_direction,
                     width=chain.width, height=chain.height)
    elif isinstance(chain, RoomGridChain):
        entry.update(kind="room_grid", fallback=chain.fallback)
    elif isinstance(chain, RoomTypeChain):
        entry.update(kind="sequence")
    else:
        raise TypeError(f"cannot export {type(chain).__name__}")
    return entry, chain.table


def save_bundle(trained: TrainedApproach, directory: str | Path, training_levels=()) -> dict:
    """Write one JSON export per chain and ``manifest.json``; returns the manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    alphabet = trained.alphabet
    entries = []
    for name, chain in trained.chains().items():
        entry, table = _chain_entry(name, chain)
        entry["contexts"] = len(table)
        (directory / entry["file"]).write_text(table.dumps() + "\n")
        entries.append(entry)
    manifest = {
        "approach": trained.approach.value,
        "tool_version": __version__,
        "border_symbol": alphabet.border_symbol,
        "empty_symbol": alphabet.empty_symbol,
        "null_symbol": alphabet.null_symbol,
        "training_levels": [lvl.name for lvl in training_levels],
        "chains": entries,
    }
    if trained.hierarchical is not None:
        manifest["layout_shape"] = list(trained.hierarchical.shape)
    (directory / MANIFEST).write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    logger.info("wrote %d chains to %s", len(entries), directory)
    return manifest


def load_bundle(directory: str | Path, alphabet: TileAlphabet) -> TrainedApproach:
    directory = Path(directory)
    path = directory / MANIFEST
    if not path.exists():
        raise DataError(f"no {MANIFEST} in {directory}")
    try:
        manifest = json.loads(path.read_text())
        approach = Approach(manifest["approach"])
        chains = {}
        for entry in manifest["chains"]:
            records = json.loads((directory / entry["file"]).read_text())
            table = ConditionalTable.from_records(records).freeze()
            kind = entry["kind"]
            if kind == "room":
                chains[entry["name"]] = RoomModel(table, entry["uses_direction"], entry["width"], entry["height"],
                                                  manifest["border_symbol"], manifest["empty_symbol"])
            elif kind == "room_grid":
                chains[entry["name"]] = RoomGridChain(table, manifest["border_symbol"], entry["fallback"])
            else:
                chains[entry["name"]] = RoomTypeChain(table)
        if approach is Approach.HIERARCHICAL:
            model = HierarchicalModel(chains["layout_grid"], chains["room_all"], tuple(manifest["layout_shape"]))
            return TrainedApproach(approach, alphabet, hierarchical=model)
        if approach is Approach.ENSEMBLE:
            rooms = RoomEnsemble(chains["room_horizontal"], chains["room_vertical"])
        else:
            rooms = chains["room_all"]
        return TrainedApproach(approach, alphabet, sequence=chains["sequence"], rooms=rooms)
    except (KeyError, ValueError, TypeError, OSError) as exc:
        raise DataError(f"malformed model bundle in {directory}: {exc}") from exc
