#!/usr/bin/env python3
"""Regenerate the bundled synthetic mini-corpus (3 levels + path sidecars).

The rooms are assembled from simple templates keyed on how the game path
enters and leaves each room, with seeded decoration, so every original level
is traversable: ladders for upward exits, open shafts for downward ones,
jumpable pits (spiked or bottomless) and blocks in horizontal rooms.
"""

from __future__ import annotations

import argparse
import random
from pathlib import Path

W, H = 16, 15
LADDER_COL = 7
SHAFT = (4, 11)  # open columns of vertical shafts
LEDGE = 10
FLOOR = 13

LEVELS = {
    "synth_1": ((5, 3), [(0, 2), (1, 2), (2, 2), (2, 1), (2, 0), (3, 0), (4, 0)]),
    "synth_2": ((6, 3), [(0, 0), (1, 0), (1, 1), (1, 2), (2, 2), (3, 2), (3, 1), (4, 1), (5, 1)]),
    "synth_3": ((6, 3), [(0, 1), (1, 1), (2, 1), (2, 0), (3, 0), (3, 1), (3, 2), (4, 2), (5, 2)]),
}


def side(a, b):
    dx, dy = b[0] - a[0], b[1] - a[1]
    return {(1, 0): "R", (0, -1): "U", (0, 1): "D", (-1, 0): "L"}[(dx, dy)]


def build_room(entry: str, exit_: str, rng: random.Random) -> list[str]:
    """``entry`` is the side the player comes in from (L/U/D), ``exit_`` the side it leaves (R/U/D)."""
    g = [["-"] * W for _ in range(H)]
    horizontal = entry == "L" and exit_ == "R"
    shaft = range(SHAFT[0], SHAFT[1] + 1)
    open_bottom = "D" in (entry, exit_)
    open_top = "U" in (entry, exit_)
    for y in (FLOOR, FLOOR + 1):
        for x in range(W):
            g[y][x] = "-" if open_bottom and x in shaft else "#"
    if not horizontal:
        for x in range(W):
            g[0][x] = "-" if open_top and x in shaft else "#"
    if entry != "L":
        for y in range(FLOOR):
            g[y][0] = "#"
    if exit_ != "R":
        for y in range(FLOOR):
            g[y][W - 1] = "#"
    if exit_ == "U":
        top = 0
        bottom = H - 1 if entry == "D" else FLOOR - 1
        for y in range(top, bottom + 1):
            g[y][LADDER_COL] = "l"
    elif entry == "D":
        # climb in from below onto a ledge, then leave sideways
        for y in range(LEDGE, H):
            g[y][LADDER_COL] = "l"
        for x in range(1, W):
            if x != LADDER_COL:
                g[LEDGE][x] = "#"
    if entry == "U" and exit_ == "D":
        for y in (5, 9):
            for x in range(1, SHAFT[0]):
                g[y][x] = "#"

    reserved = {LADDER_COL, *shaft}
    if horizontal:
        if rng.random() < 0.7:
            px = rng.randrange(3, W - 5)
            width = rng.choice((2, 3))
            bottom = rng.choice("-H")  # bottomless pit or spikes
            for x in range(px, px + width):
                g[FLOOR][x] = "-"
                g[FLOOR + 1][x] = bottom
            reserved |= set(range(px - 1, px + width + 1))
        for _ in range(rng.randrange(0, 3)):
            bx = rng.randrange(2, W - 2)
            if bx in reserved:
                continue
            for k in range(rng.choice((1, 2))):
                g[FLOOR - 1 - k][bx] = rng.choice("#BB")
            reserved.add(bx)
    for _ in range(rng.randrange(1, 4)):
        row = rng.choice((8, 9, 10))
        length = rng.randrange(2, 5)
        x0 = rng.randrange(1, W - length - 1)
        if any(x in reserved for x in range(x0, x0 + length)) or any(g[row][x] != "-" for x in range(x0, x0 + length)):
            continue
        for x in range(x0, x0 + length):
            g[row][x] = rng.choice("####M")
    for _ in range(rng.randrange(0, 3)):
        x = rng.randrange(1, W - 1)
        if x in reserved or g[FLOOR][x] != "#" or g[FLOOR - 1][x] != "-":
            continue
        g[FLOOR - 1][x] = rng.choice("+*WwC")
    return ["".join(r) for r in g]


def build_level(shape, path, rng: random.Random) -> list[str]:
    cols, rows = shape
    rooms = {}
    for i, coord in enumerate(path):
        entry = "L" if i == 0 else {"R": "L", "U": "D", "D": "U"}[side(path[i - 1], coord)]
        exit_ = "R" if i == len(path) - 1 else side(coord, path[i + 1])
        rooms[coord] = build_room(entry, exit_, rng)
    lines = []
    for r in range(rows):
        for y in range(H):
            lines.append("".join(rooms.get((c, r), ["@" * W] * H)[y] for c in range(cols)))
    return lines


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path,
                        default=Path(__file__).resolve().parents[1] / "src/mmensemble/data/synthetic")
    parser.add_argument("--seed", type=int, default=2021)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)
    for name, (shape, path) in LEVELS.items():
        lines = build_level(shape, path, rng)
        (args.out / f"{name}.txt").write_text("\n".join(lines) + "\n")
        (args.out / f"{name}.path").write_text("".join(f"{c},{r}\n" for c, r in path))
        print(f"wrote {name}: {shape[0]}x{shape[1]} rooms, {len(path)} on path")


if __name__ == "__main__":
    main()
