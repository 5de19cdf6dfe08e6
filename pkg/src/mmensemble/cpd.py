"""Counted conditional probability tables.

A :class:`ConditionalTable` stores raw counts ``context -> outcome -> n`` and
derives probabilities on demand as ``n / total(context)``. There is no
smoothing: an unseen outcome has probability 0 and an unseen context samples
to ``None`` so callers can apply their own fallback.
"""

from __future__ import annotations

import bisect
import json
from collections import Counter
from fractions import Fraction
from itertools import accumulate
from typing import Hashable, Iterable, Iterator

import numpy as np

from .errors import FrozenTableError

Context = tuple[Hashable, ...]


class ConditionalTable:
    def __init__(self):
        self._counts: dict[Context, Counter] = {}
        self._frozen = False
        self._cdf: dict[Context, tuple[list[str], list[int], int]] = {}

    def observe(self, context: Context, outcome: str, n: int = 1) -> ConditionalTable:
        if self._frozen:
            raise FrozenTableError("table is frozen")
        if n < 0:
            raise ValueError("counts cannot be negative")
        if n == 0:
            return self
        self._counts.setdefault(context, Counter())[outcome] += n
        self._cdf.pop(context, None)
        return self

    def freeze(self) -> ConditionalTable:
        self._frozen = True
        return self

    @property
    def frozen(self) -> bool:
        return self._frozen

    def __contains__(self, context: Context) -> bool:
        return context in self._counts

    def __len__(self) -> int:
        return len(self._counts)

    def contexts(self) -> list[Context]:
        return sorted(self._counts, key=_sort_key)

    def outcomes(self, context: Context) -> dict[str, int]:
        return dict(self._counts.get(context, {}))

    def count(self, context: Context, outcome: str) -> int:
        return self._counts.get(context, {}).get(outcome, 0)

    def total(self, context: Context) -> int:
        return sum(self._counts.get(context, {}).values())

    def fraction(self, context: Context, outcome: str) -> Fraction:
        """Exact probability as a rational number."""
        total = self.total(context)
        if total == 0:
            return Fraction(0)
        return Fraction(self.count(context, outcome), total)

    def probability(self, context: Context, outcome: str) -> float:
        counts = self._counts.get(context)
        if not counts:
            return 0.0
        return counts.get(outcome, 0) / sum(counts.values())

    def distribution(self, context: Context) -> dict[str, float]:
        counts = self._counts.get(context, {})
        total = sum(counts.values())
        return {k: v / total for k, v in sorted(counts.items())}

    def _cumulative(self, context: Context):
        entry = self._cdf.get(context)
        if entry is None:
            items = sorted(self._counts[context].items())
            outcomes = [k for k, _ in items]
            cumulative = list(accumulate(v for _, v in items))
            entry = (outcomes, cumulative, cumulative[-1])
            self._cdf[context] = entry
        return entry

    def sample(self, context: Context, rng: np.random.Generator) -> str | None:
        """Draw an outcome for ``context``; ``None`` if the context was never observed."""
        if context not in self._counts:
            return None
        outcomes, cumulative, total = self._cumulative(context)
        if len(outcomes) == 1:
            return outcomes[0]
        # integer draw keeps the mapping from rng stream to outcome exact
        u = int(rng.integers(total))
        return outcomes[bisect.bisect_right(cumulative, u)]

    def rows(self) -> Iterator[tuple[Context, str, int, float]]:
        """(context, outcome, count, probability) rows in lexicographic order."""
        for context in sorted(self._counts, key=_sort_key):
            counts = self._counts[context]
            total = sum(counts.values())
            for outcome in sorted(counts):
                yield context, outcome, counts[outcome], counts[outcome] / total

    def to_records(self) -> list[dict]:
        return [
            {"context": [str(c) for c in ctx], "outcome": out, "count": n, "probability": p}
            for ctx, out, n, p in self.rows()
        ]

    def dumps(self) -> str:
        return json.dumps(self.to_records(), indent=1)

    @classmethod
    def from_records(cls, records: Iterable[dict]) -> ConditionalTable:
        table = cls()
        for rec in records:
            table.observe(tuple(rec["context"]), rec["outcome"], int(rec["count"]))
        return table

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConditionalTable):
            return NotImplemented
        return self._counts == other._counts

    def __repr__(self) -> str:
        return f"ConditionalTable({len(self._counts)} contexts, frozen={self._frozen})"


def _sort_key(context: Context) -> tuple[str, ...]:
    return tuple("" if c is None else str(c) for c in context)
