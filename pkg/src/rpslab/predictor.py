"""Fixed-memory transition-count model of a player's move sequence.

One predictor of order m keeps, for every length-m run of the player's own
moves (oldest first), how often each move followed it. Prediction is the
count row of the current context normalized per row; contexts never seen
fall back to exact thirds, as does any history shorter than m.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .game import Move, beats
from .rng import SplitMix64

MAX_ORDER = 16  # 3**order context codes must stay addressable

UNIFORM = (Fraction(1, 3), Fraction(1, 3), Fraction(1, 3))


@dataclass
class TransitionTable:
    """Sparse (context -> next move) counts. Contexts are tuples of move values."""

    order: int
    counts: dict = field(default_factory=dict)
    total: int = 0

    def row(self, context: Sequence[int]) -> Optional[list]:
        return self.counts.get(tuple(context))

    def increment(self, context: Sequence[int], nxt: int) -> None:
        row = self.counts.setdefault(tuple(context), [0, 0, 0])
        row[int(nxt)] += 1
        self.total += 1

    def csv_rows(self) -> list:
        """(context, next, count) triples, nonzero only, sorted lexicographically."""
        rows = []
        for ctx, counts in self.counts.items():
            key = "".join(Move(c).code for c in ctx)
            for nxt in range(3):
                if counts[nxt]:
                    rows.append((key, Move(nxt).code, counts[nxt]))
        rows.sort()
        return rows


class MarkovPredictor:
    """Predicts the player's next move from their previous `order` moves."""

    def __init__(self, order: int) -> None:
        if not 1 <= order <= MAX_ORDER:
            raise ValueError(f"order must be between 1 and {MAX_ORDER}")
        self.order = order
        self.table = TransitionTable(order)
        self._seen = 0
        self._context: list[int] = []  # the player's last `order` moves

    @property
    def moves_seen(self) -> int:
        return self._seen

    def push(self, move: Move) -> None:
        """Record one more player move."""
        if len(self._context) == self.order:
            self.table.increment(self._context, int(move))
            del self._context[0]
        self._context.append(int(move))
        self._seen += 1

    def observe(self, history: Sequence[Move]) -> None:
        """Bring the model up to date with the player's full history so far.

        The caller feeds a growing prefix of the same session; a history
        shorter than what was already observed is rejected.
        """
        if len(history) < self._seen:
            raise ValueError(
                f"history went backwards: observed {self._seen} moves, got {len(history)}"
            )
        for move in history[self._seen:]:
            self.push(move)

    def _current_context(self, history: Optional[Sequence[Move]]) -> Optional[list]:
        if history is None:
            return self._context if len(self._context) == self.order else None
        if len(history) < self.order:
            return None
        return [int(m) for m in history[-self.order:]]

    def predict(self, history: Optional[Sequence[Move]] = None):
        """Distribution over the player's next move, as exact fractions.

        Uniform until the history is at least `order` long and its current
        context has been counted at least once.
        """
        ctx = self._current_context(history)
        if ctx is None:
            return UNIFORM
        row = self.table.row(ctx)
        if row is None:
            return UNIFORM
        total = sum(row)
        if total == 0:
            return UNIFORM
        return tuple(Fraction(c, total) for c in row)

    def act(self, rng: SplitMix64, history: Optional[Sequence[Move]] = None) -> Move:
        """Counter the most likely player move; ties sampled uniformly.

        Exactly one draw is consumed from `rng` per call even when the
        argmax is unique, so stream positions stay aligned regardless of
        table contents.
        """
        ctx = self._current_context(history)
        row = self.table.row(ctx) if ctx is not None else None
        if row is None or sum(row) == 0:
            candidates = (0, 1, 2)
        else:
            best = max(row)
            candidates = tuple(i for i in range(3) if row[i] == best)
        predicted = candidates[rng.randbelow(len(candidates))]
        return beats(Move(predicted))


def table_from_history(history: Iterable[Move], order: int) -> TransitionTable:
    """Build a transition table from a complete history in one pass."""
    predictor = MarkovPredictor(order)
    for move in history:
        predictor.push(move)
    return predictor.table
