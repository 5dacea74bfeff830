"""Member pool management: window scoring, dominant selection, round stepping.

Every round each member proposes a counter-move from its own model and its
own random stream; the pool plays the proposal of the member with the best
score over the last `focus_length` completed rounds (all of them while fewer
have been played), breaking ties toward the shortest memory.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .game import Move
from .predictor import MAX_ORDER
from .rng import MASK64


@dataclass(frozen=True)
class EnsembleConfig:
    orders: tuple = (1, 2, 3, 4, 5)
    focus_length: int = 5
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "orders", tuple(int(m) for m in self.orders))
        if not self.orders:
            raise ValueError("orders must be nonempty")
        if any(not 1 <= m <= MAX_ORDER for m in self.orders):
            raise ValueError(f"every order must be between 1 and {MAX_ORDER}")
        if any(b <= a for a, b in zip(self.orders, self.orders[1:])):
            raise ValueError("orders must be strictly increasing")
        if self.focus_length < 1:
            raise ValueError("focus_length must be at least 1")
        if not 0 <= self.seed <= MASK64:
            raise ValueError("seed must fit in 64 bits")


@dataclass(frozen=True)
class SelectionTrace:
    """How the dominant member for one round was chosen."""

    round: int
    window_start: int
    window_end: int  # inclusive; end < start means an empty window
    window_scores: tuple
    chosen_index: int
    chosen_order: int
    switched: bool

    @staticmethod
    def csv_header(orders: Sequence[int]) -> str:
        scores = ",".join(f"score_ai_{m}" for m in orders)
        return f"round,window_start,window_end,{scores},chosen,switched"

    def csv_row(self) -> str:
        scores = ",".join(str(s) for s in self.window_scores)
        return (
            f"{self.round},{self.window_start},{self.window_end},"
            f"{scores},{self.chosen_order},{int(self.switched)}"
        )


def rolling_score(score_history: Sequence[Sequence[int]], member: int,
                  round_number: int, focus_length: int) -> int:
    """Sum of one member's per-round scores over the selection window.

    The window for round n covers rounds max(1, n-F)..n-1; before F rounds
    have completed that is simply every round so far, and for round 1 it is
    empty (score 0).
    """
    if not 0 <= member < len(score_history):
        raise IndexError(f"member {member} out of range")
    lo = max(1, round_number - focus_length)
    hi = round_number - 1
    return sum(score_history[member][lo - 1:hi])


def select_dominant(score_history: Sequence[Sequence[int]], round_number: int,
                    focus_length: int) -> tuple:
    """Pick the member to play round `round_number`.

    Returns (index, window_scores, window_start, window_end). Ties go to the
    lowest index, i.e. the shortest memory; round 1 therefore always picks
    member 0.
    """
    scores = [
        rolling_score(score_history, i, round_number, focus_length)
        for i in range(len(score_history))
    ]
    best = max(scores)
    index = scores.index(best)
    lo = max(1, round_number - focus_length)
    return index, scores, lo, round_number - 1


@dataclass(frozen=True)
class Proposal:
    """Per-member proposals for one round plus the pool's committed move."""

    moves: tuple
    dominant_index: int
    dominant_order: int

    @property
    def move(self) -> Move:
        return self.moves[self.dominant_index]


@dataclass(frozen=True)
class RoundScores:
    member_scores: tuple
    next_dominant_index: int
    switched: bool
    trace: SelectionTrace  # selection for the *next* round


class Ensemble:
    """One pool of fixed-memory predictors driven by the active backend."""

    def __init__(self, config: EnsembleConfig, max_rounds: int = 512,
                 backend_name: Optional[str] = None) -> None:
        from . import backend  # deferred: backend imports the kernels

        self.config = config
        self._core = backend.make_core(
            config.orders, config.focus_length, config.seed, max_rounds, backend_name
        )
        self.backend_name = backend.resolve_name(backend_name)
        first = SelectionTrace(
            round=1, window_start=1, window_end=0,
            window_scores=(0,) * len(config.orders),
            chosen_index=0, chosen_order=config.orders[0], switched=False,
        )
        self.traces = [first]

    @property
    def round_number(self) -> int:
        return self._core.round_number

    @property
    def dominant_index(self) -> int:
        return self._core.dominant_index

    @property
    def dominant_order(self) -> int:
        return self.config.orders[self._core.dominant_index]

    def propose(self) -> Proposal:
        moves = self._core.propose()
        idx = self._core.dominant_index
        return Proposal(
            moves=tuple(Move(m) for m in moves),
            dominant_index=idx,
            dominant_order=self.config.orders[idx],
        )

    def settle(self, player_move: Move) -> RoundScores:
        prev = self._core.dominant_index
        scores, nxt, lo, hi, window = self._core.settle(int(player_move))
        switched = nxt != prev
        trace = SelectionTrace(
            round=self._core.round_number,
            window_start=lo, window_end=hi,
            window_scores=tuple(window),
            chosen_index=nxt, chosen_order=self.config.orders[nxt],
            switched=switched,
        )
        self.traces.append(trace)
        return RoundScores(tuple(scores), nxt, switched, trace)

    def score_history(self) -> list:
        return self._core.score_history()

    def player_history(self) -> list:
        return [Move(m) for m in self._core.player_history()]
