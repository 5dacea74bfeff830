"""Synthetic player strategies for testing and benchmarking the move pool.

Each strategy consumes randomness only from its own injected stream, with a
fixed draw pattern per kind so that replays are bit-stable:

* uniform      - one integer draw every round
* biased       - one unit-interval draw every round
* cycle        - no draws, ever
* wsls         - one integer draw on round 1, deterministic afterwards
* reactor      - 3^k integer draws at construction when the rule table is
                 random, one integer draw per round until k own moves exist
* mimic        - one integer draw on round 1, then copies the AI's last move
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .game import Move, Outcome, beats, judge
from .rng import SplitMix64


@dataclass(frozen=True)
class UniformRandom:
    KIND = "uniform"

    def encode(self) -> str:
        return self.KIND


@dataclass(frozen=True)
class BiasedRandom:
    """Fixed move distribution; weights are normalized at construction."""

    p_rock: Fraction
    p_paper: Fraction
    p_scissors: Fraction

    KIND = "biased"

    def __post_init__(self) -> None:
        probs = (self.p_rock, self.p_paper, self.p_scissors)
        if any(p < 0 for p in probs):
            raise ValueError("move probabilities must be nonnegative")
        if sum(probs) != 1:
            raise ValueError("move probabilities must sum to 1")

    @classmethod
    def from_weights(cls, w_rock, w_paper, w_scissors) -> "BiasedRandom":
        weights = [Fraction(str(w)) if isinstance(w, float) else Fraction(w)
                   for w in (w_rock, w_paper, w_scissors)]
        if any(w < 0 for w in weights):
            raise ValueError("move weights must be nonnegative")
        total = sum(weights)
        if total <= 0:
            raise ValueError("move weights must not all be zero")
        return cls(*(w / total for w in weights))

    def thresholds(self) -> tuple:
        """Cumulative cutoffs as floats, shared by both backends."""
        return (float(self.p_rock), float(self.p_rock + self.p_paper))

    def encode(self) -> str:
        probs = (self.p_rock, self.p_paper, self.p_scissors)
        return "biased:" + ",".join(str(p) for p in probs)


@dataclass(frozen=True)
class Cycle:
    pattern: tuple

    KIND = "cycle"

    def __post_init__(self) -> None:
        object.__setattr__(self, "pattern", tuple(Move(m) for m in self.pattern))
        if not self.pattern:
            raise ValueError("cycle pattern must be nonempty")

    @classmethod
    def from_text(cls, text: str) -> "Cycle":
        return cls(tuple(Move.from_code(c) for c in text))

    def encode(self) -> str:
        return "cycle:" + "".join(m.code for m in self.pattern)


@dataclass(frozen=True)
class WinStayLoseShift:
    """Keeps its move after a win or draw, shifts to beats(own last) after a loss."""

    KIND = "wsls"

    def encode(self) -> str:
        return self.KIND


@dataclass(frozen=True)
class FixedMemoryReactor:
    """Plays table[own last k moves]; contexts are oldest-first base-3 indices.

    A None table is drawn uniformly from the agent's stream at match start,
    one entry per context in index order.
    """

    k: int
    table: Optional[tuple] = None

    KIND = "reactor"

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("reactor memory length must be at least 1")
        if self.k > 6:
            raise ValueError("reactor memory length above 6 is not supported")
        if self.table is not None:
            entries = tuple(Move(m) for m in self.table)
            if len(entries) != 3 ** self.k:
                raise ValueError(
                    f"rule table needs {3 ** self.k} entries, got {len(entries)}"
                )
            object.__setattr__(self, "table", entries)

    def encode(self) -> str:
        if self.table is None:
            return f"reactor:{self.k}"
        return f"reactor:{self.k}:" + "".join(m.code for m in self.table)


@dataclass(frozen=True)
class MimicLastAIMove:
    KIND = "mimic"

    def encode(self) -> str:
        return self.KIND


StrategyKind = Union[
    UniformRandom, BiasedRandom, Cycle, WinStayLoseShift,
    FixedMemoryReactor, MimicLastAIMove,
]

_SIMPLE = {
    UniformRandom.KIND: UniformRandom,
    WinStayLoseShift.KIND: WinStayLoseShift,
    MimicLastAIMove.KIND: MimicLastAIMove,
}


def parse_strategy(text: str) -> StrategyKind:
    """Parse a CLI strategy spec such as `uniform`, `biased:0.3,0.3,0.4`,
    `cycle:RPS`, `wsls`, `reactor:2`, `reactor:1:PSR`, or `mimic`."""
    head, _, rest = text.strip().partition(":")
    head = head.lower()
    if head in _SIMPLE:
        if rest:
            raise ValueError(f"strategy {head!r} takes no parameters")
        return _SIMPLE[head]()
    if head == BiasedRandom.KIND:
        parts = rest.split(",")
        if len(parts) != 3:
            raise ValueError("biased strategy needs three weights")
        try:
            weights = [Fraction(p.strip()) for p in parts]
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad weight in {text!r}") from exc
        return BiasedRandom.from_weights(*weights)
    if head == Cycle.KIND:
        if not rest:
            raise ValueError("cycle strategy needs a move pattern")
        return Cycle.from_text(rest)
    if head == FixedMemoryReactor.KIND:
        k_text, _, table_text = rest.partition(":")
        try:
            k = int(k_text)
        except ValueError as exc:
            raise ValueError(f"bad reactor memory length in {text!r}") from exc
        if not table_text:
            return FixedMemoryReactor(k)
        table = tuple(Move.from_code(c) for c in table_text)
        return FixedMemoryReactor(k, table)
    raise ValueError(f"unknown strategy {text!r}")


def materialize_table(kind: FixedMemoryReactor, rng: SplitMix64) -> tuple:
    """Resolve the reactor rule table, drawing a random one if unset."""
    if kind.table is not None:
        return kind.table
    return tuple(Move(rng.randbelow(3)) for _ in range(3 ** kind.k))


class Agent:
    """Stateful stepper for one strategy in one match.

    Call move() exactly once per round, then observe() with both moves.
    """

    def __init__(self, kind: StrategyKind, rng: SplitMix64) -> None:
        self.kind = kind
        self.rng = rng
        self.own_history: list = []
        self.opponent_history: list = []
        if isinstance(kind, FixedMemoryReactor):
            self._table = materialize_table(kind, rng)
        else:
            self._table = None

    def move(self) -> Move:
        kind = self.kind
        n = len(self.own_history)  # completed rounds
        if isinstance(kind, UniformRandom):
            return Move(self.rng.randbelow(3))
        if isinstance(kind, BiasedRandom):
            t0, t1 = kind.thresholds()
            u = self.rng.next_unit()
            if u < t0:
                return Move.ROCK
            return Move.PAPER if u < t1 else Move.SCISSORS
        if isinstance(kind, Cycle):
            return kind.pattern[n % len(kind.pattern)]
        if isinstance(kind, WinStayLoseShift):
            if n == 0:
                return Move(self.rng.randbelow(3))
            last = self.own_history[-1]
            if judge(last, self.opponent_history[-1]) is Outcome.LOSS:
                return beats(last)
            return last
        if isinstance(kind, FixedMemoryReactor):
            if n < kind.k:
                return Move(self.rng.randbelow(3))
            idx = 0
            for m in self.own_history[-kind.k:]:
                idx = idx * 3 + int(m)
            return self._table[idx]
        if isinstance(kind, MimicLastAIMove):
            if n == 0:
                return Move(self.rng.randbelow(3))
            return self.opponent_history[-1]
        raise TypeError(f"unknown strategy kind {kind!r}")

    def observe(self, own_move: Move, opponent_move: Move) -> None:
        self.own_history.append(Move(own_move))
        self.opponent_history.append(Move(opponent_move))
        if len(self.own_history) != len(self.opponent_history):
            raise AssertionError("agent histories out of sync")


def run_match(ensemble_config, kind: StrategyKind, rounds: int, seed: int,
              backend_name: Optional[str] = None):
    """Play a full bot session and return its summary.

    Deterministic in (configs, seed); repeated runs produce byte-identical
    session logs.
    """
    import dataclasses

    from .session import Session, SessionConfig

    cfg = SessionConfig(
        ensemble=dataclasses.replace(ensemble_config, seed=seed),
        rounds=rounds,
        label=kind.encode(),
    )
    session = Session(cfg, backend_name=backend_name)
    agent = Agent(kind, session.opponent_stream())
    while not session.finished:
        move = agent.move()
        record = session.play(move, decision_ms=0)
        agent.observe(move, record.multi_move)
    return session.summary()
