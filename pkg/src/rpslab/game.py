"""Move algebra, round adjudication and payoff arithmetic."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from enum import IntEnum
from fractions import Fraction

MOVE_CODES = "RPS"


class Move(IntEnum):
    ROCK = 0
    PAPER = 1
    SCISSORS = 2

    @property
    def code(self) -> str:
        return MOVE_CODES[self.value]

    @classmethod
    def from_code(cls, code: str) -> "Move":
        text = code.strip().upper()
        if len(text) != 1 or text not in MOVE_CODES:
            raise ValueError(f"not a move code: {code!r}")
        return cls(MOVE_CODES.index(text))


class Outcome(IntEnum):
    """Result of one round, stored from the AI side; flip() for the player."""

    WIN = 1
    DRAW = 0
    LOSS = -1

    def flip(self) -> "Outcome":
        return Outcome(-self.value)


def beats(move: Move) -> Move:
    """The unique move that defeats `move`."""
    return Move((move + 1) % 3)


def judge(ai: Move, player: Move) -> Outcome:
    """Adjudicate a round from the AI side."""
    d = (ai - player) % 3
    if d == 0:
        return Outcome.DRAW
    return Outcome.WIN if d == 1 else Outcome.LOSS


def ai_score(outcome: Outcome) -> int:
    """Per-round AI score: +1 win, 0 draw, -1 loss."""
    return int(outcome)


def _as_fraction(x) -> Fraction:
    # str round-trip keeps e.g. 2.5 exact instead of its binary expansion
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


@dataclass(frozen=True)
class PayoffScheme:
    """Virtual-point values per round and their exchange into money.

    `a` is the win/draw incentive ratio; a win earns `a` virtual points,
    a draw 1, a loss 0. The exchange rate is fixed so that a player in
    mixed equilibrium expects `target_expected_total` RMB over `rounds`
    rounds, on top of nothing; the show-up fee is added separately.
    """

    a: int = 2
    draw_points: int = 1
    loss_points: int = 0
    show_up_fee: int = 5  # RMB
    target_expected_total: int = 50  # RMB
    rounds: int = 300

    def __post_init__(self) -> None:
        if not self.a > 1:
            raise ValueError("payoff parameter a must exceed 1 (a win must beat a draw)")

    @property
    def win_points(self) -> int:
        return self.a

    @property
    def exchange_rate(self) -> Fraction:
        """RMB per virtual point; 0.15 exactly in the neutral a=2 game."""
        return Fraction(45, 100) / (1 + _as_fraction(self.a))


DEFAULT_SCHEME = PayoffScheme()


def player_points(outcome_for_player: Outcome, scheme: PayoffScheme = DEFAULT_SCHEME) -> int:
    """Virtual points the player earns for one round."""
    if outcome_for_player is Outcome.WIN:
        return scheme.win_points
    if outcome_for_player is Outcome.DRAW:
        return scheme.draw_points
    return scheme.loss_points


def reward(points: int, scheme: PayoffScheme = DEFAULT_SCHEME) -> Decimal:
    """Money for a session in RMB, exact to the cent.

    points * exchange_rate + show_up_fee, computed in rational arithmetic
    and only then rounded (half-even) to integer cents, so exports never
    accumulate float drift.
    """
    if points < 0:
        raise ValueError("virtual points cannot be negative")
    total = Fraction(points) * scheme.exchange_rate + scheme.show_up_fee
    cents = round(total * 100)
    return Decimal(cents).scaleb(-2)
