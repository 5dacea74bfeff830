"""Full-session orchestration: round loop, append-only log, replay, summary.

A session log is line-delimited text. The header names the engine version
and counting convention so replays can refuse incompatible logs:

    #rpslog v1 seed=<u64> orders=<csv> F=<int> a=<num> rounds=<int> \
        engine=<version> convention=<tag> label=<urlencoded>

Each completed round appends one line:

    n,player,multi,dominant,member_moves(;-joined),member_scores(;-joined),\
        points,cum_points,cum_score,ms

Moves are R/P/S codes, `dominant` is the memory length of the member whose
proposal was played, and `ms` is the player's decision time. Lines starting
with `#` after the header are annotations (e.g. late-move flags) and are
ignored by replay.
"""

from __future__ import annotations

import dataclasses
import urllib.parse
from dataclasses import dataclass
from decimal import Decimal
from typing import Optional, Sequence, TextIO

from . import __version__
from .ensemble import Ensemble, EnsembleConfig
from .game import (
    DEFAULT_SCHEME,
    Move,
    Outcome,
    PayoffScheme,
    judge,
    player_points,
    reward,
)
from .rng import MASK64, OPPONENT_STREAM_KEY, SplitMix64, derive_seed

CONVENTION = "playerctx1"  # player-move contexts, per-row normalization


class ConfigError(ValueError):
    """Invalid session configuration; message lists each bad field."""


class SessionError(RuntimeError):
    """Round-loop protocol violation (finished session, out-of-order call)."""


class LogFormatError(ValueError):
    def __init__(self, line_no: int, message: str) -> None:
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class SessionConfig:
    ensemble: EnsembleConfig = EnsembleConfig()
    scheme: PayoffScheme = DEFAULT_SCHEME
    rounds: int = 300
    move_time_limit_s: float = 40.0
    warn_time_s: float = 20.0
    label: str = ""

    def __post_init__(self) -> None:
        problems = []
        if self.rounds < 1:
            problems.append("rounds must be at least 1")
        if not 30 <= self.move_time_limit_s <= 120:
            problems.append("move_time_limit_s must be within 30..120")
        if not 0 < self.warn_time_s < self.move_time_limit_s:
            problems.append("warn_time_s must be positive and below the move time limit")
        if problems:
            raise ConfigError("; ".join(problems))


@dataclass(frozen=True)
class RoundRecord:
    round: int
    player_move: Move
    multi_move: Move
    dominant_order: int
    member_moves: tuple
    member_scores: tuple
    outcome_ai: Outcome
    player_points: int
    cumulative_player_points: int
    cumulative_ai_score: int
    decision_ms: int

    def to_line(self) -> str:
        return ",".join((
            str(self.round),
            self.player_move.code,
            self.multi_move.code,
            str(self.dominant_order),
            ";".join(m.code for m in self.member_moves),
            ";".join(str(s) for s in self.member_scores),
            str(self.player_points),
            str(self.cumulative_player_points),
            str(self.cumulative_ai_score),
            str(self.decision_ms),
        ))


@dataclass(frozen=True)
class LogHeader:
    seed: int
    orders: tuple
    focus_length: int
    a: int
    rounds: int
    engine: str = __version__
    convention: str = CONVENTION
    label: str = ""

    def to_line(self) -> str:
        return (
            f"#rpslog v1 seed={self.seed} "
            f"orders={','.join(str(m) for m in self.orders)} "
            f"F={self.focus_length} a={self.a} rounds={self.rounds} "
            f"engine={self.engine} convention={self.convention} "
            f"label={urllib.parse.quote(self.label, safe='')}"
        )


@dataclass(frozen=True)
class SessionSummary:
    rounds: int
    wins: int
    draws: int
    losses: int
    total_ai_score: int
    player_points: int
    reward_rmb: Decimal
    preference_counts: dict
    per_member_total_scores: dict
    dominance_occupancy: dict
    switches: int
    complete: bool
    label: str = ""

    def as_dict(self) -> dict:
        """JSON-friendly view (moves as codes, money as string)."""
        d = dataclasses.asdict(self)
        d["reward_rmb"] = str(self.reward_rmb)
        d["preference_counts"] = {m.code: c for m, c in self.preference_counts.items()}
        return d


class Session:
    """One full match: drives the pool round by round and logs every round.

    `sink` is an optional text stream; the header is written on creation and
    one line per round, flushed immediately, so an interrupted process
    leaves a replayable prefix behind.
    """

    def __init__(self, config: SessionConfig, sink: Optional[TextIO] = None,
                 backend_name: Optional[str] = None) -> None:
        self.config = config
        self.ensemble = Ensemble(
            config.ensemble, max_rounds=config.rounds, backend_name=backend_name
        )
        self.records: list = []
        self._cum_points = 0
        self._cum_score = 0
        self._sink = sink
        self.header = LogHeader(
            seed=config.ensemble.seed,
            orders=config.ensemble.orders,
            focus_length=config.ensemble.focus_length,
            a=config.scheme.a,
            rounds=config.rounds,
            label=config.label,
        )
        self._log_lines = [self.header.to_line()]
        if sink is not None:
            sink.write(self._log_lines[0] + "\n")
            sink.flush()

    @property
    def rounds_completed(self) -> int:
        return len(self.records)

    @property
    def current_round(self) -> int:
        """1-based number of the round awaiting a move."""
        return len(self.records) + 1

    @property
    def finished(self) -> bool:
        return len(self.records) >= self.config.rounds

    def opponent_stream(self) -> SplitMix64:
        """The scripted-opponent random stream for this session's seed."""
        return SplitMix64(derive_seed(self.config.ensemble.seed, OPPONENT_STREAM_KEY))

    def play(self, player_move: Move, decision_ms: int = 0) -> RoundRecord:
        """Play one round. Member proposals are drawn before the player's
        move is consumed, so the pool's move is committed independently."""
        if self.finished:
            raise SessionError("session finished; no more rounds")
        if decision_ms < 0:
            raise ValueError("decision_ms must be nonnegative")
        proposal = self.ensemble.propose()
        move = Move(player_move)
        result = self.ensemble.settle(move)

        outcome = judge(proposal.move, move)
        points = player_points(outcome.flip(), self.config.scheme)
        self._cum_points += points
        self._cum_score += int(outcome)
        record = RoundRecord(
            round=len(self.records) + 1,
            player_move=move,
            multi_move=proposal.move,
            dominant_order=proposal.dominant_order,
            member_moves=proposal.moves,
            member_scores=result.member_scores,
            outcome_ai=outcome,
            player_points=points,
            cumulative_player_points=self._cum_points,
            cumulative_ai_score=self._cum_score,
            decision_ms=int(decision_ms),
        )
        self.records.append(record)
        line = record.to_line()
        self._log_lines.append(line)
        if self._sink is not None:
            self._sink.write(line + "\n")
            self._sink.flush()
        return record

    def attach_sink(self, sink: Optional[TextIO]) -> None:
        """Point future log lines at `sink`; already-written lines are not
        replayed into it."""
        self._sink = sink

    def annotate(self, text: str) -> None:
        """Append a comment line to the log (ignored by replay)."""
        line = "#" + text.replace("\n", " ")
        self._log_lines.append(line)
        if self._sink is not None:
            self._sink.write(line + "\n")
            self._sink.flush()

    def log_text(self) -> str:
        return "\n".join(self._log_lines) + "\n"

    def summary(self) -> SessionSummary:
        return summarize_records(
            self.records, self.config.ensemble.orders, self.config.rounds,
            self.config.scheme, self.config.label,
        )


def summarize_records(records: Sequence[RoundRecord], orders: Sequence[int],
                      rounds: int, scheme: PayoffScheme = DEFAULT_SCHEME,
                      label: str = "") -> SessionSummary:
    wins = sum(1 for r in records if r.outcome_ai is Outcome.WIN)
    draws = sum(1 for r in records if r.outcome_ai is Outcome.DRAW)
    losses = sum(1 for r in records if r.outcome_ai is Outcome.LOSS)
    prefs = {m: 0 for m in Move}
    for r in records:
        prefs[r.player_move] += 1
    member_totals = {m: 0 for m in orders}
    occupancy = {m: 0 for m in orders}
    for r in records:
        for m, s in zip(orders, r.member_scores):
            member_totals[m] += s
        occupancy[r.dominant_order] += 1
    switches = sum(
        1 for prev, cur in zip(records, records[1:])
        if cur.dominant_order != prev.dominant_order
    )
    points = records[-1].cumulative_player_points if records else 0
    return SessionSummary(
        rounds=len(records),
        wins=wins,
        draws=draws,
        losses=losses,
        total_ai_score=wins - losses,
        player_points=points,
        reward_rmb=reward(points, scheme),
        preference_counts=prefs,
        per_member_total_scores=member_totals,
        dominance_occupancy=occupancy,
        switches=switches,
        complete=len(records) >= rounds,
        label=label,
    )


def _parse_header(line: str, line_no: int) -> LogHeader:
    parts = line.split()
    if len(parts) < 2 or parts[0] != "#rpslog" or parts[1] != "v1":
        raise LogFormatError(line_no, "not a v1 session log header")
    kv = {}
    for token in parts[2:]:
        key, sep, value = token.partition("=")
        if not sep:
            raise LogFormatError(line_no, f"bad header token {token!r}")
        kv[key] = value
    try:
        seed = int(kv["seed"])
        orders = tuple(int(x) for x in kv["orders"].split(","))
        focus = int(kv["F"])
        a = int(kv["a"])
        rounds = int(kv["rounds"])
    except KeyError as exc:
        raise LogFormatError(line_no, f"header missing {exc.args[0]}") from None
    except ValueError as exc:
        raise LogFormatError(line_no, f"bad header value: {exc}") from None
    if not 0 <= seed <= MASK64:
        raise LogFormatError(line_no, "seed out of 64-bit range")
    return LogHeader(
        seed=seed, orders=orders, focus_length=focus, a=a, rounds=rounds,
        engine=kv.get("engine", ""),
        convention=kv.get("convention", ""),
        label=urllib.parse.unquote(kv.get("label", "")),
    )


def _parse_round(line: str, line_no: int, expect_round: int,
                 n_members: int) -> RoundRecord:
    fields = line.split(",")
    if len(fields) != 10:
        raise LogFormatError(line_no, f"expected 10 fields, got {len(fields)}")
    try:
        n = int(fields[0])
        player = Move.from_code(fields[1])
        multi = Move.from_code(fields[2])
        dominant = int(fields[3])
        member_moves = tuple(Move.from_code(c) for c in fields[4].split(";"))
        member_scores = tuple(int(s) for s in fields[5].split(";"))
        points = int(fields[6])
        cum_points = int(fields[7])
        cum_score = int(fields[8])
        ms = int(fields[9])
    except ValueError as exc:
        raise LogFormatError(line_no, str(exc)) from None
    if n != expect_round:
        raise LogFormatError(line_no, f"round {n} out of order (expected {expect_round})")
    if len(member_moves) != n_members or len(member_scores) != n_members:
        raise LogFormatError(line_no, "member column count does not match header orders")
    if any(s not in (-1, 0, 1) for s in member_scores):
        raise LogFormatError(line_no, "member scores must be -1, 0 or 1")
    if ms < 0:
        raise LogFormatError(line_no, "decision time must be nonnegative")
    return RoundRecord(
        round=n,
        player_move=player,
        multi_move=multi,
        dominant_order=dominant,
        member_moves=member_moves,
        member_scores=member_scores,
        outcome_ai=judge(multi, player),
        player_points=points,
        cumulative_player_points=cum_points,
        cumulative_ai_score=cum_score,
        decision_ms=ms,
    )


def parse_log(text: str):
    """Parse a session log into (header, round records).

    Annotation lines (leading '#') after the header are skipped. Raises
    LogFormatError with a line number on any malformed content.
    """
    header: Optional[LogHeader] = None
    records: list = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if header is None:
            header = _parse_header(line, line_no)
            continue
        if line.startswith("#"):
            continue
        record = _parse_round(line, line_no, len(records) + 1, len(header.orders))
        records.append(record)
    if header is None:
        raise LogFormatError(1, "empty log")
    if len(records) > header.rounds:
        raise LogFormatError(0, "more round lines than the header announces")
    return header, records


def config_from_header(header: LogHeader) -> SessionConfig:
    return SessionConfig(
        ensemble=EnsembleConfig(
            orders=header.orders, focus_length=header.focus_length,
            seed=header.seed,
        ),
        scheme=PayoffScheme(a=header.a),
        rounds=header.rounds,
        label=header.label,
    )


@dataclass(frozen=True)
class Mismatch:
    round: int
    field: str
    logged: str
    regenerated: str


@dataclass(frozen=True)
class ReplayReport:
    verdict: bool
    complete: bool
    mismatches: tuple
    summary: SessionSummary

    @property
    def verdict_text(self) -> str:
        return "match" if self.verdict else "mismatch"


_CHECKED_FIELDS = (
    "multi_move", "dominant_order", "member_moves", "member_scores",
    "player_points", "cumulative_player_points", "cumulative_ai_score",
)


def _show(value) -> str:
    if isinstance(value, Move):
        return value.code
    if isinstance(value, tuple):
        return ";".join(_show(v) for v in value)
    return str(value)


def replay(text: str, backend_name: Optional[str] = None) -> ReplayReport:
    """Re-run a log's session from its seed and compare round for round.

    The verdict is `match` iff every regenerated member move, dominant
    order and score equals the logged value over the logged prefix.
    """
    header, records = parse_log(text)
    if header.convention and header.convention != CONVENTION:
        raise LogFormatError(
            0, f"log uses convention {header.convention!r}, engine speaks {CONVENTION!r}"
        )
    session = Session(config_from_header(header), backend_name=backend_name)
    mismatches = []
    for logged in records:
        regenerated = session.play(logged.player_move, logged.decision_ms)
        for name in _CHECKED_FIELDS:
            want = getattr(logged, name)
            got = getattr(regenerated, name)
            if want != got:
                mismatches.append(Mismatch(logged.round, name, _show(want), _show(got)))
    return ReplayReport(
        verdict=not mismatches,
        complete=len(records) >= header.rounds,
        mismatches=tuple(mismatches),
        summary=session.summary(),
    )


def resume_session(text: str, sink: Optional[TextIO] = None,
                   backend_name: Optional[str] = None) -> Session:
    """Rebuild a live Session from a log prefix (crash recovery).

    Replays the logged player moves through a fresh engine and verifies each
    regenerated round against the log; raises SessionError on divergence.
    The returned session continues from the first unplayed round. `sink`,
    if given, receives only future lines (open the original file in append
    mode); the replayed prefix is not rewritten.
    """
    header, records = parse_log(text)
    if header.convention and header.convention != CONVENTION:
        raise LogFormatError(
            0, f"log uses convention {header.convention!r}, engine speaks {CONVENTION!r}"
        )
    session = Session(config_from_header(header), backend_name=backend_name)
    for logged in records:
        regenerated = session.play(logged.player_move, logged.decision_ms)
        for name in _CHECKED_FIELDS:
            if getattr(logged, name) != getattr(regenerated, name):
                raise SessionError(
                    f"log diverges from engine at round {logged.round} ({name}); "
                    "refusing to resume"
                )
    session.attach_sink(sink)
    return session


def summarize(text: str) -> SessionSummary:
    """Summary statistics straight from a log, no re-simulation."""
    header, records = parse_log(text)
    return summarize_records(
        records, header.orders, header.rounds,
        PayoffScheme(a=header.a), header.label,
    )
