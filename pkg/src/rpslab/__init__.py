"""Iterated rock-paper-scissors against a pool of pattern-matching bots.

The package runs sessions between a human (or scripted opponent) and a
multi-model AI: a pool of Markov-style predictors of different memory
lengths, with a sliding-window scoreboard choosing which member acts each
round. Sessions are logged in a replayable text format, and batch tools
reproduce the simulation tables behind the design.
"""

__version__ = "0.1.0"

from .backend import MatchArrays, available_backends, run_bot_match
from .ensemble import Ensemble, EnsembleConfig, Proposal, SelectionTrace
from .game import Move, Outcome, PayoffScheme, beats, judge, player_points, reward
from .opponents import (
    Agent,
    BiasedRandom,
    Cycle,
    FixedMemoryReactor,
    MimicLastAIMove,
    UniformRandom,
    WinStayLoseShift,
    parse_strategy,
    run_match,
)
from .predictor import MarkovPredictor
from .rng import SplitMix64, derive_seed
from .session import (
    LogFormatError,
    ReplayReport,
    RoundRecord,
    Session,
    SessionConfig,
    SessionSummary,
    parse_log,
    replay,
    resume_session,
    summarize,
)

__all__ = [
    "__version__",
    "Agent",
    "BiasedRandom",
    "Cycle",
    "Ensemble",
    "EnsembleConfig",
    "FixedMemoryReactor",
    "LogFormatError",
    "MarkovPredictor",
    "MatchArrays",
    "MimicLastAIMove",
    "Move",
    "Outcome",
    "PayoffScheme",
    "Proposal",
    "ReplayReport",
    "RoundRecord",
    "SelectionTrace",
    "Session",
    "SessionConfig",
    "SessionSummary",
    "SplitMix64",
    "UniformRandom",
    "WinStayLoseShift",
    "available_backends",
    "beats",
    "derive_seed",
    "judge",
    "parse_log",
    "parse_strategy",
    "player_points",
    "replay",
    "reward",
    "resume_session",
    "run_bot_match",
    "run_match",
    "summarize",
]
