"""Engine backend selection and dispatch.

The compiled kernel is used when its extension module imported cleanly;
otherwise everything runs on the pure-Python twin. Set RPSLAB_PURE_PYTHON=1
to force the pure backend even when the extension is present, or pass an
explicit backend name to any entry point that accepts one.
"""

from __future__ import annotations

import os
from typing import NamedTuple, Optional

import numpy as np

from . import _pykernel, opponents
from ._pykernel import (
    STRAT_BIASED,
    STRAT_CYCLE,
    STRAT_MIMIC,
    STRAT_REACTOR,
    STRAT_UNIFORM,
    STRAT_WSLS,
)
from .rng import OPPONENT_STREAM_KEY, SplitMix64, derive_seed

_BACKENDS = {"python": _pykernel}

_FORCE_PURE = os.environ.get("RPSLAB_PURE_PYTHON", "").strip() not in ("", "0")

if not _FORCE_PURE:
    try:
        from . import _kernel  # compiled extension, may be absent
    except ImportError:
        _kernel = None
    else:
        _BACKENDS["compiled"] = _kernel

DEFAULT_BACKEND = "compiled" if "compiled" in _BACKENDS else "python"


def available_backends() -> tuple:
    return tuple(sorted(_BACKENDS))


def resolve_name(name: Optional[str]) -> str:
    if name is None:
        return DEFAULT_BACKEND
    if name not in _BACKENDS:
        raise ValueError(
            f"unknown backend {name!r}; available: {', '.join(available_backends())}"
        )
    return name


def make_core(orders, focus_length: int, seed: int, max_rounds: int = 512,
              backend_name: Optional[str] = None):
    mod = _BACKENDS[resolve_name(backend_name)]
    return mod.EnsembleCore(tuple(int(m) for m in orders), int(focus_length),
                            int(seed), int(max_rounds))


def strategy_params(kind, opp_stream: SplitMix64) -> tuple:
    """Flatten a strategy into the kernel calling convention.

    Construction-time draws (a random reactor table) are taken from
    `opp_stream` here, so the kernels only ever draw per round.
    """
    t0 = t1 = 0.0
    pattern: tuple = ()
    k = 0
    table: tuple = ()
    if isinstance(kind, opponents.UniformRandom):
        code = STRAT_UNIFORM
    elif isinstance(kind, opponents.BiasedRandom):
        code = STRAT_BIASED
        t0, t1 = kind.thresholds()
    elif isinstance(kind, opponents.Cycle):
        code = STRAT_CYCLE
        pattern = tuple(int(m) for m in kind.pattern)
    elif isinstance(kind, opponents.WinStayLoseShift):
        code = STRAT_WSLS
    elif isinstance(kind, opponents.FixedMemoryReactor):
        code = STRAT_REACTOR
        k = kind.k
        table = tuple(int(m) for m in opponents.materialize_table(kind, opp_stream))
    elif isinstance(kind, opponents.MimicLastAIMove):
        code = STRAT_MIMIC
    else:
        raise TypeError(f"unknown strategy kind {kind!r}")
    return code, t0, t1, pattern, k, table


class MatchArrays(NamedTuple):
    """Per-round arrays from a scripted match (row = round, col = member)."""

    player_moves: np.ndarray
    multi_moves: np.ndarray
    dominant_index: np.ndarray
    member_moves: np.ndarray
    member_scores: np.ndarray

    def ai_scores(self) -> np.ndarray:
        """Pool score per round: +1 win, 0 draw, -1 loss."""
        d = (self.multi_moves.astype(np.int32) - self.player_moves) % 3
        return np.where(d == 1, 1, np.where(d == 0, 0, -1)).astype(np.int32)

    def total_score(self) -> int:
        return int(self.ai_scores().sum())


def run_bot_match(config, kind, rounds: int, seed: Optional[int] = None,
                  backend_name: Optional[str] = None) -> MatchArrays:
    """Run a scripted match on the chosen backend, no session bookkeeping."""
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    mod = _BACKENDS[resolve_name(backend_name)]
    base = config.seed if seed is None else int(seed)
    opp = SplitMix64(derive_seed(base, OPPONENT_STREAM_KEY))
    code, t0, t1, pattern, k, table = strategy_params(kind, opp)
    out = mod.run_bot_match(config.orders, config.focus_length, base, int(rounds),
                            code, t0, t1, pattern, k, table, opp.state)
    return MatchArrays(*out)
