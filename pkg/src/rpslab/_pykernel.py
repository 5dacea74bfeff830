"""Pure-Python engine core. Reference implementation for the compiled kernel.

Both kernels expose the same two entry points:

* EnsembleCore  - per-round propose/settle stepping for one member pool
* run_bot_match - flat scripted-match loop returning per-round arrays

and must produce bit-identical outputs for identical inputs; the test suite
replays matches across both to enforce that.
"""

from __future__ import annotations

import operator

import numpy as np

from .predictor import MarkovPredictor
from .rng import SplitMix64, derive_seed

BACKEND_NAME = "python"

STRAT_UNIFORM = 0
STRAT_BIASED = 1
STRAT_CYCLE = 2
STRAT_WSLS = 3
STRAT_REACTOR = 4
STRAT_MIMIC = 5


class EnsembleCore:
    """Round stepper for one pool: every member proposes, one move is played.

    propose() consumes exactly one draw per member and must be followed by
    settle() before the next propose(); the pair advances one round.
    """

    def __init__(self, orders, focus_length: int, seed: int,
                 max_rounds: int = 512) -> None:
        self.orders = tuple(int(m) for m in orders)
        if not self.orders:
            raise ValueError("orders must be nonempty")
        self.focus_length = int(focus_length)
        if self.focus_length < 1:
            raise ValueError("focus_length must be at least 1")
        self.max_rounds = int(max_rounds)
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")
        self.members = [MarkovPredictor(m) for m in self.orders]
        self.streams = [SplitMix64(derive_seed(seed, m)) for m in self.orders]
        self.round_number = 1
        self.dominant_index = 0
        self._scores = [[] for _ in self.orders]
        self._player: list = []
        self._pending = None

    def propose(self) -> list:
        if self._pending is not None:
            raise RuntimeError("propose() called twice without settle()")
        if self.round_number > self.max_rounds:
            raise RuntimeError("round capacity exceeded; rebuild with a larger max_rounds")
        moves = [
            int(member.act(stream))
            for member, stream in zip(self.members, self.streams)
        ]
        self._pending = moves
        return list(moves)

    def settle(self, player_move: int):
        """Score the pending proposals against the player's move.

        Returns (member_scores, next_dominant_index, window_start,
        window_end, window_scores); the window fields describe the
        selection made for the *next* round.
        """
        if self._pending is None:
            raise RuntimeError("settle() called before propose()")
        pm = operator.index(player_move)
        if not 0 <= pm <= 2:
            raise ValueError(f"bad move value {player_move!r}")
        moves = self._pending
        self._pending = None

        scores = []
        for mv in moves:
            d = (mv - pm) % 3
            scores.append(1 if d == 1 else (0 if d == 0 else -1))
        for history, s in zip(self._scores, scores):
            history.append(s)
        for member in self.members:
            member.push(pm)
        self._player.append(pm)

        nxt_round = self.round_number + 1
        lo = max(1, nxt_round - self.focus_length)
        hi = nxt_round - 1
        window = [sum(history[lo - 1:hi]) for history in self._scores]
        best = max(window)
        nxt = window.index(best)

        self.round_number = nxt_round
        self.dominant_index = nxt
        return scores, nxt, lo, hi, window

    def score_history(self) -> list:
        return [list(history) for history in self._scores]

    def player_history(self) -> list:
        return list(self._player)


def run_bot_match(orders, focus_length: int, seed: int, rounds: int,
                  code: int, t0: float, t1: float, pattern, k: int,
                  table, opp_state: int):
    """Scripted match: pool vs one strategy, no session bookkeeping.

    The strategy arrives pre-normalized (see backend.strategy_params); the
    opponent stream continues from `opp_state` so any construction-time
    draws already happened. Returns per-round numpy arrays
    (player_moves, multi_moves, dominant_index, member_moves, member_scores).
    """
    core = EnsembleCore(orders, focus_length, seed, rounds)
    opp = SplitMix64(opp_state)
    n_members = len(core.orders)
    pattern = [int(m) for m in pattern]
    table = [int(m) for m in table]

    player = np.empty(rounds, dtype=np.int8)
    multi = np.empty(rounds, dtype=np.int8)
    dominant = np.empty(rounds, dtype=np.int16)
    member_moves = np.empty((rounds, n_members), dtype=np.int8)
    member_scores = np.empty((rounds, n_members), dtype=np.int8)

    own_last = -1
    ai_last = -1
    own_tail: list = []  # reactor context, oldest first

    for r in range(rounds):
        if code == STRAT_UNIFORM:
            pm = opp.randbelow(3)
        elif code == STRAT_BIASED:
            u = opp.next_unit()
            pm = 0 if u < t0 else (1 if u < t1 else 2)
        elif code == STRAT_CYCLE:
            pm = pattern[r % len(pattern)]
        elif code == STRAT_WSLS:
            if r == 0:
                pm = opp.randbelow(3)
            elif (own_last - ai_last) % 3 == 2:
                pm = (own_last + 1) % 3
            else:
                pm = own_last
        elif code == STRAT_REACTOR:
            if r < k:
                pm = opp.randbelow(3)
            else:
                idx = 0
                for m in own_tail:
                    idx = idx * 3 + m
                pm = table[idx]
        elif code == STRAT_MIMIC:
            pm = opp.randbelow(3) if r == 0 else ai_last
        else:
            raise ValueError(f"unknown strategy code {code}")

        proposals = core.propose()
        di = core.dominant_index
        ai = proposals[di]
        scores, _, _, _, _ = core.settle(pm)

        player[r] = pm
        multi[r] = ai
        dominant[r] = di
        member_moves[r] = proposals
        member_scores[r] = scores

        own_last = pm
        ai_last = ai
        if code == STRAT_REACTOR:
            own_tail.append(pm)
            if len(own_tail) > k:
                del own_tail[0]

    return player, multi, dominant, member_moves, member_scores
