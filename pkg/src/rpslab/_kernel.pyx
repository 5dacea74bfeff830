# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled engine core.

Mirrors rpslab._pykernel bit for bit: same splitmix64 streams, same draw
pattern, same tie-breaking, same exceptions. The pure module is the
reference; equivalence tests replay matches on both and compare arrays.

Transition counts live in per-member open-addressing hash tables keyed by
the base-3 context code, sized so occupancy never passes a quarter of
capacity (at most one new context per round, at most 3^m per member).
"""

import operator

import numpy as np

from libc.stdint cimport int8_t, int16_t, int64_t, uint64_t

BACKEND_NAME = "compiled"

cdef uint64_t _GAMMA = 0x9E3779B97F4A7C15ULL
cdef uint64_t _EMPTY = 0xFFFFFFFFFFFFFFFFULL
cdef double _UNIT = 1.0 / 9007199254740992.0  # 2^-53

cdef enum:
    _MAX_MEMBERS = 64

cdef enum:
    STRAT_UNIFORM = 0
    STRAT_BIASED = 1
    STRAT_CYCLE = 2
    STRAT_WSLS = 3
    STRAT_REACTOR = 4
    STRAT_MIMIC = 5


cdef inline uint64_t _finalize(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t _next(uint64_t *state) nogil:
    state[0] += _GAMMA
    return _finalize(state[0])


def _derive(seed, key):
    """Python-visible twin of rng.derive_seed, for parity tests."""
    cdef uint64_t z = (<uint64_t>seed) + _GAMMA * ((<uint64_t>key) + 1)
    return _finalize(_finalize(z) + _GAMMA)


def _next_u64(state):
    """Advance-and-finalize step exposed for parity tests."""
    cdef uint64_t s = <uint64_t>state
    cdef uint64_t v = _next(&s)
    return v, s


cdef inline long long _pow3(int m) nogil:
    cdef long long p = 1
    cdef int i
    for i in range(m):
        p *= 3
    return p


cdef class EnsembleCore:
    """Round stepper for one pool; see _pykernel.EnsembleCore for semantics."""

    cdef readonly tuple orders
    cdef readonly int focus_length
    cdef readonly int max_rounds
    cdef readonly int round_number
    cdef readonly int dominant_index
    cdef int n_members
    cdef bint has_pending

    cdef long long[::1] order_arr
    cdef long long[::1] pow_drop      # 3^(order-1), for rolling context updates
    cdef long long[::1] ctx_code
    cdef long long[::1] ctx_len
    cdef uint64_t[::1] stream
    cdef uint64_t[::1] keys
    cdef int64_t[::1] counts          # 3 per slot
    cdef long long[::1] occupancy
    cdef long long[::1] capacity
    cdef long long[::1] slot_off
    cdef uint64_t[::1] cap_mask
    cdef int8_t[::1] scores           # row-major rounds x members
    cdef int8_t[::1] player
    cdef int8_t[::1] pending

    def __init__(self, orders, int focus_length, unsigned long long seed,
                 int max_rounds=512):
        cdef int i, m
        cdef long long want, cap, total

        orders = tuple(int(m_) for m_ in orders)
        if not orders:
            raise ValueError("orders must be nonempty")
        if len(orders) > _MAX_MEMBERS:
            raise ValueError(f"at most {_MAX_MEMBERS} members supported")
        for m in orders:
            if not 1 <= m <= 16:
                raise ValueError("order must be between 1 and 16")
        if focus_length < 1:
            raise ValueError("focus_length must be at least 1")
        if max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")

        self.orders = orders
        self.focus_length = focus_length
        self.max_rounds = max_rounds
        self.n_members = len(orders)
        self.round_number = 1
        self.dominant_index = 0
        self.has_pending = False

        n = self.n_members
        self.order_arr = np.array(orders, dtype=np.int64)
        self.pow_drop = np.array([_pow3(m - 1) for m in orders], dtype=np.int64)
        self.ctx_code = np.zeros(n, dtype=np.int64)
        self.ctx_len = np.zeros(n, dtype=np.int64)
        self.stream = np.array(
            [_derive(seed, m) for m in orders], dtype=np.uint64
        )

        caps = []
        total = 0
        for i in range(n):
            want = 4 * min(<long long>max_rounds, _pow3(orders[i])) + 8
            cap = 16
            while cap < want:
                cap <<= 1
            caps.append((cap, total))
            total += cap
        self.capacity = np.array([c for c, _ in caps], dtype=np.int64)
        self.slot_off = np.array([o for _, o in caps], dtype=np.int64)
        self.cap_mask = np.array([c - 1 for c, _ in caps], dtype=np.uint64)
        self.keys = np.full(total, _EMPTY, dtype=np.uint64)
        self.counts = np.zeros(total * 3, dtype=np.int64)
        self.occupancy = np.zeros(n, dtype=np.int64)

        self.scores = np.zeros(<long long>max_rounds * n, dtype=np.int8)
        self.player = np.zeros(max_rounds, dtype=np.int8)
        self.pending = np.zeros(n, dtype=np.int8)

    cdef Py_ssize_t _slot(self, int i, uint64_t key) nogil:
        """Index of `key`'s slot for member i, or of the first empty probe."""
        cdef uint64_t mask = self.cap_mask[i]
        cdef uint64_t h = _finalize(key) & mask
        cdef Py_ssize_t off = self.slot_off[i]
        cdef Py_ssize_t s
        while True:
            s = off + <Py_ssize_t>h
            if self.keys[s] == key or self.keys[s] == _EMPTY:
                return s
            h = (h + 1) & mask

    cdef int _propose_c(self) except -1:
        cdef int i, j, n_c, predicted
        cdef long long c0, c1, c2, best
        cdef Py_ssize_t s
        cdef bint have_row
        cdef int cand[3]
        cdef uint64_t draw
        for i in range(self.n_members):
            have_row = False
            c0 = c1 = c2 = 0
            if self.ctx_len[i] == self.order_arr[i]:
                s = self._slot(i, <uint64_t>self.ctx_code[i])
                if self.keys[s] != _EMPTY:
                    c0 = self.counts[s * 3]
                    c1 = self.counts[s * 3 + 1]
                    c2 = self.counts[s * 3 + 2]
                    have_row = True
            draw = _next(&self.stream[i])
            if have_row and c0 + c1 + c2 > 0:
                best = c0
                if c1 > best:
                    best = c1
                if c2 > best:
                    best = c2
                n_c = 0
                if c0 == best:
                    cand[n_c] = 0
                    n_c += 1
                if c1 == best:
                    cand[n_c] = 1
                    n_c += 1
                if c2 == best:
                    cand[n_c] = 2
                    n_c += 1
                predicted = cand[draw % <uint64_t>n_c]
            else:
                predicted = <int>(draw % 3)
            self.pending[i] = <int8_t>((predicted + 1) % 3)
        return 0

    cdef int _settle_c(self, int pm, int8_t *scores_out, long long *window_out,
                       int *nxt_out, int *lo_out, int *hi_out) except -1:
        cdef int i, d, nxt, lo, hi, rn
        cdef long long w, best
        cdef Py_ssize_t s, rr
        cdef int n = self.n_members

        rn = self.round_number
        for i in range(n):
            d = (self.pending[i] - pm + 3) % 3
            scores_out[i] = 1 if d == 1 else (0 if d == 0 else -1)
            self.scores[(rn - 1) * n + i] = scores_out[i]

        for i in range(n):
            if self.ctx_len[i] == self.order_arr[i]:
                s = self._slot(i, <uint64_t>self.ctx_code[i])
                if self.keys[s] == _EMPTY:
                    if self.occupancy[i] >= self.capacity[i]:
                        raise RuntimeError("transition table full")
                    self.keys[s] = <uint64_t>self.ctx_code[i]
                    self.occupancy[i] += 1
                self.counts[s * 3 + pm] += 1
                self.ctx_code[i] = (self.ctx_code[i] % self.pow_drop[i]) * 3 + pm
            else:
                self.ctx_code[i] = self.ctx_code[i] * 3 + pm
                self.ctx_len[i] += 1
        self.player[rn - 1] = <int8_t>pm

        lo = rn + 1 - self.focus_length
        if lo < 1:
            lo = 1
        hi = rn
        best = -(<long long>1 << 62)
        nxt = 0
        for i in range(n):
            w = 0
            for rr in range(lo - 1, hi):
                w += self.scores[rr * n + i]
            window_out[i] = w
            if w > best:
                best = w
                nxt = i
        self.round_number = rn + 1
        self.dominant_index = nxt
        nxt_out[0] = nxt
        lo_out[0] = lo
        hi_out[0] = hi
        return 0

    def propose(self):
        if self.has_pending:
            raise RuntimeError("propose() called twice without settle()")
        if self.round_number > self.max_rounds:
            raise RuntimeError("round capacity exceeded; rebuild with a larger max_rounds")
        self._propose_c()
        self.has_pending = True
        cdef int i
        return [self.pending[i] for i in range(self.n_members)]

    def settle(self, player_move):
        if not self.has_pending:
            raise RuntimeError("settle() called before propose()")
        cdef long long pm = operator.index(player_move)
        if not 0 <= pm <= 2:
            raise ValueError(f"bad move value {player_move!r}")
        cdef int8_t srow[_MAX_MEMBERS]
        cdef long long window[_MAX_MEMBERS]
        cdef int nxt, lo, hi, i
        self.has_pending = False
        self._settle_c(<int>pm, srow, window, &nxt, &lo, &hi)
        return (
            [srow[i] for i in range(self.n_members)],
            nxt, lo, hi,
            [window[i] for i in range(self.n_members)],
        )

    def score_history(self):
        cdef int i
        cdef Py_ssize_t r
        cdef Py_ssize_t done = self.round_number - 1
        return [
            [self.scores[r * self.n_members + i] for r in range(done)]
            for i in range(self.n_members)
        ]

    def player_history(self):
        cdef Py_ssize_t r
        return [self.player[r] for r in range(self.round_number - 1)]


def run_bot_match(orders, int focus_length, unsigned long long seed, int rounds,
                  int code, double t0, double t1, pattern, int k, table,
                  unsigned long long opp_state):
    """Scripted-match loop; same contract as _pykernel.run_bot_match."""
    cdef EnsembleCore core = EnsembleCore(tuple(orders), focus_length, seed, rounds)
    cdef int n = core.n_members
    cdef uint64_t opp = opp_state

    player = np.empty(rounds, dtype=np.int8)
    multi = np.empty(rounds, dtype=np.int8)
    dominant = np.empty(rounds, dtype=np.int16)
    member_moves = np.empty((rounds, n), dtype=np.int8)
    member_scores = np.empty((rounds, n), dtype=np.int8)

    cdef int8_t[::1] player_v = player
    cdef int8_t[::1] multi_v = multi
    cdef int16_t[::1] dominant_v = dominant
    cdef int8_t[:, ::1] mmoves_v = member_moves
    cdef int8_t[:, ::1] mscores_v = member_scores

    pat_arr = np.asarray(pattern, dtype=np.int8).reshape(-1)
    tab_arr = np.asarray(table, dtype=np.int8).reshape(-1)
    cdef int8_t[::1] pat_v = pat_arr
    cdef int8_t[::1] tab_v = tab_arr
    cdef Py_ssize_t plen = pat_v.shape[0]

    cdef int r, i, pm, di, ai, nxt, lo, hi
    cdef int own_last = -1, ai_last = -1
    cdef long long rcode = 0, rdrop = 0
    cdef int own_len = 0
    cdef double u
    cdef int8_t srow[_MAX_MEMBERS]
    cdef long long window[_MAX_MEMBERS]

    if code == STRAT_CYCLE and plen == 0:
        raise ValueError("cycle strategy needs a nonempty pattern")
    if code == STRAT_REACTOR:
        if k < 1:
            raise ValueError("reactor memory length must be at least 1")
        if tab_v.shape[0] != _pow3(k):
            raise ValueError("reactor table size mismatch")
        rdrop = _pow3(k - 1)

    for r in range(rounds):
        if code == STRAT_UNIFORM:
            pm = <int>(_next(&opp) % 3)
        elif code == STRAT_BIASED:
            u = <double>(_next(&opp) >> 11) * _UNIT
            pm = 0 if u < t0 else (1 if u < t1 else 2)
        elif code == STRAT_CYCLE:
            pm = pat_v[r % plen]
        elif code == STRAT_WSLS:
            if r == 0:
                pm = <int>(_next(&opp) % 3)
            elif (own_last - ai_last + 3) % 3 == 2:
                pm = (own_last + 1) % 3
            else:
                pm = own_last
        elif code == STRAT_REACTOR:
            if r < k:
                pm = <int>(_next(&opp) % 3)
            else:
                pm = tab_v[rcode]
        elif code == STRAT_MIMIC:
            pm = <int>(_next(&opp) % 3) if r == 0 else ai_last
        else:
            raise ValueError(f"unknown strategy code {code}")

        core._propose_c()
        di = core.dominant_index
        ai = core.pending[di]
        for i in range(n):
            mmoves_v[r, i] = core.pending[i]
        core._settle_c(pm, srow, window, &nxt, &lo, &hi)

        player_v[r] = <int8_t>pm
        multi_v[r] = <int8_t>ai
        dominant_v[r] = <int16_t>di
        for i in range(n):
            mscores_v[r, i] = srow[i]

        own_last = pm
        ai_last = ai
        if code == STRAT_REACTOR:
            if own_len == k:
                rcode = (rcode % rdrop) * 3 + pm
            else:
                rcode = rcode * 3 + pm
                own_len += 1

    return player, multi, dominant, member_moves, member_scores
