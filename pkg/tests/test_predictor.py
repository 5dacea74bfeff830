"""Transition-count model: warm-up, counting, prediction, countering."""

from fractions import Fraction

import pytest

from rpslab.game import Move, beats
from rpslab.predictor import (
    MAX_ORDER,
    UNIFORM,
    MarkovPredictor,
    TransitionTable,
    table_from_history,
)
from rpslab.rng import SplitMix64

R, P, S = Move.ROCK, Move.PAPER, Move.SCISSORS


def test_order_bounds():
    MarkovPredictor(1)
    MarkovPredictor(MAX_ORDER)
    for bad in (0, -1, MAX_ORDER + 1):
        with pytest.raises(ValueError):
            MarkovPredictor(bad)


def test_uniform_before_full_context():
    for m in range(1, 6):
        pred = MarkovPredictor(m)
        history = []
        for i in range(m):
            assert pred.predict(history) == UNIFORM
            assert pred.predict() == UNIFORM
            pred.push(R)
            history.append(R)
        # history now exactly m long: context exists but row may be empty
        assert len(history) == m


def test_unseen_context_is_uniform():
    pred = MarkovPredictor(2)
    for mv in (R, R, R, R):
        pred.push(mv)
    # context (R, R) seen; (P, S) never
    assert pred.predict([P, S]) == UNIFORM


def test_counts_simple_order_1():
    # player: R R P R -> transitions R->R, R->P, P->R
    pred = MarkovPredictor(1)
    for mv in (R, R, P, R):
        pred.push(mv)
    assert pred.table.row((int(R),)) == [1, 1, 0]
    assert pred.table.row((int(P),)) == [1, 0, 0]
    assert pred.table.total == 3
    # current context is (R,): counts 1/1/0 -> halves
    assert pred.predict() == (Fraction(1, 2), Fraction(1, 2), Fraction(0))


def test_counts_order_2_context_is_oldest_first():
    # player: R P S; the single transition is (R,P) -> S
    pred = MarkovPredictor(2)
    for mv in (R, P, S):
        pred.push(mv)
    assert pred.table.row((int(R), int(P))) == [0, 0, 1]
    assert pred.table.row((int(P), int(R))) is None


def test_prediction_matches_brute_force_counts():
    # oracle: recount transitions from scratch at every step
    rng = SplitMix64(2024)
    for m in (1, 2, 3, 5):
        pred = MarkovPredictor(m)
        history = []
        for _ in range(120):
            mv = Move(rng.randbelow(3))
            pred.push(mv)
            history.append(mv)
            counts = {}
            for i in range(m, len(history)):
                ctx = tuple(int(x) for x in history[i - m:i])
                row = counts.setdefault(ctx, [0, 0, 0])
                row[int(history[i])] += 1
            ctx = tuple(int(x) for x in history[-m:]) if len(history) >= m else None
            expected = UNIFORM
            if ctx is not None and ctx in counts:
                row = counts[ctx]
                expected = tuple(Fraction(c, sum(row)) for c in row)
            assert pred.predict() == expected
            assert pred.table.total == max(0, len(history) - m)


def test_observe_consumes_growing_prefix():
    pred = MarkovPredictor(1)
    history = [R, P, P, S]
    pred.observe(history[:2])
    pred.observe(history)  # only the new suffix is counted
    assert pred.moves_seen == 4
    assert pred.table.total == 3
    with pytest.raises(ValueError):
        pred.observe(history[:1])


def test_act_counters_unique_argmax():
    pred = MarkovPredictor(1)
    for mv in (R, P, R, P, R, P, R):
        pred.push(mv)
    # after R the player always played P: predict P, counter with S
    rng = SplitMix64(0)
    for _ in range(20):
        assert pred.act(rng) is beats(P)


def test_act_consumes_exactly_one_draw_per_call():
    pred = MarkovPredictor(1)
    for mv in (R, P, R, P, R):
        pred.push(mv)
    rng_a = SplitMix64(33)
    rng_b = SplitMix64(33)
    pred.act(rng_a)
    rng_b.next_u64()
    assert rng_a.state == rng_b.state  # one word consumed even with no tie


def test_act_tie_sampling_hits_every_candidate():
    pred = MarkovPredictor(1)
    # after R: P once, S once -> two-way tie between P and S
    for mv in (R, P, R, S, R):
        pred.push(mv)
    rng = SplitMix64(5)
    seen = {pred.act(rng) for _ in range(200)}
    assert seen == {beats(P), beats(S)}


def test_act_uniform_on_empty_history_covers_all_moves():
    pred = MarkovPredictor(3)
    rng = SplitMix64(11)
    seen = {pred.act(rng) for _ in range(100)}
    assert seen == {R, P, S}


def test_table_from_history_equals_incremental():
    rng = SplitMix64(404)
    history = [Move(rng.randbelow(3)) for _ in range(200)]
    for m in (1, 2, 4):
        batch = table_from_history(history, m)
        inc = MarkovPredictor(m)
        for mv in history:
            inc.push(mv)
        assert batch.counts == inc.table.counts
        assert batch.total == inc.table.total


def test_csv_rows_sorted_and_nonzero():
    table = table_from_history([R, P, R, P, R], 1)
    rows = table.csv_rows()
    assert rows == sorted(rows)
    assert all(count > 0 for _, _, count in rows)
    assert sum(count for _, _, count in rows) == table.total
