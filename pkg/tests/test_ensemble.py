"""Window scoring, dominant selection and the pool's round lifecycle."""

import pytest

from rpslab.ensemble import (
    Ensemble,
    EnsembleConfig,
    SelectionTrace,
    rolling_score,
    select_dominant,
)
from rpslab.game import Move, judge
from rpslab.rng import SplitMix64


def test_config_validation():
    EnsembleConfig()  # defaults are legal
    EnsembleConfig(orders=(2, 7, 16), focus_length=1, seed=2**64 - 1)
    with pytest.raises(ValueError):
        EnsembleConfig(orders=())
    with pytest.raises(ValueError):
        EnsembleConfig(orders=(1, 1))
    with pytest.raises(ValueError):
        EnsembleConfig(orders=(3, 2))
    with pytest.raises(ValueError):
        EnsembleConfig(orders=(0, 1))
    with pytest.raises(ValueError):
        EnsembleConfig(orders=(1, 17))
    with pytest.raises(ValueError):
        EnsembleConfig(focus_length=0)
    with pytest.raises(ValueError):
        EnsembleConfig(seed=-1)
    with pytest.raises(ValueError):
        EnsembleConfig(seed=2**64)


def test_rolling_score_window_edges():
    history = [[1, -1, 0, 1, 1, -1, 0, 1]]
    # round 1: empty window
    assert rolling_score(history, 0, 1, 5) == 0
    # round 4, F=5: rounds 1..3
    assert rolling_score(history, 0, 4, 5) == 1 - 1 + 0
    # round 8, F=5: rounds 3..7
    assert rolling_score(history, 0, 8, 5) == 0 + 1 + 1 - 1 + 0
    # F=1: only the previous round
    assert rolling_score(history, 0, 8, 1) == 0
    with pytest.raises(IndexError):
        rolling_score(history, 1, 2, 5)


def test_rolling_score_matches_brute_force():
    rng = SplitMix64(808)
    history = [[rng.randbelow(3) - 1 for _ in range(60)] for _ in range(4)]
    for f in (1, 3, 5, 10):
        for n in range(1, 61):
            lo, hi = max(1, n - f), n - 1
            for member in range(4):
                expected = sum(history[member][lo - 1:hi])
                assert rolling_score(history, member, n, f) == expected


def test_select_dominant_round_1_is_first_member():
    history = [[], [], []]
    index, scores, lo, hi = select_dominant(history, 1, 5)
    assert index == 0
    assert scores == [0, 0, 0]
    assert (lo, hi) == (1, 0)  # empty window


def test_select_dominant_ties_take_lowest_index():
    history = [[1, 0], [0, 1], [1, 0]]
    index, scores, _, _ = select_dominant(history, 3, 5)
    assert scores == [1, 1, 1]
    assert index == 0


def test_select_dominant_prefers_best_window_sum():
    history = [[1, 1, -1], [1, 1, 1], [0, 0, 0]]
    index, scores, _, _ = select_dominant(history, 4, 5)
    assert scores == [1, 3, 0]
    assert index == 1


def test_select_dominant_forgets_outside_window():
    # member 0 was great early, member 1 lately; F=2 only sees rounds 4..5
    history = [[1, 1, 1, -1, -1], [-1, -1, -1, 1, 1]]
    index, scores, lo, hi = select_dominant(history, 6, 2)
    assert (lo, hi) == (4, 5)
    assert scores == [-2, 2]
    assert index == 1


def test_selection_trace_csv_shapes():
    header = SelectionTrace.csv_header((1, 2, 5))
    assert header == "round,window_start,window_end,score_ai_1,score_ai_2,score_ai_5,chosen,switched"
    trace = SelectionTrace(7, 2, 6, (3, -1, 0), 0, 1, True)
    assert trace.csv_row() == "7,2,6,3,-1,0,1,1"


class TestEnsembleLifecycle:
    def test_round_1_plays_member_0(self):
        ens = Ensemble(EnsembleConfig(seed=42))
        assert ens.round_number == 1
        assert ens.dominant_index == 0
        assert ens.dominant_order == 1
        proposal = ens.propose()
        assert len(proposal.moves) == 5
        assert proposal.dominant_index == 0
        assert proposal.move is proposal.moves[0]

    def test_settle_reports_scores_and_next_choice(self):
        ens = Ensemble(EnsembleConfig(seed=42))
        proposal = ens.propose()
        result = ens.settle(Move.ROCK)
        for mv, sc in zip(proposal.moves, result.member_scores):
            assert sc == int(judge(mv, Move.ROCK))
        assert ens.round_number == 2
        assert result.trace.round == 2
        assert result.trace.window_start == 1
        assert result.trace.window_end == 1
        assert result.next_dominant_index == ens.dominant_index

    def test_traces_accumulate_one_per_round(self):
        ens = Ensemble(EnsembleConfig(seed=3))
        rng = SplitMix64(1)
        for _ in range(20):
            ens.propose()
            ens.settle(Move(rng.randbelow(3)))
        assert len(ens.traces) == 21  # synthetic round-1 trace + 20 settles
        assert [t.round for t in ens.traces] == list(range(1, 22))

    def test_selection_matches_pure_function_every_round(self):
        ens = Ensemble(EnsembleConfig(seed=9, focus_length=5))
        rng = SplitMix64(77)
        for _ in range(50):
            ens.propose()
            ens.settle(Move(rng.randbelow(3)))
            history = ens.score_history()
            index, scores, lo, hi = select_dominant(history, ens.round_number, 5)
            trace = ens.traces[-1]
            assert trace.chosen_index == index
            assert list(trace.window_scores) == scores
            assert (trace.window_start, trace.window_end) == (lo, hi)

    def test_switched_flag_tracks_dominant_changes(self):
        ens = Ensemble(EnsembleConfig(seed=4))
        rng = SplitMix64(5)
        previous = ens.dominant_index
        for _ in range(40):
            ens.propose()
            result = ens.settle(Move(rng.randbelow(3)))
            assert result.switched == (result.next_dominant_index != previous)
            previous = result.next_dominant_index

    def test_propose_twice_without_settle_raises(self):
        ens = Ensemble(EnsembleConfig())
        ens.propose()
        with pytest.raises(RuntimeError):
            ens.propose()

    def test_settle_before_propose_raises(self):
        ens = Ensemble(EnsembleConfig())
        with pytest.raises(RuntimeError):
            ens.settle(Move.ROCK)

    def test_bad_player_move_rejected_and_state_preserved(self):
        ens = Ensemble(EnsembleConfig(seed=8))
        proposal = ens.propose()
        with pytest.raises(ValueError):
            ens.settle(3)
        # the pending proposal survives a rejected move
        result = ens.settle(Move.PAPER)
        assert len(result.member_scores) == 5
        assert ens.player_history() == [Move.PAPER]
        assert proposal.move in Move

    def test_round_capacity_enforced(self):
        ens = Ensemble(EnsembleConfig(seed=1), max_rounds=3)
        for _ in range(3):
            ens.propose()
            ens.settle(Move.ROCK)
        with pytest.raises(RuntimeError):
            ens.propose()

    def test_player_history_records_moves_in_order(self):
        ens = Ensemble(EnsembleConfig(seed=12))
        played = []
        rng = SplitMix64(6)
        for _ in range(10):
            ens.propose()
            mv = Move(rng.randbelow(3))
            ens.settle(mv)
            played.append(mv)
        assert ens.player_history() == played

    def test_same_seed_same_transcript(self):
        moves = [Move((i * 2 + 1) % 3) for i in range(30)]
        transcripts = []
        for _ in range(2):
            ens = Ensemble(EnsembleConfig(seed=777))
            out = []
            for mv in moves:
                out.append(int(ens.propose().move))
                ens.settle(mv)
            transcripts.append(out)
        assert transcripts[0] == transcripts[1]
