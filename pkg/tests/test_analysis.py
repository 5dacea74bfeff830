"""Batch harness and CSV emission."""

import csv
import statistics

import pytest

from rpslab import backend
from rpslab.analysis import (
    BatchCell,
    CellReport,
    SweepReport,
    replication_seed,
    run_batch,
    run_cell,
    single_model_sweep,
    write_fig1,
    write_fig2,
    write_sweep,
    write_table4,
    write_table5,
)
from rpslab.ensemble import EnsembleConfig
from rpslab.opponents import parse_strategy
from rpslab.rng import REPLICATION_KEY_BASE, derive_seed


def small_cell(name="unit", spec="cycle:RPS", reps=5, rounds=40, base_seed=3):
    return BatchCell(name=name, opponent=parse_strategy(spec),
                     config=EnsembleConfig(), rounds=rounds,
                     replications=reps, base_seed=base_seed)


def test_replication_seed_key_layout():
    assert replication_seed(7, 0) == derive_seed(7, REPLICATION_KEY_BASE)
    assert replication_seed(7, 3) == derive_seed(7, REPLICATION_KEY_BASE + 3)
    seeds = {replication_seed(7, i) for i in range(100)}
    assert len(seeds) == 100
    with pytest.raises(ValueError):
        replication_seed(7, -1)


def test_cell_validation():
    with pytest.raises(ValueError):
        small_cell(reps=0)
    with pytest.raises(ValueError):
        small_cell(rounds=0)


def test_run_cell_totals_match_direct_runs():
    cell = small_cell()
    report = run_cell(cell)
    assert len(report.totals) == 5
    for i in range(5):
        arrays = backend.run_bot_match(cell.config, cell.opponent, cell.rounds,
                                       seed=replication_seed(cell.base_seed, i))
        assert report.totals[i] == arrays.total_score()
        moves = arrays.player_moves
        assert report.preference_counts[i] == tuple(
            int((moves == v).sum()) for v in range(3))
    assert sum(report.preference_counts[0]) == cell.rounds


def test_first_cumulative_is_prefix_sum_of_first_replication():
    report = run_cell(small_cell())
    assert len(report.first_cumulative) == 40
    assert report.first_cumulative[-1] == report.totals[0]
    diffs = [b - a for a, b in zip(report.first_cumulative,
                                   report.first_cumulative[1:])]
    assert all(d in (-1, 0, 1) for d in diffs)


def test_report_statistics():
    report = run_cell(small_cell())
    assert report.mean_total == statistics.fmean(report.totals)
    assert report.stdev_total == statistics.stdev(report.totals)
    assert 0.0 <= report.positive_fraction <= 1.0
    single = run_cell(small_cell(reps=1))
    assert single.stdev_total is None


def test_run_batch_and_lookup():
    cells = [small_cell(name="a"), small_cell(name="b", spec="uniform")]
    batch = run_batch(cells)
    assert batch.cell("a").cell.name == "a"
    assert batch.cell("b").cell.opponent == parse_strategy("uniform")
    with pytest.raises(KeyError):
        batch.cell("missing")


def test_sweep_uses_same_session_seeds_per_order():
    report = single_model_sweep((1, 2), parse_strategy("cycle:RP"), 30, 4,
                                base_seed=9)
    assert report.orders == (1, 2)
    assert report.opponent_name == "cycle:RP"
    for k, order in enumerate(report.orders):
        for i in range(4):
            arrays = backend.run_bot_match(
                EnsembleConfig(orders=(order,), focus_length=5),
                parse_strategy("cycle:RP"), 30,
                seed=replication_seed(9, i))
            assert report.totals[k][i] == arrays.total_score()


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_fig2_csv_layout(tmp_path):
    report = run_cell(small_cell())
    path = tmp_path / "fig2.csv"
    write_fig2(report, str(path))
    rows = read_csv(path)
    assert rows[0] == ["session", "total_score"]
    assert len(rows) == 6
    assert rows[1][0] == "unit-0000"
    assert [int(r[1]) for r in rows[1:]] == list(report.totals)


def test_fig1_csv_layout(tmp_path):
    path = tmp_path / "fig1.csv"
    write_fig1((0, 1, 1, 2), str(path))
    assert read_csv(path) == [
        ["round", "cumulative_score"],
        ["1", "0"], ["2", "1"], ["3", "1"], ["4", "2"],
    ]


def test_table4_csv_layout(tmp_path):
    report = run_cell(small_cell())
    path = tmp_path / "table4.csv"
    write_table4(report, str(path))
    rows = read_csv(path)
    assert rows[0] == ["session", "rock", "paper", "scissors"]
    assert rows[-2][0] == "MEAN"
    assert rows[-1][0] == "STDEV"
    body = rows[1:-2]
    assert len(body) == 5
    for row, prefs in zip(body, report.preference_counts):
        assert tuple(int(x) for x in row[1:]) == prefs
    assert float(rows[-2][1]) == pytest.approx(
        statistics.fmean(p[0] for p in report.preference_counts), abs=1e-4)


def test_table5_csv_layout(tmp_path):
    report = run_cell(small_cell())
    path = tmp_path / "table5.csv"
    write_table5(report, str(path))
    rows = read_csv(path)
    assert rows[0] == ["session", "ai_1", "ai_2", "ai_3", "ai_4", "ai_5", "multi"]
    body = rows[1:-2]
    for row, members, total in zip(body, report.member_totals, report.totals):
        assert tuple(int(x) for x in row[1:6]) == members
        assert int(row[6]) == total


def test_sweep_csv_layout(tmp_path):
    report = single_model_sweep((1, 3), parse_strategy("uniform"), 20, 3,
                                base_seed=1)
    path = tmp_path / "sweep.csv"
    write_sweep(report, str(path))
    rows = read_csv(path)
    assert rows[0] == ["replication", "ai_1", "ai_3"]
    assert rows[-2][0] == "MEAN"
    assert rows[-1][0] == "STDEV"
    assert len(rows) == 1 + 3 + 2


def test_reports_deterministic_across_backends():
    if len(backend.available_backends()) < 2:
        pytest.skip("compiled kernel not built")
    a = run_cell(small_cell(), backend_name="python")
    b = run_cell(small_cell(), backend_name="compiled")
    assert a.totals == b.totals
    assert a.member_totals == b.member_totals
    assert a.preference_counts == b.preference_counts
    assert a.first_cumulative == b.first_cumulative
