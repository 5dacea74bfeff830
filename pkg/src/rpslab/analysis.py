"""Batch experiment runner and table/figure CSV emission.

Replications use per-index derived seeds, so replication i's session is the
same whether you ask for 10 or 10000 of them, and cells can run in any
order or in parallel without coordination.
"""

from __future__ import annotations

import csv
import statistics
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import backend
from .ensemble import EnsembleConfig
from .game import Move
from .rng import REPLICATION_KEY_BASE, derive_seed


def replication_seed(base_seed: int, index: int) -> int:
    """Stable session seed for replication `index` of a batch."""
    if index < 0:
        raise ValueError("replication index must be nonnegative")
    return derive_seed(base_seed, REPLICATION_KEY_BASE + index)


@dataclass(frozen=True)
class BatchCell:
    """One experimental condition: a pool config against one opponent."""

    name: str
    opponent: object
    config: EnsembleConfig = field(default_factory=EnsembleConfig)
    rounds: int = 300
    replications: int = 100
    base_seed: int = 0

    def __post_init__(self) -> None:
        if self.rounds < 1:
            raise ValueError("rounds must be at least 1")
        if self.replications < 1:
            raise ValueError("replications must be at least 1")


@dataclass(frozen=True)
class CellReport:
    cell: BatchCell
    totals: tuple                    # per-replication pool totals
    member_totals: tuple             # per replication, per member
    preference_counts: tuple         # per replication, (R, P, S)
    first_cumulative: tuple          # replication 0 cumulative score series

    @property
    def mean_total(self) -> float:
        return statistics.fmean(self.totals)

    @property
    def stdev_total(self) -> Optional[float]:
        if len(self.totals) < 2:
            return None
        return statistics.stdev(self.totals)

    @property
    def positive_fraction(self) -> float:
        return sum(1 for t in self.totals if t > 0) / len(self.totals)


@dataclass(frozen=True)
class BatchReport:
    cells: tuple

    def cell(self, name: str) -> CellReport:
        for c in self.cells:
            if c.cell.name == name:
                return c
        raise KeyError(name)


def run_cell(cell: BatchCell, backend_name: Optional[str] = None) -> CellReport:
    totals = []
    member_totals = []
    prefs = []
    first_cum: tuple = ()
    for i in range(cell.replications):
        seed = replication_seed(cell.base_seed, i)
        arrays = backend.run_bot_match(
            cell.config, cell.opponent, cell.rounds, seed=seed,
            backend_name=backend_name,
        )
        scores = arrays.ai_scores()
        totals.append(int(scores.sum()))
        member_totals.append(tuple(
            int(s) for s in arrays.member_scores.astype(np.int64).sum(axis=0)
        ))
        counts = np.bincount(arrays.player_moves, minlength=3)
        prefs.append(tuple(int(c) for c in counts))
        if i == 0:
            first_cum = tuple(int(c) for c in np.cumsum(scores))
    return CellReport(
        cell=cell,
        totals=tuple(totals),
        member_totals=tuple(member_totals),
        preference_counts=tuple(prefs),
        first_cumulative=first_cum,
    )


def run_batch(cells: Sequence[BatchCell],
              backend_name: Optional[str] = None) -> BatchReport:
    """Run every cell serially; cells are independent and reorderable."""
    return BatchReport(tuple(run_cell(c, backend_name) for c in cells))


@dataclass(frozen=True)
class SweepReport:
    """Each order's single-model pool against one opponent."""

    orders: tuple
    opponent_name: str
    totals: tuple                    # totals[k][i]: order k, replication i

    @property
    def means(self) -> tuple:
        return tuple(statistics.fmean(t) for t in self.totals)

    @property
    def stdevs(self) -> tuple:
        if len(self.totals[0]) < 2:
            return tuple(None for _ in self.totals)
        return tuple(statistics.stdev(t) for t in self.totals)


def single_model_sweep(orders: Sequence[int], opponent, rounds: int,
                       replications: int, base_seed: int = 0,
                       backend_name: Optional[str] = None) -> SweepReport:
    """Run each order alone (a one-member pool) against the opponent.

    Replication i uses the same session seed for every order, and the member
    stream is keyed by the order itself, so a single model's draws here match
    its draws inside a larger pool given the same player history.
    """
    per_order = []
    for m in orders:
        config = EnsembleConfig(orders=(int(m),), focus_length=5, seed=0)
        totals = []
        for i in range(replications):
            seed = replication_seed(base_seed, i)
            arrays = backend.run_bot_match(
                config, opponent, rounds, seed=seed, backend_name=backend_name,
            )
            totals.append(arrays.total_score())
        per_order.append(tuple(totals))
    name = opponent.encode() if hasattr(opponent, "encode") else str(opponent)
    return SweepReport(tuple(int(m) for m in orders), name, tuple(per_order))


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def write_fig2(report: CellReport, path: str) -> None:
    """session label, total score: one row per replication."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["session", "total_score"])
        for i, total in enumerate(report.totals):
            w.writerow([f"{report.cell.name}-{i:04d}", total])


def write_fig1(series: Sequence[int], path: str) -> None:
    """round, cumulative score pairs for one session."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["round", "cumulative_score"])
        for n, c in enumerate(series, start=1):
            w.writerow([n, c])


def write_table4(report: CellReport, path: str) -> None:
    """Per-replication move preference counts with MEAN/STDEV tail rows."""
    cols = list(zip(*report.preference_counts))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["session", "rock", "paper", "scissors"])
        for i, row in enumerate(report.preference_counts):
            w.writerow([f"{report.cell.name}-{i:04d}", *row])
        w.writerow(["MEAN", *(_fmt(statistics.fmean(c)) for c in cols)])
        if len(report.preference_counts) >= 2:
            w.writerow(["STDEV", *(_fmt(statistics.stdev(c)) for c in cols)])


def write_table5(report: CellReport, path: str) -> None:
    """Per-replication member totals and pool total, MEAN/STDEV tail rows."""
    orders = report.cell.config.orders
    member_cols = list(zip(*report.member_totals))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["session", *(f"ai_{m}" for m in orders), "multi"])
        for i, row in enumerate(report.member_totals):
            w.writerow([f"{report.cell.name}-{i:04d}", *row, report.totals[i]])
        w.writerow([
            "MEAN",
            *(_fmt(statistics.fmean(c)) for c in member_cols),
            _fmt(statistics.fmean(report.totals)),
        ])
        if len(report.totals) >= 2:
            w.writerow([
                "STDEV",
                *(_fmt(statistics.stdev(c)) for c in member_cols),
                _fmt(statistics.stdev(report.totals)),
            ])


def write_sweep(report: SweepReport, path: str) -> None:
    """Single-model totals per replication, MEAN/STDEV tail rows."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["replication", *(f"ai_{m}" for m in report.orders)])
        for i in range(len(report.totals[0])):
            w.writerow([i, *(t[i] for t in report.totals)])
        w.writerow(["MEAN", *(_fmt(x) for x in report.means)])
        stdevs = report.stdevs
        if stdevs[0] is not None:
            w.writerow(["STDEV", *(_fmt(x) for x in stdevs)])
