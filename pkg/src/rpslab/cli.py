"""Command-line front door.

Exit codes: 0 success (and replay verdict match), 1 usage error, 2 data
error (unreadable or malformed inputs), 3 replay verification mismatch.
"""

from __future__ import annotations

import argparse
import re
import secrets
import sys
import time
from pathlib import Path
from typing import Optional

from .analysis import (
    BatchCell,
    run_cell,
    single_model_sweep,
    write_fig1,
    write_fig2,
    write_sweep,
    write_table4,
    write_table5,
)
from .ensemble import EnsembleConfig
from .game import Move, Outcome, PayoffScheme
from .opponents import parse_strategy
from .session import (
    LogFormatError,
    Session,
    SessionConfig,
    replay,
    summarize,
)

USAGE_ERROR = 1
DATA_ERROR = 2
MISMATCH = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage problems; this tool reserves 2 for data."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _parse_orders(text: str) -> tuple:
    text = text.strip()
    m = re.fullmatch(r"(\d+)\s*(?:\.\.|-)\s*(\d+)", text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if hi < lo:
            raise ValueError(f"empty order range {text!r}")
        return tuple(range(lo, hi + 1))
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ValueError(f"orders must be a comma list or a range, got {text!r}") from None


def _add_common(p: argparse.ArgumentParser, with_rounds: bool = True) -> None:
    p.add_argument("--orders", type=_parse_orders, default=(1, 2, 3, 4, 5),
                   metavar="LIST", help="member memory lengths, e.g. 1,2,3 or 1..10")
    p.add_argument("--focus", type=int, default=5, metavar="F",
                   help="selection window length (default 5)")
    if with_rounds:
        p.add_argument("--rounds", type=int, default=300, metavar="N",
                       help="rounds per session (default 300)")
    p.add_argument("--seed", type=int, default=None, metavar="U64",
                   help="base seed; omitted = random, printed to stderr")
    p.add_argument("--out", default=".", metavar="DIR",
                   help="output directory (default current directory)")
    p.add_argument("--backend", choices=("python", "compiled"), default=None,
                   help="engine backend (default: compiled when available)")


def _resolve_seed(args: argparse.Namespace) -> int:
    if args.seed is None:
        seed = secrets.randbits(64)
        print(f"seed={seed} (generated)", file=sys.stderr)
        return seed
    return args.seed


def _ensemble_config(args: argparse.Namespace, seed: int) -> EnsembleConfig:
    return EnsembleConfig(orders=args.orders, focus_length=args.focus, seed=seed)


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _safe_name(label: str, fallback: str) -> str:
    name = re.sub(r"[^A-Za-z0-9._-]+", "_", label).strip("_")
    return name or fallback


def cmd_play(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args)
    try:
        config = SessionConfig(
            ensemble=_ensemble_config(args, seed),
            scheme=PayoffScheme(a=args.a),
            rounds=args.rounds,
            label=args.label,
        )
    except ValueError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return USAGE_ERROR
    out = _out_dir(args)
    log_path = out / f"play_{time.strftime('%Y%m%d_%H%M%S')}.log"
    verdict = {Outcome.WIN: "you win", Outcome.DRAW: "draw", Outcome.LOSS: "you lose"}
    with open(log_path, "w") as sink:
        session = Session(config, sink=sink, backend_name=args.backend)
        print(f"logging to {log_path}")
        while not session.finished:
            t0 = time.monotonic()
            try:
                raw = input(
                    f"round {session.current_round}/{config.rounds} "
                    "your move [r/p/s, q quits]: "
                )
            except (EOFError, KeyboardInterrupt):
                print()
                break
            text = raw.strip().lower()
            if text == "q":
                break
            if text not in ("r", "p", "s"):
                print("enter r, p or s (or q to quit)")
                continue
            ms = int((time.monotonic() - t0) * 1000)
            rec = session.play(Move.from_code(text), ms)
            yours = rec.outcome_ai.flip()
            print(
                f"  you: {rec.player_move.code}  ai: {rec.multi_move.code} "
                f"(ai-{rec.dominant_order})  {verdict[yours]}  "
                f"+{rec.player_points} points (total {rec.cumulative_player_points}, "
                f"ai score {rec.cumulative_ai_score})"
            )
    summary = session.summary()
    state = "complete" if summary.complete else "incomplete"
    print(f"\nsession {state}: {summary.rounds} rounds, "
          f"AI {summary.wins}W/{summary.draws}D/{summary.losses}L "
          f"(score {summary.total_ai_score})")
    print(f"your virtual points: {summary.player_points}  "
          f"reward: {summary.reward_rmb} RMB")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args)
    out = _out_dir(args)
    try:
        cell = BatchCell(
            name=args.label or _safe_name(args.opponent.encode(), "cell"),
            opponent=args.opponent,
            config=_ensemble_config(args, seed),
            rounds=args.rounds,
            replications=args.reps,
            base_seed=seed,
        )
    except ValueError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return USAGE_ERROR
    report = run_cell(cell, backend_name=args.backend)
    write_fig2(report, str(out / "fig2.csv"))
    write_table4(report, str(out / "table4.csv"))
    write_table5(report, str(out / "table5.csv"))
    write_fig1(report.first_cumulative, str(out / f"fig1_{cell.name}-0000.csv"))
    stdev = report.stdev_total
    print(
        f"{cell.name}: reps={args.reps} rounds={args.rounds} "
        f"mean={report.mean_total:.3f} "
        f"stdev={'n/a' if stdev is None else f'{stdev:.3f}'} "
        f"positive={report.positive_fraction:.2%}"
    )
    print(f"wrote fig1/fig2/table4/table5 CSVs to {out}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args)
    out = _out_dir(args)
    report = single_model_sweep(
        args.orders, args.opponent, args.rounds, args.reps,
        base_seed=seed, backend_name=args.backend,
    )
    path = out / "sweep.csv"
    write_sweep(report, str(path))
    means = "  ".join(
        f"ai_{m}={mean:.2f}" for m, mean in zip(report.orders, report.means)
    )
    print(f"{report.opponent_name}: reps={args.reps} {means}")
    print(f"wrote {path}")
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    import csv

    out = _out_dir(args)
    rows = []
    for path_text in args.logs:
        path = Path(path_text)
        try:
            text = path.read_text()
        except OSError as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            return DATA_ERROR
        try:
            summary = summarize(text)
            from .session import parse_log
            header, records = parse_log(text)
        except LogFormatError as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            return DATA_ERROR
        label = _safe_name(summary.label, path.stem)
        series = [r.cumulative_ai_score for r in records]
        write_fig1(series, str(out / f"fig1_{label}.csv"))
        prefs = summary.preference_counts
        rows.append([
            label, summary.rounds, int(summary.complete), summary.wins,
            summary.draws, summary.losses, summary.total_ai_score,
            summary.player_points, str(summary.reward_rmb), summary.switches,
            prefs[Move.ROCK], prefs[Move.PAPER], prefs[Move.SCISSORS],
        ])
        state = "" if summary.complete else " (incomplete)"
        print(f"{path}: rounds={summary.rounds}{state} "
              f"score={summary.total_ai_score} points={summary.player_points} "
              f"reward={summary.reward_rmb}")
    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([
            "label", "rounds", "complete", "wins", "draws", "losses",
            "total_score", "player_points", "reward_rmb", "switches",
            "rock", "paper", "scissors",
        ])
        w.writerows(rows)
    print(f"wrote summary.csv and fig1 CSVs to {out}")
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    worst = 0
    for path_text in args.logs:
        path = Path(path_text)
        try:
            text = path.read_text()
        except OSError as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            return DATA_ERROR
        try:
            report = replay(text, backend_name=args.backend)
        except LogFormatError as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            return DATA_ERROR
        state = "" if report.complete else " (incomplete log)"
        print(f"{path}: {report.verdict_text}{state}")
        for mm in report.mismatches[:20]:
            print(f"  round {mm.round}: {mm.field} logged={mm.logged} "
                  f"regenerated={mm.regenerated}")
        if len(report.mismatches) > 20:
            print(f"  ... {len(report.mismatches) - 20} more mismatches")
        if not report.verdict:
            worst = MISMATCH
    return worst


def cmd_serve(args: argparse.Namespace) -> int:
    import os

    import uvicorn

    from .service import create_app

    def pick(flag_value, env_key, default):
        if flag_value is not None:
            return flag_value
        return os.environ.get(env_key, default)

    listen = pick(args.listen, "RPS_LISTEN", "127.0.0.1:8000")
    data_dir = pick(args.data_dir, "RPS_DATA_DIR", None)
    orders_text = pick(
        None if args.default_orders is None else ",".join(map(str, args.default_orders)),
        "RPS_DEFAULT_ORDERS", "1,2,3,4,5",
    )
    focus = int(pick(args.default_focus, "RPS_DEFAULT_FOCUS", 5))
    cors = pick(args.cors_origin, "RPS_CORS_ORIGIN", "*")

    host, _, port_text = listen.rpartition(":")
    if not host or not port_text.isdigit():
        print(f"--listen must look like addr:port, got {listen!r}", file=sys.stderr)
        return USAGE_ERROR
    try:
        orders = _parse_orders(orders_text)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return USAGE_ERROR

    app = create_app(data_dir=data_dir, default_orders=orders,
                     default_focus=focus, cors_origin=cors)
    uvicorn.run(app, host=host, port=int(port_text), log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rpslab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("play", help="play a session interactively in the terminal")
    _add_common(p)
    p.add_argument("--a", type=int, default=2, help="win/draw incentive ratio (default 2)")
    p.add_argument("--label", default="terminal", help="session label for the log")
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("simulate", help="run scripted sessions and write CSV reports")
    _add_common(p)
    p.add_argument("--opponent", type=parse_strategy, required=True, metavar="SPEC",
                   help="e.g. uniform | biased:0.36,0.32,0.32 | cycle:RPS | "
                        "wsls | reactor:2 | mimic")
    p.add_argument("--reps", type=int, default=100, help="replications (default 100)")
    p.add_argument("--label", default="", help="cell name for report rows")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run each order alone against one opponent")
    _add_common(p)
    p.add_argument("--opponent", type=parse_strategy, required=True, metavar="SPEC")
    p.add_argument("--reps", type=int, default=100, help="replications (default 100)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("analyze", help="summarize session logs into CSVs")
    p.add_argument("logs", nargs="+", metavar="LOG")
    p.add_argument("--out", default=".", metavar="DIR")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("replay", help="verify logs against the engine")
    p.add_argument("logs", nargs="+", metavar="LOG")
    p.add_argument("--backend", choices=("python", "compiled"), default=None)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("serve", help="run the HTTP session service")
    p.add_argument("--listen", default=None, metavar="ADDR:PORT",
                   help="bind address (default 127.0.0.1:8000)")
    p.add_argument("--data-dir", default=None, metavar="DIR",
                   help="session log directory (default: in-memory only)")
    p.add_argument("--default-orders", type=_parse_orders, default=None,
                   metavar="LIST")
    p.add_argument("--default-focus", type=int, default=None, metavar="F")
    p.add_argument("--cors-origin", default=None, metavar="ORIGIN")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
