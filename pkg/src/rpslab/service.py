"""HTTP+JSON session server.

Design points worth knowing before reading the handlers:

* One lock per session; every state-changing handler holds it, so racing
  move posts serialize and exactly one can advance the engine.
* Move posts are idempotent on retry: a body byte-equal to the last
  accepted one (same round, move, decision_ms) returns the stored record
  again; any other post for an already-played round is a 409 conflict.
* The session seed never appears in creation responses or snapshots; it
  ships only inside the log export, which is available once the session
  has finished. A live seed would let a client predict the pool's moves.
* Persistence is one log file per session plus an index.json; after a
  restart, sessions are rebuilt from their logs by verified replay.
"""

from __future__ import annotations

import json
import secrets
import threading
import time
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from .ensemble import EnsembleConfig
from .game import MOVE_CODES, Move, Outcome, PayoffScheme, reward
from .rng import MASK64
from .session import (
    ConfigError,
    RoundRecord,
    Session,
    SessionConfig,
    SessionError,
    resume_session,
)

DEFAULT_ORDERS = (1, 2, 3, 4, 5)
DEFAULT_FOCUS = 5

_OUTCOME_TEXT = {Outcome.WIN: "win", Outcome.DRAW: "draw", Outcome.LOSS: "loss"}


class ApiError(Exception):
    def __init__(self, status: int, message, field_errors: Optional[dict] = None):
        super().__init__(message)
        self.status = status
        self.message = message
        self.field_errors = field_errors


def _record_json(record: RoundRecord, late: bool) -> dict:
    return {
        "round": record.round,
        "player_move": record.player_move.code,
        "ai_move": record.multi_move.code,
        "dominant_order": record.dominant_order,
        "member_moves": [m.code for m in record.member_moves],
        "member_scores": list(record.member_scores),
        "outcome_ai": _OUTCOME_TEXT[record.outcome_ai],
        "player_points": record.player_points,
        "cumulative_player_points": record.cumulative_player_points,
        "cumulative_ai_score": record.cumulative_ai_score,
        "decision_ms": record.decision_ms,
        "late": late,
    }


class StoredSession:
    def __init__(self, sid: str, session: Session, path: Optional[Path],
                 created_at: float) -> None:
        self.id = sid
        self.session = session
        self.path = path
        self.lock = threading.Lock()
        self.created_at = created_at
        self.last_move_at: Optional[float] = None
        self.round_opened_at = time.monotonic()
        self.last_post: Optional[dict] = None
        self.last_response: Optional[dict] = None


def _parse_config(body: dict, defaults_orders, defaults_focus) -> SessionConfig:
    """Build a SessionConfig from client overrides, collecting field errors."""
    errors: dict = {}
    known = {
        "orders", "focus_length", "rounds", "seed", "a", "label",
        "move_time_limit_s", "warn_time_s",
    }
    for key in body:
        if key not in known:
            errors[key] = "unknown field"

    def grab(key, default, check, what):
        value = body.get(key, default)
        try:
            return check(value)
        except (TypeError, ValueError) as exc:
            errors[key] = f"{what}: {exc}" if str(exc) else what
            return default

    def as_int(lo, hi=None):
        def check(v):
            if isinstance(v, bool) or not isinstance(v, int):
                raise TypeError("must be an integer")
            if v < lo or (hi is not None and v > hi):
                raise ValueError(f"must be within {lo}..{hi}" if hi is not None
                                 else f"must be at least {lo}")
            return v
        return check

    def as_number(lo, hi):
        def check(v):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise TypeError("must be a number")
            if not lo <= v <= hi:
                raise ValueError(f"must be within {lo}..{hi}")
            return float(v)
        return check

    def as_orders(v):
        if not isinstance(v, (list, tuple)) or not v:
            raise TypeError("must be a nonempty list of integers")
        out = []
        for m in v:
            if isinstance(m, bool) or not isinstance(m, int):
                raise TypeError("must be a nonempty list of integers")
            if not 1 <= m <= 16:
                raise ValueError("orders must be within 1..16")
            out.append(m)
        if any(b <= a for a, b in zip(out, out[1:])):
            raise ValueError("orders must be strictly increasing")
        return tuple(out)

    def as_label(v):
        if not isinstance(v, str):
            raise TypeError("must be a string")
        if len(v) > 200:
            raise ValueError("must be at most 200 characters")
        return v

    orders = grab("orders", tuple(defaults_orders), as_orders, "bad orders")
    focus = grab("focus_length", defaults_focus, as_int(1), "bad focus_length")
    rounds = grab("rounds", 300, as_int(1), "bad rounds")
    seed = grab("seed", None,
                lambda v: v if v is None else as_int(0, MASK64)(v), "bad seed")
    a = grab("a", 2, as_int(2), "bad a")
    label = grab("label", "", as_label, "bad label")
    limit = grab("move_time_limit_s", 40.0, as_number(30, 120), "bad move_time_limit_s")
    warn = grab("warn_time_s", 20.0, as_number(1, 119), "bad warn_time_s")

    if errors:
        raise ApiError(400, "invalid session config", errors)

    if seed is None:
        seed = secrets.randbits(64)
    try:
        config = SessionConfig(
            ensemble=EnsembleConfig(orders=orders, focus_length=focus, seed=seed),
            scheme=PayoffScheme(a=a),
            rounds=rounds,
            move_time_limit_s=limit,
            warn_time_s=warn,
            label=label,
        )
    except (ConfigError, ValueError) as exc:
        raise ApiError(400, str(exc)) from None
    return config


class SessionStore:
    """All live sessions plus the on-disk index for crash recovery."""

    def __init__(self, data_dir: Optional[str] = None,
                 default_orders=DEFAULT_ORDERS,
                 default_focus: int = DEFAULT_FOCUS) -> None:
        self.data_dir = Path(data_dir) if data_dir else None
        self.default_orders = tuple(default_orders)
        self.default_focus = default_focus
        self._sessions: dict = {}
        self._index: dict = {}
        self._lock = threading.Lock()
        if self.data_dir is not None:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            index_path = self.data_dir / "index.json"
            if index_path.exists():
                self._index = json.loads(index_path.read_text())

    def _write_index(self) -> None:
        if self.data_dir is None:
            return
        tmp = self.data_dir / "index.json.tmp"
        tmp.write_text(json.dumps(self._index, indent=0, sort_keys=True))
        tmp.replace(self.data_dir / "index.json")

    def create(self, body: dict) -> StoredSession:
        config = _parse_config(body, self.default_orders, self.default_focus)
        sid = secrets.token_urlsafe(16)
        sink = None
        path = None
        if self.data_dir is not None:
            path = self.data_dir / f"{sid}.log"
            sink = open(path, "w")
        session = Session(config, sink=sink)
        stored = StoredSession(sid, session, path, time.time())
        with self._lock:
            self._sessions[sid] = stored
            self._index[sid] = {
                "file": f"{sid}.log",
                "created_at": stored.created_at,
                "label": config.label,
            }
            self._write_index()
        return stored

    def get(self, sid: str) -> StoredSession:
        with self._lock:
            stored = self._sessions.get(sid)
            if stored is not None:
                return stored
            entry = self._index.get(sid)
            if entry is None or self.data_dir is None:
                raise ApiError(404, f"unknown session {sid!r}")
            path = self.data_dir / entry["file"]
            if not path.exists():
                raise ApiError(404, f"session {sid!r} log is gone")
            try:
                session = resume_session(path.read_text())
            except (SessionError, ValueError) as exc:
                raise ApiError(409, f"cannot resume session: {exc}") from None
            if not session.finished:
                session.attach_sink(open(path, "a"))
            stored = StoredSession(sid, session, path, entry.get("created_at", 0.0))
            self._sessions[sid] = stored
            return stored

    def close(self) -> None:
        with self._lock:
            for stored in self._sessions.values():
                sink = stored.session._sink
                if sink is not None:
                    sink.close()
                    stored.session.attach_sink(None)


def _snapshot(stored: StoredSession) -> dict:
    session = stored.session
    cfg = session.config
    last = session.records[-1] if session.records else None
    return {
        "id": stored.id,
        "status": "finished" if session.finished else "active",
        "round": min(session.current_round, cfg.rounds),
        "rounds": cfg.rounds,
        "rounds_remaining": cfg.rounds - session.rounds_completed,
        "cumulative_player_points": last.cumulative_player_points if last else 0,
        "cumulative_ai_score": last.cumulative_ai_score if last else 0,
        "last_round": None if last is None else _record_json(last, False),
        "config": _config_json(stored),
        "created_at": stored.created_at,
        "last_move_at": stored.last_move_at,
    }


def _config_json(stored: StoredSession) -> dict:
    cfg = stored.session.config
    return {
        "orders": list(cfg.ensemble.orders),
        "focus_length": cfg.ensemble.focus_length,
        "rounds": cfg.rounds,
        "a": cfg.scheme.a,
        "move_time_limit_s": cfg.move_time_limit_s,
        "warn_time_s": cfg.warn_time_s,
        "label": cfg.label,
    }


def create_app(data_dir: Optional[str] = None,
               default_orders=DEFAULT_ORDERS,
               default_focus: int = DEFAULT_FOCUS,
               cors_origin: str = "*") -> FastAPI:
    app = FastAPI(title="rpslab service", docs_url=None, redoc_url=None)
    store = SessionStore(data_dir, default_orders, default_focus)
    app.state.store = store

    if cors_origin:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=[cors_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError) -> JSONResponse:
        body = {"detail": exc.message}
        if exc.field_errors:
            body["errors"] = exc.field_errors
        return JSONResponse(status_code=exc.status, content=body)

    @app.get("/api/v1/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/api/v1/sessions", status_code=201)
    async def create_session(request: Request) -> dict:
        raw = await request.body()
        if raw:
            try:
                body = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ApiError(400, f"request body is not JSON: {exc}") from None
            if not isinstance(body, dict):
                raise ApiError(400, "request body must be a JSON object")
        else:
            body = {}
        stored = store.create(body)
        return {
            "id": stored.id,
            "status": "active",
            "created_at": stored.created_at,
            "config": _config_json(stored),
        }

    @app.get("/api/v1/sessions/{sid}")
    def get_session(sid: str) -> dict:
        stored = store.get(sid)
        with stored.lock:
            return _snapshot(stored)

    @app.post("/api/v1/sessions/{sid}/moves")
    async def post_move(sid: str, request: Request) -> dict:
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            raise ApiError(400, f"request body is not JSON: {exc}") from None
        if not isinstance(body, dict):
            raise ApiError(400, "request body must be a JSON object")
        move_code = body.get("move")
        if not isinstance(move_code, str) or move_code.upper() not in tuple(MOVE_CODES):
            raise ApiError(400, f"move must be one of {', '.join(MOVE_CODES)}")
        round_no = body.get("round")
        if isinstance(round_no, bool) or not isinstance(round_no, int) or round_no < 1:
            raise ApiError(400, "round must be a positive integer")
        decision_ms = body.get("decision_ms", 0)
        if isinstance(decision_ms, bool) or not isinstance(decision_ms, int) \
                or decision_ms < 0:
            raise ApiError(400, "decision_ms must be a nonnegative integer")

        key = {"round": round_no, "move": move_code.upper(),
               "decision_ms": decision_ms}
        stored = store.get(sid)
        with stored.lock:
            session = stored.session
            if key == stored.last_post:
                return stored.last_response  # retry: no replay of the engine
            if session.finished:
                raise ApiError(409, "session finished")
            if round_no != session.current_round:
                raise ApiError(
                    409,
                    f"round mismatch: session is at round {session.current_round}",
                )
            now = time.monotonic()
            elapsed_s = now - stored.round_opened_at
            late = elapsed_s > session.config.move_time_limit_s
            record = session.play(Move.from_code(move_code), decision_ms)
            if late:
                session.annotate(
                    f"late round={record.round} elapsed_ms={int(elapsed_s * 1000)}"
                )
            stored.round_opened_at = now
            stored.last_move_at = time.time()
            response = _record_json(record, late)
            response["status"] = "finished" if session.finished else "active"
            stored.last_post = key
            stored.last_response = response
            return response

    @app.get("/api/v1/sessions/{sid}/summary")
    def get_summary(sid: str) -> dict:
        stored = store.get(sid)
        with stored.lock:
            if not stored.session.finished:
                raise ApiError(409, "session not finished")
            scheme = stored.session.config.scheme
            data = stored.session.summary().as_dict()
            data["reward_formula"] = {
                "exchange_rate": float(scheme.exchange_rate),
                "show_up_fee": scheme.show_up_fee,
            }
            return data

    @app.get("/api/v1/sessions/{sid}/export")
    def export_log(sid: str) -> Response:
        stored = store.get(sid)
        with stored.lock:
            if not stored.session.finished:
                raise ApiError(409, "session not finished; export would leak the seed")
            return PlainTextResponse(stored.session.log_text())

    return app
