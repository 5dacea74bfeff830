/** Per-tab session state machine.
 *
 * One active session, one in-flight request at a time. submit() flips
 * the pending flag synchronously before any await, so a storm of calls
 * (rapid clicks) sends exactly one request per round no matter how the
 * event loop interleaves them.
 *
 * The clock is injected (milliseconds, monotonic-ish). decision_ms is
 * measured from round open to submit, minus any time spent stalled on
 * a dead connection: the server's own elapsed time is the authority on
 * lateness, the client measurement is informational.
 */

import {
  ApiError,
  CreateResponse,
  MoveCode,
  MoveResponse,
  SessionConfigBody,
  Snapshot,
  SummaryResponse,
} from "./api.js";
import { LIMIT_S, WARN_S, TimerPhase, remainingS, timerPhase } from "./timer.js";

/** The slice of the HTTP client the controller needs; fakeable in tests. */
export interface SessionApi {
  createSession(body: SessionConfigBody): Promise<CreateResponse>;
  snapshot(id: string): Promise<Snapshot>;
  postMove(
    id: string,
    body: { round: number; move: MoveCode; decision_ms: number },
  ): Promise<MoveResponse>;
  summary(id: string): Promise<SummaryResponse>;
}

export interface UiError {
  message: string;
  guidance: string;
  status?: number;
}

export interface ViewState {
  sessionId: string | null;
  started: boolean;
  round: number;
  rounds: number;
  limitS: number;
  remainingS: number;
  phase: TimerPhase;
  pending: boolean;
  finished: boolean;
  stalled: boolean;
  lastResult: MoveResponse | null;
  cumulativePoints: number;
  cumulativeScore: number;
  error: UiError | null;
  summary: SummaryResponse | null;
}

export type SubmitResult =
  | { accepted: true; result: MoveResponse }
  | { accepted: false; reason: string };

export class SessionController {
  sessionId: string | null = null;
  round = 0;
  rounds = 0;
  limitS = LIMIT_S;
  warnS = WARN_S;
  pending = false;
  finished = false;
  started = false;
  lastResult: MoveResponse | null = null;
  summary: SummaryResponse | null = null;
  cumulativePoints = 0;
  cumulativeScore = 0;
  error: UiError | null = null;

  private roundOpenedAt = 0;
  private pausedMs = 0;
  private stalledAt: number | null = null;

  constructor(
    private readonly api: SessionApi,
    private readonly clock: () => number = () => Date.now(),
  ) {}

  async start(body: SessionConfigBody = {}): Promise<void> {
    const created = await this.api.createSession(body);
    this.sessionId = created.id;
    this.rounds = created.config.rounds;
    this.limitS = created.config.move_time_limit_s;
    this.warnS = created.config.warn_time_s;
    this.round = 1;
    this.started = true;
    this.finished = false;
    this.lastResult = null;
    this.summary = null;
    this.cumulativePoints = 0;
    this.cumulativeScore = 0;
    this.error = null;
    this.openRound();
  }

  /** Milliseconds into the current round, excluding stalled time. */
  elapsedMs(): number {
    if (!this.started) return 0;
    const end = this.stalledAt ?? this.clock();
    return Math.max(0, end - this.roundOpenedAt - this.pausedMs);
  }

  get stalled(): boolean {
    return this.stalledAt !== null;
  }

  view(): ViewState {
    const elapsedS = this.elapsedMs() / 1000;
    return {
      sessionId: this.sessionId,
      started: this.started,
      round: this.round,
      rounds: this.rounds,
      limitS: this.limitS,
      remainingS: remainingS(elapsedS, this.limitS),
      phase: timerPhase(elapsedS, this.pending || this.finished, this.warnS, this.limitS),
      pending: this.pending,
      finished: this.finished,
      stalled: this.stalled,
      lastResult: this.lastResult,
      cumulativePoints: this.cumulativePoints,
      cumulativeScore: this.cumulativeScore,
      error: this.error,
      summary: this.summary,
    };
  }

  async submit(move: MoveCode): Promise<SubmitResult> {
    if (!this.started || this.sessionId === null) {
      return { accepted: false, reason: "no active session" };
    }
    if (this.finished) {
      return { accepted: false, reason: "session finished" };
    }
    if (this.pending) {
      return { accepted: false, reason: "a submission is already pending" };
    }
    this.pending = true; // before the first await: the storm guard
    const round = this.round;
    const decisionMs = Math.round(this.elapsedMs());
    try {
      const result = await this.api.postMove(this.sessionId, {
        round,
        move,
        decision_ms: decisionMs,
      });
      this.clearStall();
      this.error = null;
      this.lastResult = result;
      this.cumulativePoints = result.cumulative_player_points;
      this.cumulativeScore = result.cumulative_ai_score;
      if (result.status === "finished") {
        this.finished = true;
        try {
          this.summary = await this.api.summary(this.sessionId);
        } catch {
          this.summary = null; // summary panel will show totals from the last round
        }
      } else {
        this.round = result.round + 1;
        this.openRound();
      }
      return { accepted: true, result };
    } catch (err) {
      if (err instanceof ApiError) {
        this.clearStall();
        this.error = {
          status: err.status,
          message: err.detail,
          guidance:
            err.status === 409
              ? "the server is ahead of this tab; syncing the round, then choose again"
              : err.status === 404
                ? "the session is gone on the server; start a new one"
                : "check the request and try again",
        };
        if (err.status === 409) {
          await this.poll().catch(() => undefined);
        }
      } else {
        this.markStalled();
        this.error = {
          message: "connection lost",
          guidance: "the timer is paused; your choice was not sent, retry when the line is back",
        };
      }
      return { accepted: false, reason: this.error.message };
    } finally {
      this.pending = false;
    }
  }

  /** Re-sync from the server; also the reconnect probe. */
  async poll(): Promise<void> {
    if (this.sessionId === null) return;
    try {
      const snap = await this.api.snapshot(this.sessionId);
      this.clearStall();
      this.rounds = snap.rounds;
      this.cumulativePoints = snap.cumulative_player_points;
      this.cumulativeScore = snap.cumulative_ai_score;
      if (snap.last_round !== null) this.lastResult = snap.last_round;
      if (snap.status === "finished") {
        this.finished = true;
        if (this.summary === null) {
          this.summary = await this.api.summary(this.sessionId).catch(() => null);
        }
      } else if (snap.round !== this.round) {
        this.round = snap.round;
        this.openRound();
      }
    } catch (err) {
      if (!(err instanceof ApiError)) {
        this.markStalled();
      }
      throw err;
    }
  }

  private openRound(): void {
    this.roundOpenedAt = this.clock();
    this.pausedMs = 0;
    this.stalledAt = null;
  }

  private markStalled(): void {
    if (this.stalledAt === null) this.stalledAt = this.clock();
  }

  private clearStall(): void {
    if (this.stalledAt !== null) {
      this.pausedMs += this.clock() - this.stalledAt;
      this.stalledAt = null;
    }
  }
}
