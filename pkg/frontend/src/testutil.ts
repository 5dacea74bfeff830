/** Manual clock and an in-memory service stand-in for unit tests. */

import {
  ApiError,
  CreateResponse,
  MoveCode,
  MoveResponse,
  SessionConfigBody,
  Snapshot,
  SummaryResponse,
} from "./api.js";
import { SessionApi } from "./state.js";

export class ManualClock {
  now = 0;

  fn = (): number => this.now;

  tick(ms: number): void {
    this.now += ms;
  }
}

const MOVE_NUM: Record<MoveCode, number> = { R: 0, P: 1, S: 2 };

/** Minimal engine stub: the AI always shows Paper, scoring is honest. */
export class FakeApi implements SessionApi {
  postCalls: Array<{ round: number; move: MoveCode; decision_ms: number }> = [];
  snapshotCalls = 0;
  failNext: "conflict" | "network" | null = null;
  lateNext = false;
  deferred = false;

  private rounds: number;
  private round = 1;
  private cumPoints = 0;
  private cumScore = 0;
  private wins = 0;
  private draws = 0;
  private losses = 0;
  private last: MoveResponse | null = null;
  private waiting: Array<() => void> = [];

  constructor(rounds = 3) {
    this.rounds = rounds;
  }

  /** Lets a deferred postMove/snapshot continue. */
  release(): void {
    const waiting = this.waiting;
    this.waiting = [];
    for (const resume of waiting) resume();
  }

  private gate(): Promise<void> {
    if (!this.deferred) return Promise.resolve();
    return new Promise((resolve) => this.waiting.push(resolve));
  }

  async createSession(body: SessionConfigBody): Promise<CreateResponse> {
    this.rounds = body.rounds ?? this.rounds;
    return {
      id: "fake-1",
      status: "active",
      created_at: 0,
      config: {
        orders: [1, 2, 3, 4, 5],
        focus_length: 5,
        rounds: this.rounds,
        a: 2,
        move_time_limit_s: body.move_time_limit_s ?? 40,
        warn_time_s: body.warn_time_s ?? 20,
        label: body.label ?? "",
      },
    };
  }

  async postMove(
    _id: string,
    body: { round: number; move: MoveCode; decision_ms: number },
  ): Promise<MoveResponse> {
    this.postCalls.push({ ...body });
    await this.gate();
    if (this.failNext === "conflict") {
      this.failNext = null;
      throw new ApiError(409, `round mismatch: session is at round ${this.round}`);
    }
    if (this.failNext === "network") {
      this.failNext = null;
      throw new TypeError("fetch failed");
    }
    if (body.round !== this.round) {
      throw new ApiError(409, `round mismatch: session is at round ${this.round}`);
    }
    const d = (1 - MOVE_NUM[body.move] + 3) % 3;
    const outcome = d === 1 ? "win" : d === 0 ? "draw" : "loss";
    const points = d === 1 ? 0 : d === 0 ? 1 : 2;
    this.cumPoints += points;
    this.cumScore += d === 1 ? 1 : d === 0 ? 0 : -1;
    if (outcome === "win") this.wins += 1;
    else if (outcome === "draw") this.draws += 1;
    else this.losses += 1;
    const late = this.lateNext;
    this.lateNext = false;
    const finished = this.round === this.rounds;
    this.last = {
      round: this.round,
      player_move: body.move,
      ai_move: "P",
      dominant_order: 1,
      member_moves: ["P", "P", "P", "P", "P"],
      member_scores: [d === 1 ? 1 : d === 0 ? 0 : -1, 0, 0, 0, 0],
      outcome_ai: outcome,
      player_points: points,
      cumulative_player_points: this.cumPoints,
      cumulative_ai_score: this.cumScore,
      decision_ms: body.decision_ms,
      late,
      status: finished ? "finished" : "active",
    };
    if (!finished) this.round += 1;
    return this.last;
  }

  async snapshot(_id: string): Promise<Snapshot> {
    this.snapshotCalls += 1;
    await this.gate();
    const finished = this.last?.status === "finished";
    return {
      id: "fake-1",
      status: finished ? "finished" : "active",
      round: this.round,
      rounds: this.rounds,
      rounds_remaining: this.rounds - (this.last?.round ?? 0),
      cumulative_player_points: this.cumPoints,
      cumulative_ai_score: this.cumScore,
      last_round: this.last,
      config: {
        orders: [1, 2, 3, 4, 5],
        focus_length: 5,
        rounds: this.rounds,
        a: 2,
        move_time_limit_s: 40,
        warn_time_s: 20,
        label: "",
      },
      created_at: 0,
      last_move_at: null,
    };
  }

  async summary(_id: string): Promise<SummaryResponse> {
    if (this.last?.status !== "finished") {
      throw new ApiError(409, "session not finished");
    }
    return {
      rounds: this.rounds,
      wins: this.wins,
      draws: this.draws,
      losses: this.losses,
      total_ai_score: this.wins - this.losses,
      player_points: this.cumPoints,
      reward_rmb: (this.cumPoints * 0.15 + 5).toFixed(2),
      preference_counts: { R: 0, P: 0, S: 0 },
      switches: 0,
      complete: true,
      label: "",
      reward_formula: { exchange_rate: 0.15, show_up_fee: 5 },
    };
  }
}
