/** Typed client for the session service HTTP+JSON API.
 *
 * All methods either resolve with the parsed body, reject with ApiError
 * for a non-2xx response, or reject with the underlying network error.
 * The fetch implementation is injectable for tests.
 */

export type MoveCode = "R" | "P" | "S";

export interface SessionConfigBody {
  orders?: number[];
  focus_length?: number;
  rounds?: number;
  seed?: number;
  a?: number;
  label?: string;
  move_time_limit_s?: number;
  warn_time_s?: number;
}

export interface ConfigEcho {
  orders: number[];
  focus_length: number;
  rounds: number;
  a: number;
  move_time_limit_s: number;
  warn_time_s: number;
  label: string;
}

export interface CreateResponse {
  id: string;
  status: string;
  created_at: number;
  config: ConfigEcho;
}

export interface MoveResponse {
  round: number;
  player_move: MoveCode;
  ai_move: MoveCode;
  dominant_order: number;
  member_moves: MoveCode[];
  member_scores: number[];
  outcome_ai: "win" | "draw" | "loss";
  player_points: number;
  cumulative_player_points: number;
  cumulative_ai_score: number;
  decision_ms: number;
  late: boolean;
  status: "active" | "finished";
}

export interface Snapshot {
  id: string;
  status: "active" | "finished";
  round: number;
  rounds: number;
  rounds_remaining: number;
  cumulative_player_points: number;
  cumulative_ai_score: number;
  last_round: MoveResponse | null;
  config: ConfigEcho;
  created_at: number;
  last_move_at: number | null;
}

export interface SummaryResponse {
  rounds: number;
  wins: number;
  draws: number;
  losses: number;
  total_ai_score: number;
  player_points: number;
  reward_rmb: string;
  preference_counts: Record<string, number>;
  switches: number;
  complete: boolean;
  label: string;
  reward_formula: { exchange_rate: number; show_up_fee: number };
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
    readonly fieldErrors: Record<string, string> = {},
  ) {
    super(`${status}: ${detail}`);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const res = await this.fetchFn(this.baseUrl + path, init);
    if (!res.ok) {
      let detail = res.statusText;
      let fields: Record<string, string> = {};
      try {
        const parsed = await res.json();
        if (typeof parsed.detail === "string") detail = parsed.detail;
        if (parsed.errors && typeof parsed.errors === "object") fields = parsed.errors;
      } catch {
        // body was not JSON; keep the status text
      }
      throw new ApiError(res.status, detail, fields);
    }
    return (await res.json()) as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("GET", "/api/v1/health");
  }

  createSession(body: SessionConfigBody): Promise<CreateResponse> {
    return this.request("POST", "/api/v1/sessions", body);
  }

  snapshot(id: string): Promise<Snapshot> {
    return this.request("GET", `/api/v1/sessions/${id}`);
  }

  postMove(
    id: string,
    body: { round: number; move: MoveCode; decision_ms: number },
  ): Promise<MoveResponse> {
    return this.request("POST", `/api/v1/sessions/${id}/moves`, body);
  }

  summary(id: string): Promise<SummaryResponse> {
    return this.request("GET", `/api/v1/sessions/${id}/summary`);
  }

  async exportLog(id: string): Promise<string> {
    const res = await this.fetchFn(`${this.baseUrl}/api/v1/sessions/${id}/export`, {
      method: "GET",
    });
    if (!res.ok) {
      let detail = res.statusText;
      try {
        detail = (await res.json()).detail ?? detail;
      } catch {
        // keep status text
      }
      throw new ApiError(res.status, detail);
    }
    return res.text();
  }
}
