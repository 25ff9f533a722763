// Typed client for the simulator's /api/v1 JSON contract.
//
// Interface names and fields mirror the wire format exactly. The page
// never recomputes anything the service already reports, so these types
// are the full vocabulary of what it may display.

export type ModelKind = "linear" | "logistic" | "svm";

export type MechanismKind = "none" | "laplace" | "duchi" | "piecewise" | "hybrid";

export interface SessionConfig {
  model: ModelKind;
  mechanism: MechanismKind;
  epsilon: number | null;
  seed: number;
  learning_rate: number;
}

export interface UserRecord {
  features: number[];
  label: number;
}

export interface SubmissionEntry {
  user_id: number;
  weights_at_submission: number[];
  reported_gradient: number[];
}

export interface SessionSnapshot {
  config: SessionConfig;
  weights: number[];
  users: UserRecord[];
  rng: string;
  epoch_count: number;
  last_epoch_log: SubmissionEntry[];
}

// accuracy_after_update is null for regression models.
export interface TrainEvent {
  user_id: number;
  cost_after_update: number;
  accuracy_after_update: number | null;
}

export interface TrainResponse {
  events: TrainEvent[];
  final_cost: number;
  final_accuracy: number | null;
  epoch_count: number;
}

export interface RecoveredRecord {
  features: number[] | null;
  label: number | null;
  recovered: boolean;
}

export interface RecoveryResult {
  user_id: number;
  recovered: RecoveredRecord;
  exp_hamming: number;
}

export interface RecoveryReport {
  per_user: RecoveryResult[];
  average_exp_hamming: number;
}

export interface CreateSessionRequest {
  model: ModelKind;
  mechanism: MechanismKind;
  epsilon: number | null;
  seed: number;
  learning_rate?: number;
}

export interface CreateSessionResponse {
  session_id: string;
  session: SessionSnapshot;
}

/**
 * Non-2xx responses, carrying the service's error code: unknown_session,
 * no_users, not_trained, invalid_config, or validation_error when the
 * request body itself failed field validation.
 */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function toApiError(resp: Response): Promise<ApiError> {
  let code = "http_error";
  let message = `HTTP ${resp.status}`;
  try {
    const detail = (await resp.json())?.detail;
    if (Array.isArray(detail)) {
      // pydantic field errors arrive as a list of {loc, msg, ...} entries
      code = "validation_error";
      message = detail.map((d) => String(d?.msg ?? "invalid field")).join("; ");
    } else if (detail && typeof detail === "object") {
      code = String(detail.error ?? code);
      message = String(detail.message ?? JSON.stringify(detail));
    }
  } catch {
    // non-JSON body, keep the generic message
  }
  return new ApiError(resp.status, code, message);
}

export class ApiClient {
  constructor(
    private readonly base: string = "/api/v1",
    private readonly fetchFn: FetchLike = (input, init) => globalThis.fetch(input, init),
  ) {}

  createSession(config: CreateSessionRequest): Promise<CreateSessionResponse> {
    return this.request("POST", "/sessions", config);
  }

  getSession(sessionId: string): Promise<SessionSnapshot> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  addUsers(sessionId: string, count: number): Promise<SessionSnapshot> {
    return this.request("POST", `/sessions/${sessionId}/users`, { count });
  }

  /** Runs exactly one epoch; the service owns all gradient work. */
  train(sessionId: string): Promise<TrainResponse> {
    return this.request("POST", `/sessions/${sessionId}/train`);
  }

  recover(sessionId: string, k?: number): Promise<RecoveryReport> {
    return this.request("POST", `/sessions/${sessionId}/recover`, k === undefined ? undefined : { k });
  }

  deleteSession(sessionId: string): Promise<void> {
    return this.request("DELETE", `/sessions/${sessionId}`);
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchFn(this.base + path, init);
    if (!resp.ok) {
      throw await toApiError(resp);
    }
    if (resp.status === 204) {
      return undefined as T;
    }
    return (await resp.json()) as T;
  }
}
