/**
 * Typed client for the role service REST API. Every byte of role code the
 * UI shows comes out of these responses; the client never synthesizes or
 * rewrites code.
 */

export interface RoleScript {
  species: string;
  types: string[];
  stats: Record<string, number>;
  moves: { name: string; description?: string; base_power?: number; category?: string }[];
  abilities?: { name: string; description?: string }[];
}

export interface SkeletonEntry {
  name: string;
  params: string[];
}

export interface RoleEvent {
  time: number;
  instruction: string;
  author: string;
  names: string[] | null;
  delta_source: string;
  code_hash: string;
}

export interface RoleView {
  role_id: string;
  script: RoleScript;
  code: string;
  step: number;
  skeleton: SkeletonEntry[];
  toi: Record<string, number>;
  events: RoleEvent[];
}

export interface EvolveResult {
  role_id: string;
  delta: string;
  selected_names: string[];
  code_before: string;
  new_code: string;
  step: number;
}

/** Detail payload of a 422: the model's answer was not a usable increment. */
export interface NonExecutableDetail {
  message: string;
  phase: "select" | "parse" | "validate";
  detail: string;
  response_text: string;
}

export type PolicySpec =
  | "random"
  | { kind: "random" }
  | { kind: "scripted"; moves: number[] }
  | { kind: "interactive" };

export interface BattleSide {
  species: string;
  hp: number;
  max_hp: number;
  types: string[];
  move_slots: number[];
}

export interface BattleView {
  battle_id: string;
  turn: number;
  outcome: string | null;
  interactive: boolean;
  awaiting: ("A" | "B")[];
  sides: { A: BattleSide; B: BattleSide };
  events: number;
}

export interface LogEvent {
  turn: number;
  actor: "A" | "B" | "battle";
  kind: string;
  payload: Record<string, unknown>;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: unknown,
  ) {
    super(`service answered ${status}`);
  }
}

export class NonExecutableError extends ApiError {
  constructor(public info: NonExecutableDetail) {
    super(422, info);
  }
}

async function expectJson(resp: Response): Promise<any> {
  if (resp.ok) return resp.json();
  let detail: unknown = await resp.text();
  try {
    detail = (JSON.parse(detail as string) as { detail?: unknown }).detail ?? detail;
  } catch {
    /* plain text error */
  }
  if (resp.status === 422 && typeof detail === "object" && detail !== null && "phase" in detail) {
    throw new NonExecutableError(detail as NonExecutableDetail);
  }
  throw new ApiError(resp.status, detail);
}

export class ApiClient {
  constructor(private baseUrl: string) {}

  async health(): Promise<boolean> {
    try {
      const resp = await fetch(`${this.baseUrl}/healthz`);
      return resp.ok;
    } catch {
      return false;
    }
  }

  createRole(script: RoleScript): Promise<RoleView> {
    return this.post("/api/roles", script);
  }

  getRole(roleId: string): Promise<RoleView> {
    return this.get(`/api/roles/${roleId}`);
  }

  async listRoles(): Promise<RoleView[]> {
    const body = await this.get<{ roles: RoleView[] }>("/api/roles");
    return body.roles;
  }

  evolve(roleId: string, instruction: string): Promise<EvolveResult> {
    return this.post(`/api/roles/${roleId}/evolve`, { instruction });
  }

  startBattle(req: {
    role_a: string;
    role_b?: string;
    synth_seed?: number;
    seed?: number;
    policy_a?: PolicySpec;
    policy_b?: PolicySpec;
    max_turns?: number;
  }): Promise<BattleView> {
    return this.post("/api/battles", req);
  }

  battleStatus(battleId: string): Promise<BattleView> {
    return this.get(`/api/battles/${battleId}`);
  }

  submitAction(battleId: string, side: "A" | "B", move: number): Promise<BattleView> {
    return this.post(`/api/battles/${battleId}/actions`, { side, move });
  }

  /** Fetch the battle log as parsed JSON-lines events, from `after` on. */
  async battleLog(battleId: string, after = 0): Promise<LogEvent[]> {
    const resp = await fetch(`${this.baseUrl}/api/battles/${battleId}/log?after=${after}`);
    if (!resp.ok) throw new ApiError(resp.status, await resp.text());
    const text = await resp.text();
    return text
      .split("\n")
      .filter((line) => line.trim().length > 0)
      .map((line) => JSON.parse(line) as LogEvent);
  }

  private async get<T>(path: string): Promise<T> {
    return expectJson(await fetch(this.baseUrl + path));
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const resp = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    return expectJson(resp);
  }
}
