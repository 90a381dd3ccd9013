/**
 * Session state for the playground, kept apart from the DOM so the flows
 * are testable headless.
 *
 * Invariants the store maintains:
 *   - `code` is always byte-for-byte a service response (craft, evolve
 *     and every refresh re-read it from GET /api/roles/{id});
 *   - instruction submission is refused while an evolve is in flight,
 *     mirroring the server's serialization;
 *   - battle state is derived from service status plus the event log,
 *     never predicted locally.
 */

import {
  ApiClient,
  BattleView,
  LogEvent,
  NonExecutableDetail,
  NonExecutableError,
  RoleScript,
  RoleView,
} from "./api.js";
import { MethodDiff, changedNames, diffMethods } from "./diff.js";

export interface EvolveOutcome {
  ok: boolean;
  diff?: MethodDiff[];
  changed?: string[];
  failure?: NonExecutableDetail;
}

export class SessionStore {
  role: RoleView | null = null;
  evolveBusy = false;
  lastDiff: MethodDiff[] = [];
  lastFailure: NonExecutableDetail | null = null;

  constructor(public api: ApiClient) {}

  get code(): string {
    return this.role?.code ?? "";
  }

  async craft(script: RoleScript): Promise<RoleView> {
    const created = await this.api.createRole(script);
    // re-fetch so the displayed bytes are the canonical GET answer
    this.role = await this.api.getRole(created.role_id);
    this.lastDiff = [];
    this.lastFailure = null;
    return this.role;
  }

  async select(roleId: string): Promise<RoleView> {
    this.role = await this.api.getRole(roleId);
    this.lastDiff = [];
    this.lastFailure = null;
    return this.role;
  }

  async evolve(instruction: string): Promise<EvolveOutcome> {
    if (this.role === null) throw new Error("no role selected");
    if (this.evolveBusy) throw new Error("an evolve is already in flight");
    this.evolveBusy = true;
    try {
      const result = await this.api.evolve(this.role.role_id, instruction);
      this.role = await this.api.getRole(this.role.role_id);
      this.lastDiff = diffMethods(result.code_before, this.role.code);
      this.lastFailure = null;
      return { ok: true, diff: this.lastDiff, changed: changedNames(this.lastDiff) };
    } catch (err) {
      if (err instanceof NonExecutableError) {
        // role unchanged on the server; keep showing its authoritative code
        this.role = await this.api.getRole(this.role.role_id);
        this.lastFailure = err.info;
        return { ok: false, failure: err.info };
      }
      throw err;
    } finally {
      this.evolveBusy = false;
    }
  }

  instructionHistory(): string[] {
    return this.role?.events.map((e) => e.instruction) ?? [];
  }
}

export interface TickerLine {
  turn: number;
  text: string;
}

export function describeEvent(e: LogEvent): string {
  const p = e.payload as Record<string, any>;
  switch (e.kind) {
    case "move_used":
      return `${e.actor} used ${p.move}`;
    case "damage":
      if (p.protected) return `${p.target} was protected: 0 damage`;
      if (p.recoil) return `${e.actor} took ${p.amount} recoil damage`;
      return `${p.target} took ${p.amount} damage (${p.target_hp} hp left)`;
    case "boost":
      return `${p.target} ${p.stat} stage ${p.amount >= 0 ? "+" : ""}${p.amount} (now ${p.stage})`;
    case "type_change":
      return `${p.target} became ${(p.types as string[]).join("/")}`;
    case "flag_set":
      return `${p.target} gained ${p.name} (${p.turns} turn${p.turns === 1 ? "" : "s"})`;
    case "status":
      return `${p.target} was afflicted with ${p.name}`;
    case "heal":
      return `${p.target} healed ${p.amount} (now ${p.hp} hp)`;
    case "faint":
      return `${p.target} fainted`;
    case "runtime_error":
      return `${e.actor}'s code failed: ${p.kind} in ${p.method}`;
    case "rng_draw":
      return `the dice rolled (${p.purpose})`;
    case "outcome":
      return `battle over: ${p.outcome}`;
    default:
      return `${e.kind}`;
  }
}

export class BattleSession {
  view: BattleView;
  events: LogEvent[] = [];

  constructor(
    private api: ApiClient,
    view: BattleView,
  ) {
    this.view = view;
  }

  get finished(): boolean {
    return this.view.outcome !== null;
  }

  get mySide(): "A" {
    return "A";
  }

  async refresh(): Promise<void> {
    this.view = await this.api.battleStatus(this.view.battle_id);
    const fresh = await this.api.battleLog(this.view.battle_id, this.events.length);
    // the trailing synthetic outcome line is not part of the event count
    for (const e of fresh) {
      if (e.kind === "outcome") continue;
      this.events.push(e);
    }
  }

  async chooseMove(move: number): Promise<void> {
    this.view = await this.api.submitAction(this.view.battle_id, this.mySide, move);
    await this.refresh();
  }

  ticker(): TickerLine[] {
    return this.events.map((e) => ({ turn: e.turn, text: describeEvent(e) }));
  }
}

export async function startInteractiveBattle(
  api: ApiClient,
  roleId: string,
  opponent: { roleId?: string; synthSeed?: number },
  seed: number,
): Promise<BattleSession> {
  const view = await api.startBattle({
    role_a: roleId,
    role_b: opponent.roleId,
    synth_seed: opponent.synthSeed,
    seed,
    policy_a: { kind: "interactive" },
    policy_b: "random",
  });
  const session = new BattleSession(api, view);
  await session.refresh();
  return session;
}
