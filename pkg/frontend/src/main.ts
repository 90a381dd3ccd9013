/**
 * DOM wiring for the playground. All state lives in SessionStore /
 * BattleSession; this file only renders and forwards clicks.
 */

import { ApiClient, RoleScript } from "./api.js";
import { MethodDiff } from "./diff.js";
import { BattleSession, SessionStore, startInteractiveBattle } from "./session.js";

const SERVICE_URL =
  new URLSearchParams(window.location.search).get("service") ?? "http://127.0.0.1:8471";

const api = new ApiClient(SERVICE_URL);
const store = new SessionStore(api);
let battle: BattleSession | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

// --- role pane -------------------------------------------------------------

function renderRole() {
  const role = store.role;
  el("role-pane").hidden = role === null;
  if (!role) return;
  el("role-title").textContent = `${role.script.species} (step ${role.step})`;
  el<HTMLPreElement>("code-pane").textContent = role.code;
  el("toi-line").textContent =
    "interest: " +
    (Object.entries(role.toi)
      .filter(([, v]) => v)
      .map(([k]) => k)
      .join(", ") || "none yet");
  const history = el("history-list");
  history.innerHTML = "";
  for (const instruction of store.instructionHistory()) {
    const li = document.createElement("li");
    li.textContent = instruction;
    history.appendChild(li);
  }
  el<HTMLButtonElement>("evolve-btn").disabled = store.evolveBusy;
}

function renderDiff(diff: MethodDiff[]) {
  const pane = el("diff-pane");
  pane.innerHTML = "";
  for (const d of diff) {
    const block = document.createElement("div");
    block.className = `diff-method diff-${d.kind}`;
    const label = d.kind === "unchanged" ? "" : ` [${d.kind}]`;
    block.innerHTML =
      `<div class="diff-name">${esc(d.name)}${label}</div>` +
      (d.before ? `<pre class="diff-before">${esc(d.before)}</pre>` : "") +
      `<pre class="diff-after">${esc(d.after)}</pre>`;
    pane.appendChild(block);
  }
}

function renderFailure() {
  const banner = el("failure-banner");
  if (store.lastFailure === null) {
    banner.hidden = true;
    return;
  }
  banner.hidden = false;
  el("failure-phase").textContent = store.lastFailure.phase;
  el<HTMLPreElement>("failure-text").textContent = store.lastFailure.response_text;
}

// --- battle pane -------------------------------------------------------------

function renderBattle() {
  const pane = el("battle-pane");
  pane.hidden = battle === null;
  if (!battle) return;
  const { sides, outcome, awaiting, turn } = battle.view;
  for (const side of ["A", "B"] as const) {
    const info = sides[side];
    el(`hp-label-${side}`).textContent =
      `${info.species} (${info.types.join("/")}) ${info.hp}/${info.max_hp}`;
    const bar = el(`hp-bar-${side}`);
    bar.style.width = `${Math.round((100 * info.hp) / info.max_hp)}%`;
    bar.className = "hp-fill" + (info.hp * 4 < info.max_hp ? " hp-low" : "");
  }
  el("battle-turn").textContent = outcome ? `outcome: ${outcome}` : `turn ${turn}`;
  const buttons = el("move-buttons");
  buttons.innerHTML = "";
  const enabled = !outcome && awaiting.includes("A");
  for (const slot of sides.A.move_slots) {
    const btn = document.createElement("button");
    btn.textContent = `move_${slot}`;
    btn.disabled = !enabled;
    btn.addEventListener("click", () => {
      void battle!.chooseMove(slot).then(renderBattle);
    });
    buttons.appendChild(btn);
  }
  const ticker = el("event-ticker");
  ticker.innerHTML = "";
  for (const line of battle.ticker()) {
    const div = document.createElement("div");
    div.textContent = `[t${line.turn}] ${line.text}`;
    ticker.appendChild(div);
  }
  ticker.scrollTop = ticker.scrollHeight;
  el("outcome-banner").hidden = !outcome;
  if (outcome) el("outcome-banner").textContent = `Battle over: ${outcome}`;
}

// --- wiring --------------------------------------------------------------------

function scriptFromForm(): RoleScript {
  const moves = el<HTMLTextAreaElement>("craft-moves")
    .value.split("\n")
    .map((line) => line.trim())
    .filter(Boolean)
    .map((line) => {
      const [name, power] = line.split(":").map((s) => s.trim());
      return { name, description: name, base_power: power ? Number(power) : undefined };
    });
  const stat = (id: string) => Number(el<HTMLInputElement>(id).value);
  return {
    species: el<HTMLInputElement>("craft-species").value,
    types: el<HTMLInputElement>("craft-types")
      .value.split(",")
      .map((t) => t.trim())
      .filter(Boolean),
    stats: {
      hp: stat("craft-hp"),
      atk: stat("craft-atk"),
      def: stat("craft-def"),
      spa: stat("craft-spa"),
      spd: stat("craft-spd"),
      spe: stat("craft-spe"),
    },
    moves,
  };
}

function showError(err: unknown) {
  el("error-line").textContent = err instanceof Error ? err.message : String(err);
}

export function init() {
  el("craft-btn").addEventListener("click", () => {
    el("error-line").textContent = "";
    store
      .craft(scriptFromForm())
      .then(() => {
        renderRole();
        renderDiff([]);
        renderFailure();
      })
      .catch(showError);
  });

  el("evolve-btn").addEventListener("click", () => {
    const input = el<HTMLInputElement>("instruction-input");
    if (!input.value.trim() || store.evolveBusy) return;
    el("error-line").textContent = "";
    el<HTMLButtonElement>("evolve-btn").disabled = true;
    store
      .evolve(input.value)
      .then((outcome) => {
        if (outcome.ok) {
          input.value = "";
          renderDiff(outcome.diff ?? []);
        }
        renderRole();
        renderFailure();
      })
      .catch(showError)
      .finally(renderRole);
  });

  el("battle-btn").addEventListener("click", () => {
    if (!store.role) return;
    const seedText = el<HTMLInputElement>("battle-seed").value;
    const opponent = el<HTMLInputElement>("battle-opponent").value.trim();
    const target = opponent ? { roleId: opponent } : { synthSeed: Number(seedText) || 1 };
    startInteractiveBattle(api, store.role.role_id, target, Number(seedText) || 1)
      .then((session) => {
        battle = session;
        renderBattle();
      })
      .catch(showError);
  });
}

if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", init);
}
