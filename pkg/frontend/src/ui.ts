// Page controller: config form, user grid, result banners, and the
// control buttons, wired to the service through the phase machine.
//
// Every number on screen is a field from an API payload passed through
// String() untouched. The page holds no model, mechanism, or recovery
// math of its own. At most one mutation is in flight at a time and all
// controls are disabled while it runs.

import { ApiClient, ApiError } from "./api.js";
import type {
  MechanismKind,
  ModelKind,
  CreateSessionRequest,
  RecoveryReport,
  RecoveryResult,
  SessionSnapshot,
  TrainEvent,
  TrainResponse,
  UserRecord,
} from "./api.js";
import { PhaseMachine, recoverEnabled, trainEnabled } from "./phase.js";
import { replay } from "./replay.js";
import type { AnimationSpeed } from "./replay.js";

export const EPSILON_PRESETS = [0.5, 1, 2, 4, 8] as const;

// ---------------------------------------------------------------------------
// Fragment builders. Pure string -> string, exported for tests.

export function trainNote(ev: TrainEvent): string {
  const cost = `cost ${String(ev.cost_after_update)}`;
  const acc = ev.accuracy_after_update;
  return acc === null ? cost : `${cost}, accuracy ${String(acc)}`;
}

export function recoveryNote(res: RecoveryResult): string {
  if (!res.recovered.recovered) {
    return `no recovery, exp-hamming ${String(res.exp_hamming)}`;
  }
  const feats = (res.recovered.features ?? []).map(String).join(", ");
  return `recovered [${feats}] label ${String(res.recovered.label)}, exp-hamming ${String(res.exp_hamming)}`;
}

export function userCardHtml(userId: number, user: UserRecord, note: string): string {
  const feats = user.features.map(String).join(", ");
  return (
    `<article class="card" data-user="${userId}">` +
    `<h3>user ${userId}</h3>` +
    `<p class="feats">[${feats}]</p>` +
    `<p class="lab">label ${String(user.label)}</p>` +
    `<p class="note">${note}</p>` +
    `</article>`
  );
}

export function userGridHtml(
  users: readonly UserRecord[],
  notes: ReadonlyMap<number, string>,
): string {
  return users.map((u, i) => userCardHtml(i, u, notes.get(i) ?? "")).join("");
}

export function trainBannerHtml(resp: TrainResponse): string {
  const acc = resp.final_accuracy === null ? "" : `, accuracy ${String(resp.final_accuracy)}`;
  return `<p class="banner">epoch ${String(resp.epoch_count)} complete: cost ${String(resp.final_cost)}${acc}</p>`;
}

export function recoveryBannerHtml(report: RecoveryReport): string {
  return `<p class="banner">average exp-hamming ${String(report.average_exp_hamming)}</p>`;
}

export function describeError(err: unknown): string {
  if (err instanceof ApiError) {
    return `${err.code}: ${err.message}`;
  }
  return err instanceof Error ? err.message : String(err);
}

// ---------------------------------------------------------------------------

const LAYOUT = `
<header>
  <h1>gradient recovery demo</h1>
  <span id="phase" class="phase"></span>
</header>
<form id="config" class="config">
  <fieldset id="config-fields">
    <label>model
      <select id="model">
        <option value="linear">linear</option>
        <option value="logistic">logistic</option>
        <option value="svm">svm</option>
      </select>
    </label>
    <label>mechanism
      <select id="mechanism">
        <option value="none">none</option>
        <option value="laplace">laplace</option>
        <option value="duchi">duchi</option>
        <option value="piecewise">piecewise</option>
        <option value="hybrid">hybrid</option>
      </select>
    </label>
    <label>epsilon
      <input id="epsilon" type="number" step="any" min="0" placeholder="none">
    </label>
    <span id="presets" class="presets"></span>
    <label>seed
      <input id="seed" type="number" value="42">
    </label>
    <label>learning rate
      <input id="lr" type="number" step="any" value="0.01">
    </label>
    <span class="speeds">
      <label><input type="radio" name="speed" value="OnePerSecond"> one user / second</label>
      <label><input type="radio" name="speed" value="Instant"> instant</label>
    </span>
    <button id="apply" type="button">apply configuration</button>
  </fieldset>
</form>
<div class="controls">
  <button id="add10" type="button">Add 10 Users</button>
  <button id="add100" type="button">Add 100 Users</button>
  <button id="train" type="button">Train</button>
  <button id="recover" type="button">Recover</button>
</div>
<p id="status" class="status"></p>
<p id="meta" class="meta"></p>
<div id="banners">
  <span id="train-banner"></span>
  <span id="recover-banner"></span>
</div>
<div id="grid" class="grid"></div>
<button id="totop" type="button" class="totop" title="scroll to top">top</button>
`;

export interface AppOptions {
  client?: ApiClient;
  speedDefault?: AnimationSpeed;
}

export class App {
  readonly machine = new PhaseMachine();

  private readonly client: ApiClient;
  private readonly speedDefault: AnimationSpeed;
  private sessionId: string | null = null;
  private snapshot: SessionSnapshot | null = null;
  private epochCount = 0;
  // latest per-user metric text, keyed by user_id
  private readonly notes = new Map<number, string>();
  private busy = false;
  // config form changed since the session was created
  private dirty = false;

  private fields!: HTMLFieldSetElement;
  private modelSel!: HTMLSelectElement;
  private mechSel!: HTMLSelectElement;
  private epsInput!: HTMLInputElement;
  private seedInput!: HTMLInputElement;
  private lrInput!: HTMLInputElement;
  private applyBtn!: HTMLButtonElement;
  private add10Btn!: HTMLButtonElement;
  private add100Btn!: HTMLButtonElement;
  private trainBtn!: HTMLButtonElement;
  private recoverBtn!: HTMLButtonElement;
  private phaseBadge!: HTMLElement;
  private statusLine!: HTMLElement;
  private metaLine!: HTMLElement;
  private trainBanner!: HTMLElement;
  private recoverBanner!: HTMLElement;
  private grid!: HTMLElement;

  constructor(
    private readonly root: HTMLElement,
    opts: AppOptions = {},
  ) {
    this.client = opts.client ?? new ApiClient();
    this.speedDefault = opts.speedDefault ?? "OnePerSecond";
  }

  mount(): void {
    this.root.innerHTML = LAYOUT;
    this.fields = this.q<HTMLFieldSetElement>("#config-fields");
    this.modelSel = this.q<HTMLSelectElement>("#model");
    this.mechSel = this.q<HTMLSelectElement>("#mechanism");
    this.epsInput = this.q<HTMLInputElement>("#epsilon");
    this.seedInput = this.q<HTMLInputElement>("#seed");
    this.lrInput = this.q<HTMLInputElement>("#lr");
    this.applyBtn = this.q<HTMLButtonElement>("#apply");
    this.add10Btn = this.q<HTMLButtonElement>("#add10");
    this.add100Btn = this.q<HTMLButtonElement>("#add100");
    this.trainBtn = this.q<HTMLButtonElement>("#train");
    this.recoverBtn = this.q<HTMLButtonElement>("#recover");
    this.phaseBadge = this.q<HTMLElement>("#phase");
    this.statusLine = this.q<HTMLElement>("#status");
    this.metaLine = this.q<HTMLElement>("#meta");
    this.trainBanner = this.q<HTMLElement>("#train-banner");
    this.recoverBanner = this.q<HTMLElement>("#recover-banner");
    this.grid = this.q<HTMLElement>("#grid");

    const doc = this.root.ownerDocument;
    const presets = this.q<HTMLElement>("#presets");
    for (const eps of EPSILON_PRESETS) {
      const b = doc.createElement("button");
      b.type = "button";
      b.className = "preset";
      b.textContent = `ε=${eps}`;
      b.addEventListener("click", () => {
        this.epsInput.value = String(eps);
        this.configEdited();
      });
      presets.appendChild(b);
    }

    const radio = this.root.querySelector<HTMLInputElement>(
      `input[name="speed"][value="${this.speedDefault}"]`,
    );
    if (radio) {
      radio.checked = true;
    }

    const form = this.q<HTMLFormElement>("#config");
    // selects fire change, text inputs fire input; listen to both
    form.addEventListener("input", () => this.configEdited());
    form.addEventListener("change", () => this.configEdited());
    this.applyBtn.addEventListener("click", () => void this.apply());
    this.add10Btn.addEventListener("click", () => void this.addUsers(10));
    this.add100Btn.addEventListener("click", () => void this.addUsers(100));
    this.trainBtn.addEventListener("click", () => void this.train());
    this.recoverBtn.addEventListener("click", () => void this.recover());
    this.q<HTMLButtonElement>("#totop").addEventListener("click", () => {
      this.root.ownerDocument.defaultView?.scrollTo(0, 0);
    });

    this.setStatus("configure and apply to begin");
    this.refresh();
  }

  get phase() {
    return this.machine.current;
  }

  get session(): string | null {
    return this.sessionId;
  }

  /** Create a fresh session from the form; replaces whatever was loaded. */
  async apply(): Promise<void> {
    if (this.busy) {
      return;
    }
    const body = this.readConfigForm();
    this.busy = true;
    this.refresh();
    try {
      const created = await this.client.createSession(body);
      this.sessionId = created.session_id;
      this.snapshot = created.session;
      this.epochCount = created.session.epoch_count;
      this.notes.clear();
      this.dirty = false;
      this.machine.reset();
      this.clearBanners();
      this.setStatus(`session ${created.session_id} ready`);
    } catch (err) {
      this.setStatus(describeError(err));
    } finally {
      this.busy = false;
      this.refresh();
    }
  }

  async addUsers(count: number): Promise<void> {
    if (this.busy || this.sessionId === null || this.dirty || !this.machine.can("addUsers")) {
      return;
    }
    this.busy = true;
    this.refresh();
    try {
      this.snapshot = await this.client.addUsers(this.sessionId, count);
      this.machine.send("addUsers");
      // grid changed, so old metrics and banners no longer describe it
      this.notes.clear();
      this.clearBanners();
      this.setStatus(`${this.snapshot.users.length} users on the grid`);
    } catch (err) {
      this.setStatus(describeError(err));
      if (err instanceof ApiError && err.code === "unknown_session") {
        this.dropSession();
      }
    } finally {
      this.busy = false;
      this.refresh();
    }
  }

  /** Run one epoch, then replay its events at the selected speed. */
  async train(): Promise<void> {
    if (this.busy || this.sessionId === null || this.dirty) {
      return;
    }
    if (!trainEnabled(this.machine.current, this.userCount())) {
      this.setStatus("train needs an idle or trained session with users");
      return;
    }
    this.machine.send("train");
    this.busy = true;
    this.clearBanners();
    this.refresh();
    try {
      const resp = await this.client.train(this.sessionId);
      await replay(resp.events, this.speed(), (ev) => {
        this.notes.set(ev.user_id, trainNote(ev));
        this.patchNote(ev.user_id);
      });
      this.epochCount = resp.epoch_count;
      this.trainBanner.innerHTML = trainBannerHtml(resp);
      this.machine.send("trainDone");
      this.setStatus(`epoch ${resp.epoch_count} trained`);
    } catch (err) {
      this.machine.send("fail");
      this.setStatus(describeError(err));
      if (err instanceof ApiError && err.code === "unknown_session") {
        this.dropSession();
      }
    } finally {
      this.busy = false;
      this.refresh();
    }
  }

  /** Attack the submitted gradients, then replay per-user results. */
  async recover(): Promise<void> {
    if (this.busy || this.sessionId === null || this.dirty) {
      return;
    }
    if (!recoverEnabled(this.machine.current)) {
      this.setStatus("recover needs a trained session");
      return;
    }
    this.machine.send("recover");
    this.busy = true;
    this.refresh();
    try {
      const report = await this.client.recover(this.sessionId);
      await replay(report.per_user, this.speed(), (res) => {
        this.notes.set(res.user_id, recoveryNote(res));
        this.patchNote(res.user_id);
      });
      this.recoverBanner.innerHTML = recoveryBannerHtml(report);
      this.machine.send("recoverDone");
      this.setStatus("recovery complete");
    } catch (err) {
      this.machine.send("fail");
      this.setStatus(describeError(err));
      if (err instanceof ApiError && err.code === "unknown_session") {
        this.dropSession();
      }
    } finally {
      this.busy = false;
      this.refresh();
    }
  }

  // -------------------------------------------------------------------------

  private q<T extends Element>(sel: string): T {
    const el = this.root.querySelector<T>(sel);
    if (!el) {
      throw new Error(`missing element ${sel}`);
    }
    return el;
  }

  private readConfigForm(): CreateSessionRequest {
    const mechanism = this.mechSel.value as MechanismKind;
    const epsRaw = this.epsInput.value.trim();
    return {
      model: this.modelSel.value as ModelKind,
      mechanism,
      // the service is the authority on whether epsilon is required
      epsilon: mechanism === "none" || epsRaw === "" ? null : Number(epsRaw),
      seed: Number(this.seedInput.value),
      learning_rate: Number(this.lrInput.value),
    };
  }

  private configEdited(): void {
    if (this.busy) {
      return;
    }
    this.dirty = true;
    if (this.machine.can("configEdit")) {
      this.machine.send("configEdit");
    }
    this.setStatus("configuration changed, apply to start a new session");
    this.refresh();
  }

  private speed(): AnimationSpeed {
    const checked = this.root.querySelector<HTMLInputElement>('input[name="speed"]:checked');
    return checked?.value === "Instant" ? "Instant" : "OnePerSecond";
  }

  private userCount(): number {
    return this.snapshot?.users.length ?? 0;
  }

  private patchNote(userId: number): void {
    const el = this.grid.querySelector(`[data-user="${userId}"] .note`);
    if (el) {
      el.textContent = this.notes.get(userId) ?? "";
    }
  }

  private setStatus(text: string): void {
    this.statusLine.textContent = text;
  }

  private clearBanners(): void {
    this.trainBanner.innerHTML = "";
    this.recoverBanner.innerHTML = "";
  }

  private dropSession(): void {
    this.sessionId = null;
    this.snapshot = null;
    this.epochCount = 0;
    this.notes.clear();
    this.machine.reset();
    this.clearBanners();
  }

  private refresh(): void {
    const phase = this.machine.current;
    this.phaseBadge.textContent = phase;
    this.fields.disabled = this.busy;

    const ready = !this.busy && this.sessionId !== null && !this.dirty;
    this.applyBtn.disabled = this.busy;
    this.add10Btn.disabled = !ready || !this.machine.can("addUsers");
    this.add100Btn.disabled = !ready || !this.machine.can("addUsers");
    this.trainBtn.disabled = !ready || !trainEnabled(phase, this.userCount());
    this.recoverBtn.disabled = !ready || !recoverEnabled(phase);

    this.metaLine.textContent = this.sessionId
      ? `session ${this.sessionId} | users ${this.userCount()} | epochs ${this.epochCount}`
      : "no session";
    this.grid.innerHTML = userGridHtml(this.snapshot?.users ?? [], this.notes);
  }
}
