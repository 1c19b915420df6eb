import { ApiClient, ApiError } from "./api.js";
import { renderCausality } from "./causality.js";
import { renderTree } from "./tree.js";
import type { StatePayload, TransitionEntry, Transitions } from "./types.js";

/** The explorer: a pure projection of server responses into the DOM.
 *
 * No semantics are computed client-side; every mutation is an API step and
 * every repaint re-reads the session. History rollback applies the inverse
 * of each undone step through the backward (or forward) API, so the UI
 * exercises the reversible semantics by construction. */
export class App {
  private sid: string | null = null;
  private state: StatePayload | null = null;
  private transitions: Transitions | null = null;

  readonly statePane: HTMLElement;
  readonly termPane: HTMLElement;
  readonly transitionsPane: HTMLElement;
  readonly timelinePane: HTMLElement;
  readonly causalityPane: HTMLElement;
  readonly errorBar: HTMLElement;

  constructor(readonly root: HTMLElement, readonly api: ApiClient) {
    this.statePane = section(root, "state", "configuration");
    this.termPane = child(this.statePane, "term-tree");
    this.transitionsPane = section(root, "transitions", "transitions");
    this.timelinePane = section(root, "timeline", "history");
    this.causalityPane = section(root, "causality", "causal order");
    this.errorBar = child(root, "error-bar");
  }

  async load(program: string): Promise<void> {
    if (this.sid) {
      await this.api.deleteSession(this.sid).catch(() => undefined);
    }
    const created = await this.api.createSession(program);
    this.sid = created.session_id;
    await this.refresh();
  }

  async refresh(): Promise<void> {
    if (!this.sid) return;
    this.state = await this.api.getState(this.sid);
    this.transitions = await this.api.getTransitions(this.sid);
    this.errorBar.textContent = "";
    this.renderState();
    this.renderTransitions();
    this.renderTimeline();
    this.renderCausalityPane();
  }

  printedState(): string {
    // read from the DOM so callers observe fully rendered states only
    return this.termPane.querySelector(".printed-term")?.textContent ?? "";
  }

  private renderState(): void {
    this.termPane.replaceChildren();
    if (!this.state) return;
    const caption = document.createElement("div");
    caption.className = "printed-term";
    caption.textContent = this.state.state;
    this.termPane.append(caption, renderTree(this.state.ast));
  }

  private renderTransitions(): void {
    this.transitionsPane.replaceChildren();
    if (!this.transitions) return;
    const all = [...this.transitions.fwd, ...this.transitions.bk];
    const matrix = this.transitions.independence;
    all.forEach((entry, index) => {
      const btn = document.createElement("button");
      btn.className = `transition ${entry.dir}`;
      btn.dataset.dir = entry.dir;
      btn.dataset.act = entry.act;
      btn.dataset.key = String(entry.key);
      btn.dataset.index = String(index);
      const arrow = entry.dir === "fwd" ? "→" : "↫";
      btn.textContent = `${arrow} ${entry.act}[${entry.key}]  (${entry.rule})`;
      btn.title = entry.target;
      btn.addEventListener("click", () => void this.applyStep(entry));
      btn.addEventListener("mouseenter", () => this.showIndependence(index, matrix));
      btn.addEventListener("mouseleave", () => this.clearIndependence());
      this.transitionsPane.append(btn);
    });
    if (all.length === 0) {
      this.transitionsPane.append(document.createTextNode("stuck (standard and no moves)"));
    }
  }

  private showIndependence(index: number, matrix: boolean[][]): void {
    const buttons = this.transitionsPane.querySelectorAll<HTMLButtonElement>("button.transition");
    buttons.forEach((b) => {
      const j = Number(b.dataset.index);
      if (j === index) return;
      b.classList.add(matrix[index]?.[j] ? "independent" : "conflicting");
    });
  }

  private clearIndependence(): void {
    this.transitionsPane
      .querySelectorAll("button.transition")
      .forEach((b) => b.classList.remove("independent", "conflicting"));
  }

  async applyStep(entry: Pick<TransitionEntry, "dir" | "act" | "key">): Promise<void> {
    if (!this.sid) return;
    try {
      await this.api.step(this.sid, entry);
    } catch (e) {
      if (e instanceof ApiError) {
        this.errorBar.textContent = e.message; // the server's 409, verbatim
        return;
      }
      throw e;
    }
    await this.refresh();
  }

  private renderTimeline(): void {
    this.timelinePane.replaceChildren();
    if (!this.state) return;
    const steps = this.state.history.steps;
    const mk = (label: string, index: number) => {
      const btn = document.createElement("button");
      btn.className = "timeline-point";
      btn.dataset.index = String(index);
      btn.textContent = label;
      btn.addEventListener("click", () => void this.rollbackTo(index));
      this.timelinePane.append(btn);
    };
    mk("initial", 0);
    steps.forEach((s, i) => {
      const tag = s.dir === "bk" ? `~${s.act}[${s.key}]` : `${s.act}[${s.key}]`;
      mk(tag, i + 1);
    });
    const norm = document.createElement("button");
    norm.className = "normalize";
    norm.textContent = "parabolic form";
    norm.title = "rewrite the history into backward-then-forward form (read-only)";
    norm.addEventListener("click", () => void this.showParabolic());
    const out = document.createElement("div");
    out.className = "parabolic-out";
    this.timelinePane.append(norm, out);
  }

  /** Ask the service for the parabolic form of the history (read-only). */
  async showParabolic(): Promise<void> {
    if (!this.sid) return;
    const res = await this.api.normalize(this.sid);
    const out = this.timelinePane.querySelector(".parabolic-out");
    if (!out) return;
    const steps = res.parabolic.steps;
    out.textContent = steps.length
      ? steps.map((s) => `${s.dir === "bk" ? "~" : ""}${s.act}[${s.key}]`).join(" ; ")
      : "ε (empty path)";
  }

  /** Return to the configuration after `index` history steps by applying
   *  the inverse of each later step, newest first, through the API. */
  async rollbackTo(index: number): Promise<void> {
    if (!this.sid || !this.state) return;
    const steps = this.state.history.steps;
    for (let i = steps.length - 1; i >= index; i--) {
      const s = steps[i];
      await this.api.step(this.sid, {
        dir: s.dir === "fwd" ? "bk" : "fwd",
        act: s.act,
        key: s.key,
      });
    }
    await this.refresh();
  }

  private renderCausalityPane(): void {
    this.causalityPane.replaceChildren();
    if (this.state) this.causalityPane.append(renderCausality(this.state.key_order));
  }
}

function section(root: HTMLElement, cls: string, title: string): HTMLElement {
  const pane = document.createElement("section");
  pane.className = `pane ${cls}`;
  const h = document.createElement("h2");
  h.textContent = title;
  pane.append(h);
  root.append(pane);
  return pane;
}

function child(parent: HTMLElement, cls: string): HTMLElement {
  const node = document.createElement("div");
  node.className = cls;
  parent.append(node);
  return node;
}
