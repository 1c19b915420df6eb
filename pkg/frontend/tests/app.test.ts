// Scripted-browser round trip against the real service (criterion 12):
// load `a.0 + s.0`, take a then s, roll back via the timeline, and the
// rendered term must equal the initial rendering; the displayed transition
// list must always equal the service's own enumeration.
import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { App } from "../src/app.js";
import { API } from "./global-setup.js";

async function waitFor(cond: () => boolean, ms = 5000): Promise<void> {
  const deadline = Date.now() + ms;
  while (!cond()) {
    if (Date.now() > deadline) throw new Error("timed out waiting for UI update");
    await new Promise((r) => setTimeout(r, 25));
  }
}

function transitionButtons(app: App): HTMLButtonElement[] {
  return [...app.transitionsPane.querySelectorAll<HTMLButtonElement>("button.transition")];
}

async function expectListMatchesService(app: App, api: ApiClient, sid: string) {
  const server = await api.getTransitions(sid);
  const want = [...server.fwd, ...server.bk].map(
    (e) => `${e.dir}:${e.act}[${e.key}]`);
  const shown = transitionButtons(app).map(
    (b) => `${b.dataset.dir}:${b.dataset.act}[${b.dataset.key}]`);
  expect(shown).toEqual(want);
}

describe("explorer round trip", () => {
  let root: HTMLElement;
  let api: ApiClient;
  let app: App;

  beforeEach(() => {
    root = document.createElement("div");
    document.body.append(root);
    api = new ApiClient(API);
    app = new App(root, api);
  });

  afterEach(() => {
    root.remove();
  });

  it("loads, steps a then s, and timeline rollback restores the initial rendering", async () => {
    await app.load("a.0 + s.0");
    const sid = (await api.createSession("0")).session_id; // unrelated probe session
    await api.deleteSession(sid);

    const initialTerm = app.printedState();
    const initialTree = app.termPane.innerHTML;
    expect(initialTerm).toBe("a.0 + s.0");
    // two forward buttons, no backward ones
    const buttons = transitionButtons(app);
    expect(buttons.map((b) => b.dataset.dir)).toEqual(["fwd", "fwd"]);
    expect(new Set(buttons.map((b) => b.dataset.act))).toEqual(new Set(["a", "s"]));
    expect(app.timelinePane.querySelectorAll(".timeline-point").length).toBe(1);

    // take a, then s, by clicking the rendered buttons
    transitionButtons(app).find((b) => b.dataset.act === "a")!.click();
    await waitFor(() => app.printedState() === "a[0].0 + s.0");
    transitionButtons(app).find((b) => b.dataset.act === "s")!.click();
    await waitFor(() => app.printedState() === "a[0].s_[1].0 + s[1].0");

    // both branches retained, ghost and executed sigma rendered apart
    expect(app.termPane.querySelector(".node.ghost")).toBeTruthy();
    expect(app.termPane.querySelector(".node.sigma")).toBeTruthy();
    expect(app.termPane.querySelector(".node.executed")).toBeTruthy();

    // timeline: initial + 2 steps; roll back to the initial point
    const points = app.timelinePane.querySelectorAll<HTMLButtonElement>(".timeline-point");
    expect(points.length).toBe(3);
    points[0].click();
    await waitFor(() => app.printedState() === "a.0 + s.0");
    expect(app.termPane.innerHTML).toBe(initialTree);

    // the history now records the do and undo steps, nothing was overwritten
    const state = await api.getState(sessionIdOf(app));
    expect(state.history.steps.map((s) => `${s.dir}:${s.act}`)).toEqual(
      ["fwd:a", "fwd:s", "bk:s", "bk:a"]);
  });

  it("keeps the transition list equal to the service enumeration as steps happen", async () => {
    await app.load("[(a.0 | 'a.0)](b.0)");
    const sid = sessionIdOf(app);
    await expectListMatchesService(app, api, sid);
    // exactly one tau among the forward entries, and no sigma
    const acts = transitionButtons(app).map((b) => b.dataset.act);
    expect(acts.filter((a) => a === "tau").length).toBe(1);
    expect(acts).not.toContain("s");

    transitionButtons(app).find((b) => b.dataset.act === "tau")!.click();
    await waitFor(() => app.printedState().includes("@L"));
    await expectListMatchesService(app, api, sid);

    transitionButtons(app).find((b) => b.dataset.dir === "bk")!.click();
    await waitFor(() => app.printedState() === "[a.0 | 'a.0](b.0)");
    await expectListMatchesService(app, api, sid);
  });

  it("surfaces the server's conflict answer on hover data", async () => {
    await app.load("a.0 | b.0");
    const sid = sessionIdOf(app);
    const server = await api.getTransitions(sid);
    const buttons = transitionButtons(app);
    // hovering button i marks button j independent per the server matrix
    buttons[0].dispatchEvent(new Event("mouseenter"));
    const marked = transitionButtons(app).map((b) =>
      b.classList.contains("independent") ? "i" :
      b.classList.contains("conflicting") ? "c" : "-");
    const expected = server.independence[0].map((v, j) =>
      j === 0 ? "-" : v ? "i" : "c");
    expect(marked).toEqual(expected);
  });

  it("shows a verbatim 409 for a disabled step", async () => {
    await app.load("a.0");
    await app.applyStep({ dir: "bk", act: "a", key: 7 });
    expect(app.errorBar.textContent).toContain("no enabled bk transition a[7]");
  });

  it("shows the parabolic form of the history on demand", async () => {
    await app.load("a.b.0");
    transitionButtons(app).find((b) => b.dataset.act === "a")!.click();
    await waitFor(() => app.printedState() === "a[0].b.0");
    transitionButtons(app).find(
      (b) => b.dataset.dir === "bk" && b.dataset.act === "a")!.click();
    await waitFor(() => app.printedState() === "a.b.0");
    await app.showParabolic();
    const out = app.timelinePane.querySelector(".parabolic-out");
    expect(out?.textContent).toContain("ε"); // do/undo cancels to the empty path
  });
});

function sessionIdOf(app: App): string {
  // the App keeps its session private; read it off the service state payload
  return (app as unknown as { sid: string }).sid;
}
