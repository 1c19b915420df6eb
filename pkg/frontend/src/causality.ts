import type { KeyOrder } from "./types.js";

/** Render the causal order on keys: time keys as a totally ordered spine
 *  (they always are, by the total-order theorem), communication keys beside
 *  it with their ordering edges. */
export function renderCausality(order: KeyOrder): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "causality-view";
  const ids = Object.keys(order.kinds).map(Number).sort((a, b) => a - b);
  if (ids.length === 0) {
    wrap.textContent = "no keys yet";
    return wrap;
  }
  const lt = new Set(order.lt.map(([a, b]) => `${a}<${b}`));
  const le = (a: number, b: number) => a === b || lt.has(`${a}<${b}`);

  const timeKeys = ids.filter((k) => order.kinds[String(k)] === "time");
  timeKeys.sort((a, b) => (le(a, b) ? -1 : 1));
  const spine = document.createElement("div");
  spine.className = "time-spine";
  for (const k of timeKeys) {
    const dot = document.createElement("span");
    dot.className = "spine-key";
    dot.dataset.key = String(k);
    dot.textContent = `σ[${k}]`;
    spine.append(dot);
  }
  wrap.append(spine);

  const comms = document.createElement("ul");
  comms.className = "comm-keys";
  for (const k of ids.filter((k) => order.kinds[String(k)] === "comm")) {
    const li = document.createElement("li");
    li.dataset.key = String(k);
    const below = ids.filter((j) => j !== k && lt.has(`${j}<${k}`));
    const above = ids.filter((j) => j !== k && lt.has(`${k}<${j}`));
    li.textContent =
      `[${k}]` +
      (below.length ? ` after {${below.join(",")}}` : " (minimal)") +
      (above.length ? ` before {${above.join(",")}}` : "");
    comms.append(li);
  }
  wrap.append(comms);
  return wrap;
}
