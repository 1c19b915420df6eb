import type { Ast } from "./types.js";

// Runs of at least this many ghost prefixes collapse into one badge node.
const GHOST_COLLAPSE = 3;

function el(tag: string, cls: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

function keyBadge(key: number, kind: "time" | "comm"): HTMLElement {
  const b = el("span", `key-badge key-${kind}`, `[${key}]`);
  b.dataset.key = String(key);
  return b;
}

function ghostRun(ast: Ast): { keys: number[]; rest: Ast } {
  const keys: number[] = [];
  let at = ast;
  while (at.node === "keyed" && at.rp === "ghost") {
    keys.push(at.key);
    at = at.cont;
  }
  return { keys, rest: at };
}

/** Render a configuration tree; executed prefixes carry key badges and
 *  ghost prefixes are styled apart from deliberate (executed sigma) delays. */
export function renderTree(ast: Ast): HTMLElement {
  const run = ghostRun(ast);
  if (run.keys.length >= GHOST_COLLAPSE) {
    const node = el("div", "node ghost ghost-run");
    const head = el("span", "node-head");
    head.append(el("span", "rp ghost-label", "σ⊥"));
    head.append(el("span", "ghost-count", `×${run.keys.length}`));
    head.append(el("span", "ghost-keys", ` keys ${run.keys.join(",")}`));
    node.append(head, renderTree(run.rest));
    return node;
  }
  switch (ast.node) {
    case "nil":
      return el("div", "node nil", "0");
    case "const":
      return el("div", "node const", ast.name);
    case "prefix": {
      const node = el("div", "node prefix pending");
      node.append(el("span", "node-head act", ast.act), renderTree(ast.cont));
      return node;
    }
    case "keyed": {
      const kindCls = ast.rp === "act" ? "executed" : ast.rp; // ghost | sigma
      const node = el("div", `node keyed ${kindCls}`);
      const head = el("span", "node-head");
      head.append(
        el("span", "rp", ast.rp === "ghost" ? "σ⊥" : ast.act),
        keyBadge(ast.key, ast.rp === "act" ? "comm" : "time"),
      );
      node.append(head, renderTree(ast.cont));
      return node;
    }
    case "timeout": {
      const node = el("div", "node timeout");
      node.append(
        el("span", "node-head", "timeout"),
        labelled("main", renderTree(ast.main)),
        labelled("alt", renderTree(ast.alt)),
      );
      return node;
    }
    case "timeoutl":
    case "timeoutr": {
      const side = ast.node === "timeoutl" ? "L" : "R";
      const node = el("div", `node timeout fired-${side.toLowerCase()}`);
      const head = el("span", "node-head");
      head.append(
        el("span", "", `timeout@${side}`),
        keyBadge(ast.key, side === "R" ? "time" : "comm"),
      );
      node.append(
        head,
        labelled(side === "L" ? "running" : "frozen", renderTree(ast.main)),
        labelled(side === "R" ? "running" : "frozen", renderTree(ast.alt)),
      );
      return node;
    }
    case "sum":
    case "par": {
      const op = ast.node === "sum" ? "+" : "∥";
      const node = el("div", `node ${ast.node}`);
      node.append(el("span", "node-head", op), renderTree(ast.left), renderTree(ast.right));
      return node;
    }
    case "restrict": {
      const node = el("div", "node restrict");
      node.append(el("span", "node-head", `\\ ${ast.name}`), renderTree(ast.body));
      return node;
    }
  }
}

function labelled(label: string, child: HTMLElement): HTMLElement {
  const wrap = el("div", `branch branch-${label}`);
  wrap.append(el("span", "branch-label", label), child);
  return wrap;
}
