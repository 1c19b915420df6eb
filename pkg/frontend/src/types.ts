// Wire types of the session service (src/rtpl/service.py).

export type KeyKind = "time" | "comm";

export type Ast =
  | { node: "nil" }
  | { node: "const"; name: string }
  | { node: "prefix"; act: string; cont: Ast }
  | { node: "keyed"; rp: "act" | "sigma" | "ghost"; act: string; key: number; cont: Ast }
  | { node: "timeout"; main: Ast; alt: Ast }
  | { node: "timeoutl"; main: Ast; alt: Ast; key: number }
  | { node: "timeoutr"; main: Ast; alt: Ast; key: number }
  | { node: "sum"; left: Ast; right: Ast }
  | { node: "par"; left: Ast; right: Ast }
  | { node: "restrict"; name: string; body: Ast };

export interface TraceStep {
  dir: "fwd" | "bk";
  act: string;
  key: number;
  rule: string;
  target: string;
}

export interface Trace {
  program: string;
  defs: Record<string, string>;
  steps: TraceStep[];
}

export interface KeyOrder {
  lt: [number, number][];
  kinds: Record<string, KeyKind>;
}

export interface StatePayload {
  session_id: string;
  state: string;
  ast: Ast;
  keys: { id: number; kind: KeyKind }[];
  key_order: KeyOrder;
  history: Trace;
}

export interface TransitionEntry {
  dir: "fwd" | "bk";
  act: string;
  key: number;
  rule: string;
  target: string;
}

export interface Transitions {
  fwd: TransitionEntry[];
  bk: TransitionEntry[];
  // independence over the concatenation fwd ++ bk, diagonal false
  independence: boolean[][];
}
