"""Session-oriented HTTP service for the interactive explorer UI.

Sessions live in memory; each session serializes its own mutations while
distinct sessions proceed concurrently. Every state the service returns is
reached exclusively through engine transitions, so the UI exercises the
forward and backward semantics by construction.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path as FsPath

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .analysis import NotCoinitialError, conflicting, key_order, keys_of
from .parser import RtplSyntaxError, parse_program
from .printer import print_term
from .semantics import (
    KeyAllocator, Transition, backward_steps, forward_steps,
    forward_with_label,
)
from .terms import (
    DefinitionEnv, KeyedPrefix, Nil, Par, Prefix, Restrict, RpAct, RpGhost,
    RpSigma, RtplError, Sum, Term, Timeout, TimeoutL, TimeoutR, Const,
    action_from_text, action_text, max_key,
)
from .trace import trace_json
from .verify import Path, fold_path, parabolic_normalize


@dataclass
class Session:
    id: str
    program_text: str
    env: DefinitionEnv
    initial: Term
    current: Term
    history: list[Transition] = field(default_factory=list)
    allocator: KeyAllocator = field(default_factory=KeyAllocator)
    lock: threading.Lock = field(default_factory=threading.Lock)


class CreateBody(BaseModel):
    program: str


class StepBody(BaseModel):
    dir: str
    act: str
    key: int


class SaveBody(BaseModel):
    path: str | None = None


def term_ast(t: Term) -> dict:
    """Structural JSON so the UI renders trees without parsing any syntax."""
    match t:
        case Nil():
            return {"node": "nil"}
        case Const(ident):
            return {"node": "const", "name": ident}
        case Prefix(act, cont):
            return {"node": "prefix", "act": action_text(act),
                    "cont": term_ast(cont)}
        case KeyedPrefix(rp, k, cont):
            kind = {"RpAct": "act", "RpSigma": "sigma", "RpGhost": "ghost"}[
                type(rp).__name__]
            act = action_text(rp.act) if isinstance(rp, RpAct) else "s"
            return {"node": "keyed", "rp": kind, "act": act, "key": k,
                    "cont": term_ast(cont)}
        case Timeout(m, a):
            return {"node": "timeout", "main": term_ast(m), "alt": term_ast(a)}
        case TimeoutL(m, a, k):
            return {"node": "timeoutl", "main": term_ast(m), "alt": term_ast(a),
                    "key": k}
        case TimeoutR(m, a, k):
            return {"node": "timeoutr", "main": term_ast(m), "alt": term_ast(a),
                    "key": k}
        case Sum(l, r):
            return {"node": "sum", "left": term_ast(l), "right": term_ast(r)}
        case Par(l, r):
            return {"node": "par", "left": term_ast(l), "right": term_ast(r)}
        case Restrict(b, n):
            return {"node": "restrict", "name": n, "body": term_ast(b)}
    raise TypeError(t)


def create_app(cors_origins: tuple[str, ...] = ("*",),
               trace_dir: str = "traces") -> FastAPI:
    app = FastAPI(title="rtpl session service")
    app.add_middleware(
        CORSMiddleware, allow_origins=list(cors_origins),
        allow_methods=["*"], allow_headers=["*"],
    )
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()

    def get_session(sid: str) -> Session:
        with registry_lock:
            s = sessions.get(sid)
        if s is None:
            raise HTTPException(404, f"unknown session {sid}")
        return s

    def enumerate_transitions(s: Session) -> list[Transition]:
        # snapshot allocator: GET and the subsequent POST see the same keys
        probe = KeyAllocator(max(s.allocator.next, max_key(s.current) + 1))
        return forward_steps(s.current, s.env, probe) + \
            backward_steps(s.current, s.env)

    def state_payload(s: Session) -> dict:
        order = key_order(s.current)
        return {
            "session_id": s.id,
            "state": print_term(s.current),
            "ast": term_ast(s.current),
            "keys": [{"id": k.id, "kind": k.kind.value}
                     for k in sorted(keys_of(s.current), key=lambda k: k.id)],
            "key_order": order.to_json(),
            "history": trace_json(s.program_text, s.env, s.history),
        }

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateBody):
        try:
            env, main = parse_program(body.program)
        except (RtplSyntaxError, RtplError) as e:
            raise HTTPException(400, str(e))
        sid = uuid.uuid4().hex[:12]
        s = Session(sid, body.program, env, main, main,
                    allocator=KeyAllocator(max_key(main) + 1))
        with registry_lock:
            sessions[sid] = s
        return {"session_id": sid, "state": print_term(main),
                "ast": term_ast(main)}

    @app.get("/sessions/{sid}")
    def get_state(sid: str):
        s = get_session(sid)
        with s.lock:
            return state_payload(s)

    @app.get("/sessions/{sid}/transitions")
    def get_transitions(sid: str):
        s = get_session(sid)
        with s.lock:
            ts = enumerate_transitions(s)
            entries = [{
                "dir": t.direction.value,
                "act": action_text(t.label.action),
                "key": t.label.key.id,
                "rule": t.rule,
                "target": print_term(t.target),
            } for t in ts]
            n = len(ts)
            matrix = [[True] * n for _ in range(n)]
            for i in range(n):
                for j in range(n):
                    if i != j:
                        try:
                            matrix[i][j] = not conflicting(ts[i], ts[j])
                        except (RtplError, NotCoinitialError):
                            matrix[i][j] = False
                    else:
                        matrix[i][j] = False
            return {
                "fwd": [e for e in entries if e["dir"] == "fwd"],
                "bk": [e for e in entries if e["dir"] == "bk"],
                "independence": matrix,
            }

    @app.post("/sessions/{sid}/step")
    def step(sid: str, body: StepBody):
        if body.dir not in ("fwd", "bk"):
            raise HTTPException(400, "dir must be 'fwd' or 'bk'")
        s = get_session(sid)
        with s.lock:
            matches = [t for t in enumerate_transitions(s)
                       if t.direction.value == body.dir
                       and action_text(t.label.action) == body.act
                       and t.label.key.id == body.key]
            if not matches and body.dir == "fwd":
                # redoing an undone step names a key below the allocator
                # snapshot; any fresh key is licensed by the rules
                matches = forward_with_label(
                    s.current, s.env, action_from_text(body.act), body.key)
                if len(matches) > 1:
                    raise HTTPException(
                        409, f"ambiguous fwd transition {body.act}[{body.key}]")
            if not matches:
                raise HTTPException(
                    409, f"no enabled {body.dir} transition {body.act}[{body.key}]")
            t = matches[0]
            s.allocator.note(t.label.key.id)
            s.current = t.target
            s.history.append(t)
            return state_payload(s)

    @app.post("/sessions/{sid}/normalize")
    def normalize(sid: str):
        s = get_session(sid)
        with s.lock:
            path = fold_path(Path(s.initial, tuple(s.history)), s.env)
            norm = parabolic_normalize(path, s.env)
            return {
                "input": trace_json(s.program_text, s.env, list(path.steps)),
                "parabolic": trace_json(s.program_text, s.env, list(norm.steps)),
                "length": len(norm),
            }

    @app.post("/sessions/{sid}/save")
    def save(sid: str, body: SaveBody | None = None):
        s = get_session(sid)
        with s.lock:
            data = trace_json(s.program_text, s.env, s.history)
        path = FsPath((body.path if body and body.path else None)
                      or FsPath(trace_dir) / f"{sid}.json")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(data, indent=2))
        return {"path": str(path)}

    @app.delete("/sessions/{sid}", status_code=204)
    def delete(sid: str):
        with registry_lock:
            if sid not in sessions:
                raise HTTPException(404, f"unknown session {sid}")
            del sessions[sid]

    return app
