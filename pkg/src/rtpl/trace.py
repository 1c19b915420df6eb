"""Trace JSON: the wire format shared by the CLI and the session service."""

from __future__ import annotations

from .parser import parse_configuration, parse_program
from .printer import print_term
from .semantics import (
    DEFAULT_CONFIG, Dir, EngineConfig, Transition, backward_with_label,
    forward_with_label,
)
from .terms import DefinitionEnv, RtplError, Term, action_from_text, action_text


def trace_json(program_text: str, env: DefinitionEnv,
               steps: list[Transition]) -> dict:
    return {
        "program": program_text,
        "defs": {name: print_term(env.defs[name]) for name in env.order},
        "steps": [
            {
                "dir": t.direction.value,
                "act": action_text(t.label.action),
                "key": t.label.key.id,
                "rule": t.rule,
                "target": print_term(t.target),
            }
            for t in steps
        ],
    }


def replay_trace(data: dict, config: EngineConfig = DEFAULT_CONFIG
                 ) -> tuple[DefinitionEnv, Term]:
    """Re-run a trace from its program; checks each recorded target."""
    text = data["program"]
    if data.get("defs"):
        text = "".join(f"{n} = {b};\n" for n, b in data["defs"].items()) + text
    env, at = parse_program(text)
    for step in data["steps"]:
        act = action_from_text(step["act"])
        key = int(step["key"])
        if step["dir"] == Dir.FWD.value:
            cands = forward_with_label(at, env, act, key, config)
        else:
            cands = backward_with_label(at, env, act, key, config)
        want = parse_configuration(step["target"], env)
        hits = [t for t in cands if t.target == want]
        if not hits:
            raise RtplError(
                f"trace step {step} does not replay from {print_term(at)}")
        at = hits[0].target
    return env, at
