"""Built-in regression corpus: the worked examples re-run on the engines.

Each check replays one published derivation or value and compares for exact
structural equality after parsing. Used by `rtpl examples` and the
acceptance suite.
"""

from __future__ import annotations

from typing import Callable

from .analysis import fcc, key_order
from .parser import parse_configuration, parse_program
from .printer import print_term
from .reference import tpl_steps
from .semantics import (
    KeyAllocator, backward_steps, forward_steps, forward_with_label, synch,
)
from .terms import (
    CoName, EMPTY_ENV, Name, SIGMA, Sigma, TAU, Tau, Term, action_from_text,
)


def _parse(src: str):
    return parse_program(src)


def _conf(src: str, env=EMPTY_ENV) -> Term:
    return parse_configuration(src, env)


def _run_forward(src: str, script: list[tuple[str, int]]) -> Term:
    env, p = _parse(src)
    at: Term = p
    for (act, key) in script:
        hits = forward_with_label(at, env, action_from_text(act), key)
        assert hits, f"no {act}[{key}] from {print_term(at)}"
        at = hits[0].target
    return at


def check_tpl_timeout_sync() -> tuple[bool, str]:
    env, p = _parse("'p.0 | [p.a.0](b.0)")
    want = _conf("0 | a.0")
    ok = (TAU, want) in [(a, t) for (a, t) in tpl_steps(p, env)]
    return ok, "tau to `0 | a.0`"


def check_tpl_timeout_fires() -> tuple[bool, str]:
    env, p = _parse("s.'p.0 | [p.a.0](b.0)")
    want = _conf("'p.0 | b.0")
    ok = (SIGMA, want) in tpl_steps(p, env)
    return ok, "sigma to `'p.0 | b.0`"


def check_tpl_patient_choice() -> tuple[bool, str]:
    env, p = _parse("a.c.0 + b.d.0")
    ok = (SIGMA, p) in tpl_steps(p, env)
    return ok, "state-preserving sigma on a choice"


def check_choice_run() -> tuple[bool, str]:
    at = _run_forward("a.0 + s.0", [("a", 0), ("s", 1)])
    want = _conf("a[0].s_[1].0 + s[1].0")
    return at == want, f"reached {print_term(at)}"


def check_ghost_do_undo() -> tuple[bool, str]:
    env, p = _parse("a.b.0")
    ghost = forward_with_label(p, env, SIGMA, 0)[0].target
    if print_term(ghost) != "s_[0].a.b.0":
        return False, f"patient step gave {print_term(ghost)}"
    undo = [t for t in backward_steps(ghost, env) if t.label.key.id == 0]
    if not undo or undo[0].target != p:
        return False, "ghost undo failed"
    redo = forward_with_label(p, env, Name("a"), 1)
    if not redo or print_term(redo[0].target) != "a[1].b.0":
        return False, "action after ghost undo failed"
    env2, q = _parse("s.a.b.0")
    committed = forward_with_label(q, env2, SIGMA, 0)[0].target
    if print_term(committed) != "s[0].a.b.0":
        return False, f"sigma prefix gave {print_term(committed)}"
    back = [t.target for t in backward_steps(committed, env2)]
    if back != [q]:
        return False, "sigma undo failed"
    blocked = [t for t in forward_steps(q, env2, KeyAllocator(1))
               if not isinstance(t.label.action, Sigma)]
    return not blocked, "after the undo, s.a.P still cannot interact on a"


def check_timeout_priority() -> tuple[bool, str]:
    env, p = _parse("[(a.0 | 'a.0)](b.0)")
    ts = forward_steps(p, env, KeyAllocator())
    taus = [t for t in ts if isinstance(t.label.action, Tau)]
    sigmas = [t for t in ts if isinstance(t.label.action, Sigma)]
    if len(taus) != 1 or sigmas:
        return False, f"{len(taus)} tau / {len(sigmas)} sigma transitions"
    k = taus[0].label.key.id
    want = _conf(f"[a[{k}].0 | 'a[{k}].0](b.0)@L[{k}]")
    return taus[0].target == want, f"tau target {print_term(taus[0].target)}"


def check_key_order_example() -> tuple[bool, str]:
    x = _conf("[a.0](b[1].0)@R[0] | s_[0].c[2].d[3].0 | s_[0].'c[2].0")
    got = key_order(x).pairs
    want = {(0, 1), (0, 2), (0, 3), (2, 3)}
    return got == frozenset(want), f"ord pairs {sorted(got)}"


def check_fcc_prefix() -> tuple[bool, str]:
    y = _conf("a[0].b[1].0")
    z = _conf("a[0].b[2].0")
    return fcc(y, z) is True, "same prefix, two keys"


def check_fcc_timeout_wait() -> tuple[bool, str]:
    y = _conf("[a.0](b[1].(a[2].0 + b.0))@R[0]")
    z = _conf("[a.0](b[1].(a.0 + b[3].0))@R[0]")
    return fcc(y, z) is True, "branches of a choice inside a fired timeout"


def _barbs(*names: str) -> frozenset:
    out = set()
    for n in names:
        out.add(CoName(n[1:]) if n.startswith("'") else Name(n))
    return frozenset(out)


def check_synch_pair() -> tuple[bool, str]:
    env, p = _parse("(a.0 + 'a.0) | a.0")
    got = synch(p, env)
    want = frozenset({_barbs("a"), _barbs("a", "'a")})
    return got == want, "families {{a},{a,'a}}"


def check_synch_two_pairs() -> tuple[bool, str]:
    env, p = _parse("(b.0 + 'a.0) | a.0 | 'b.0")
    got = synch(p, env)
    want = frozenset({_barbs("b", "a", "'b"), _barbs("'a", "a", "'b")})
    return got == want, "two synchronisation families"


CHECKS: dict[str, Callable[[], tuple[bool, str]]] = {
    "tpl-timeout-sync": check_tpl_timeout_sync,
    "tpl-timeout-fires": check_tpl_timeout_fires,
    "tpl-patient-choice": check_tpl_patient_choice,
    "choice-run": check_choice_run,
    "ghost-do-undo": check_ghost_do_undo,
    "timeout-priority": check_timeout_priority,
    "key-order": check_key_order_example,
    "fcc-prefix": check_fcc_prefix,
    "fcc-timeout-wait": check_fcc_timeout_wait,
    "synch-pair": check_synch_pair,
    "synch-two-pairs": check_synch_two_pairs,
}


def run_all() -> list[tuple[str, bool, str]]:
    out = []
    for name, fn in CHECKS.items():
        try:
            ok, detail = fn()
        except Exception as e:  # a crashed check is a failed check
            ok, detail = False, f"raised {e!r}"
        out.append((name, ok, detail))
    return out
