"""Seed processes for the property suites.

Covers prefixing, explicit delays, timeouts, choice, parallelism,
restriction, synchronisation through restriction, and guarded recursion.
No tau prefixes: tau arises only from synchronisation, keeping maximal
progress a theorem on every reachable state (tau-prefixed terms are patient
by rule PAct and deliberately delay-able).
"""

from __future__ import annotations

SEEDS: dict[str, str] = {
    "nil": "0",
    "prefix": "a.0",
    "delay": "s.0",
    "seq": "a.b.0",
    "delayed-action": "s.a.0",
    "choice": "a.0 + b.0",
    "choice-delay": "a.0 + s.0",
    "handshake": "a.0 | 'a.0",
    "interleave": "a.0 | b.0",
    "timeout": "[a.0](b.0)",
    "timeout-priority": "[(a.0 | 'a.0)](b.0)",
    "hidden-handshake": "(a.0 | 'a.0) \\ a",
    "choice-sync": "(a.0 + 'a.0) | a.0",
    "timely-sender": "s.'p.0 | [p.a.0](b.0)",
    "prompt-sender": "'p.0 | [p.a.0](b.0)",
    "ticker": "A = a.A; A",
    "metronome": "A = a.s.A; A | 'a.0",
    "ghost-motivator": "s.a.0 | b.s.0",
    "timeout-context": "[a.0](b.0) | 'a.0",
    "hidden-race": "(a.b.0 + b.a.0) \\ b",
    "nested-choice": "a.(b.0 + s.c.0)",
    "sigma-timeout": "[s.a.0](b.0)",
    "recursive-timeout": "A = a.[b.A](c.A); A",
    "mixed-sync": "(s.a.0 + b.0) | 'b.s.0",
}
