from hypothesis import given, settings

from conftest import reachable_configurations
from rtpl.parser import parse_program
from rtpl.semantics import KeyAllocator, can_tau, forward_steps, synch
from rtpl.terms import CoName, EMPTY_ENV, Name, TAU, Tau


def fam(*groups):
    out = set()
    for g in groups:
        members = set()
        for n in g:
            if n == "tau":
                members.add(TAU)
            elif n.startswith("'"):
                members.add(CoName(n[1:]))
            else:
                members.add(Name(n))
        out.add(frozenset(members))
    return frozenset(out)


def s(src):
    env, p = parse_program(src)
    return synch(p, env), env, p


def test_synch_choice():
    got, _, _ = s("a.0 + 'a.0")
    assert got == fam(["a"], ["'a"])


def test_synch_pairing():
    got, env, p = s("(a.0 + 'a.0) | a.0")
    assert got == fam(["a"], ["a", "'a"])
    assert can_tau(p, env)


def test_synch_three_components():
    got, env, p = s("(b.0 + 'a.0) | a.0 | 'b.0")
    assert got == fam(["b", "a", "'b"], ["'a", "a", "'b"])
    assert can_tau(p, env)


def test_synch_sigma_empty():
    got, env, p = s("s.a.0")
    assert got == frozenset()
    assert not can_tau(p, env)


def test_sigma_component_is_neutral():
    # a sigma prefix offers nothing but must not mask its siblings
    _, env, p = s("s.c.0 | (a.0 | 'a.0)")
    assert can_tau(p, env)


def test_tau_prefix_detected():
    got, env, p = s("tau.0 | a.0")
    assert can_tau(p, env)
    assert any(TAU in c for c in got)


def test_restriction_blocks_external_pairing():
    _, env, p = s("('a.0) \\ a | a.0")
    assert not can_tau(p, env)


def test_restriction_keeps_internal_pair():
    _, env, p = s("(a.0 | 'a.0) \\ a")
    assert can_tau(p, env)


def test_acted_choice_offers_only_the_taken_branch():
    from rtpl.parser import parse_configuration
    x = parse_configuration("a[1].b.0 + c.0", EMPTY_ENV)
    assert synch(x, EMPTY_ENV) == fam(["b"])


@settings(max_examples=80, deadline=None)
@given(reachable_configurations())
def test_can_tau_agrees_with_enumeration(x):
    enumerated = any(isinstance(t.label.action, Tau)
                     for t in forward_steps(x, EMPTY_ENV, KeyAllocator()))
    assert can_tau(x, EMPTY_ENV) == enumerated
