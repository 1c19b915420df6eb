import pytest

from rtpl.analysis import (
    FccShapeError, NotCoinitialError, conflicting, fcc, independent,
    is_not_acted, is_standard, key_order, keys_of,
)
from rtpl.parser import parse_configuration, parse_program
from rtpl.semantics import KeyAllocator, backward_steps, forward_steps
from rtpl.terms import EMPTY_ENV, Kind


def conf(src):
    return parse_configuration(src, EMPTY_ENV)


def ids(x):
    return {k.id for k in keys_of(x)}


def test_keys_of():
    assert keys_of(parse_program("a.[b.0](c.0) + s.0")[1]) == frozenset()
    assert ids(conf("a[1].s_[2].0")) == {1, 2}
    assert ids(conf("[a.0](b[2].0)@R[1]")) == {1, 2}


def test_key_kinds():
    kinds = {k.id: k.kind for k in keys_of(conf("a[1].s_[2].s[3].0 | [c.0](d.0)@R[4]"))}
    assert kinds == {1: Kind.COMM, 2: Kind.TIME, 3: Kind.TIME, 4: Kind.TIME}


def test_std_and_nact():
    x = conf("s[1].0")
    assert not is_standard(x) and is_not_acted(x)
    y = conf("a[1].0 + b.0")
    assert not is_not_acted(y)
    z = conf("0")
    assert is_standard(z) and is_not_acted(z)


def test_key_order_standard_is_empty():
    order = key_order(parse_program("a.0 | [b.0](c.0)")[1])
    assert not order.pairs and not order.keys


def test_key_order_accumulates_through_prefixes():
    order = key_order(conf("a[0].b[1].s_[2].0"))
    assert order.pairs == frozenset({(0, 1), (0, 2), (1, 2)})
    assert order.le(0, 2) and not order.le(2, 0)


def test_fcc_reflexive_is_false():
    p = conf("a[1].0")
    assert fcc(p, p) is False


def test_fcc_same_prefix_two_keys():
    assert fcc(conf("a[0].b[1].0"), conf("a[0].b[2].0")) is True


def test_fcc_choice_branches():
    assert fcc(conf("a[1].0 + b.0"), conf("a.0 + b[2].0")) is True


def test_fcc_disjoint_parallel_redexes():
    assert fcc(conf("a[1].0 | b.0"), conf("a.0 | b[2].0")) is False


def test_fcc_alien_shapes_error():
    # same key sets but shapes that cannot share a source
    with pytest.raises(FccShapeError):
        fcc(conf("a[1].0"), conf("b[1].0"))


def _steps(src, env=None):
    if env is None:
        env, x = parse_program(src)
    else:
        x = parse_configuration(src, env)
    return (forward_steps(x, env, KeyAllocator(10)) + backward_steps(x, env))


def test_conflict_sigma_vs_action():
    ts = _steps("[b.0](0)")
    sigma = next(x for x in ts if x.rule == "STout")
    act = next(x for x in ts if x.rule == "Tout")
    assert conflicting(sigma, act) and conflicting(act, sigma)


def test_conflict_prefix_vs_synchronisation():
    ts = _steps("a.0 | 'a.0")
    lone = next(t for t in ts if t.rule == "Par")
    syn = next(t for t in ts if t.rule == "Syn")
    assert conflicting(lone, syn)


def test_conflict_forward_after_backward_cause():
    ts = _steps("a[0].b.0", EMPTY_ENV)
    fwd = next(t for t in ts if t.direction.value == "fwd"
               and t.label.action.__class__.__name__ == "Name")
    bk = next(t for t in ts if t.direction.value == "bk")
    assert conflicting(fwd, bk)
    assert conflicting(bk, fwd)


def test_independent_parallel_actions():
    ts = _steps("a.0 | b.0")
    fwd = [t for t in ts if t.direction.value == "fwd"
           and t.label.action.__class__.__name__ == "Name"]
    assert len(fwd) == 2
    assert independent(fwd[0], fwd[1])


def test_conflict_requires_coinitial():
    ts1 = _steps("a.0")
    ts2 = _steps("b.0")
    with pytest.raises(NotCoinitialError):
        conflicting(ts1[0], ts2[0])
