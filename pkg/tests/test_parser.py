import pytest
from hypothesis import given, settings

from conftest import processes, reachable_configurations
from rtpl.parser import (
    RtplSyntaxError, parse_configuration, parse_program, validate_configuration,
)
from rtpl.printer import print_term
from rtpl.terms import (
    Const, EMPTY_ENV, KeyedPrefix, Name, Nil, Par, Prefix, RpAct, RpGhost,
    Restrict, SIGMA, Sum, Timeout, TimeoutR, UnboundConstantError,
    UnguardedRecursionError, ValidationError,
)


def test_parse_nil():
    env, p = parse_program("0")
    assert p == Nil()
    assert not env.order


def test_parse_choice_with_delay():
    _, p = parse_program("a.0 + s.0")
    assert p == Sum(Prefix(Name("a"), Nil()), Prefix(SIGMA, Nil()))


def test_parse_definitions_and_timeout():
    env, p = parse_program("A = a.A; [b.0](0)")
    assert env.defs["A"] == Prefix(Name("a"), Const("A"))
    assert p == Timeout(Prefix(Name("b"), Nil()), Nil())
    assert print_term(p) == "[b.0](0)"


def test_parse_keyed_prefix():
    x = parse_configuration("a[1].0", EMPTY_ENV)
    assert x == KeyedPrefix(RpAct(Name("a")), 1, Nil())


def test_parse_ghost_prefix():
    x = parse_configuration("s_[2].a.0", EMPTY_ENV)
    assert x == KeyedPrefix(RpGhost(), 2, Prefix(Name("a"), Nil()))


def test_parse_decorated_timeout():
    x = parse_configuration("[a.0](0)@R[5]", EMPTY_ENV)
    assert x == TimeoutR(Prefix(Name("a"), Nil()), Nil(), 5)


def test_print_examples():
    assert print_term(Nil()) == "0"
    assert print_term(KeyedPrefix(RpAct(Name("a")), 1, Nil())) == "a[1].0"
    x = parse_configuration("[b[7].0](0)@L[7]", EMPTY_ENV)
    assert print_term(x) == "[b[7].0](0)@L[7]"


def test_precedence():
    _, p = parse_program("a.b.0 + c.0 | d.0")
    assert isinstance(p, Par)
    assert isinstance(p.left, Sum)
    _, q = parse_program("a.0 \\ x + b.0")
    assert isinstance(q, Sum)
    assert isinstance(q.left, Restrict)
    _, r = parse_program("a.(b.0 + c.0)")
    assert isinstance(r, Prefix)
    assert isinstance(r.cont, Sum)


def test_syntax_error_position():
    with pytest.raises(RtplSyntaxError) as exc:
        parse_program("a.0 +\n+ b.0")
    assert exc.value.line == 2
    assert exc.value.col == 1


def test_keys_rejected_in_programs():
    with pytest.raises(RtplSyntaxError):
        parse_program("a[1].0")


def test_unbound_constant():
    with pytest.raises(UnboundConstantError):
        parse_program("A = a.B; A")


def test_unguarded_recursion():
    with pytest.raises(UnguardedRecursionError):
        parse_program("A = A + a.0; A")
    with pytest.raises(UnguardedRecursionError):
        parse_program("A = [A](b.0); A")  # timeout main is not a guard
    # alt branch of a timeout counts as guarded, as does any prefix
    parse_program("A = [b.0](A); A")
    parse_program("A = a.[b.A](c.A); A")


def test_tau_and_sigma_reserved():
    with pytest.raises(RtplSyntaxError):
        parse_program("a.0 \\ tau")


def test_configuration_validation():
    with pytest.raises(ValidationError):
        parse_configuration("a.b[1].0", EMPTY_ENV)  # keyed under a pending prefix
    with pytest.raises(ValidationError):
        parse_configuration("[a[1].0](b.0)", EMPTY_ENV)  # undecorated timeout
    with pytest.raises(ValidationError):
        parse_configuration("a[1].b[1].0", EMPTY_ENV)  # repeated key in sequence
    with pytest.raises(ValidationError):
        parse_configuration("a[1].0 | s_[1].0", EMPTY_ENV)  # kind clash


@given(processes())
def test_roundtrip_processes(p):
    env, q = parse_program(print_term(p))
    assert q == p


@settings(max_examples=60, deadline=None)
@given(reachable_configurations())
def test_roundtrip_reachable_configurations(x):
    validate_configuration(x)
    assert parse_configuration(print_term(x), EMPTY_ENV) == x
