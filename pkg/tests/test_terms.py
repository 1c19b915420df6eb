import pytest

from rtpl.parser import parse_program
from rtpl.printer import print_term
from rtpl.terms import (
    Const, DefinitionEnv, Name, Prefix, UnboundConstantError, fold_constants,
)
from rtpl.verify import Bounds, check_loop, explore


def test_fold_constants_is_idempotent_and_refolds_bodies():
    env, p = parse_program("A = a.A; a.A")
    folded = fold_constants(p, env)
    assert folded == Const("A")
    assert fold_constants(folded, env) == folded


def test_fold_handles_bodies_written_expanded():
    # C's body contains A's body spelled out; both normalize consistently
    env, p = parse_program("A = a.0; C = b.a.0; C")
    assert print_term(env.lookup("C")) == "b.A"
    q = parse_program("A = a.0; C = b.a.0; b.a.0")[1]
    env2, _ = parse_program("A = a.0; C = b.a.0; C")
    assert fold_constants(q, env2) == Const("C")


def test_duplicate_bodies_alias_to_first_declaration():
    env, p = parse_program("A = 0 \\ a; B = 0 \\ a; a.B | a.s.B")
    assert env.alias["B"] == "A"
    assert print_term(fold_constants(p, env)) == "a.A | a.s.A"
    # aliasing is what keeps undo targets equal to their sources
    space = explore(p, env, Bounds(depth=4))
    assert check_loop(space).ok


def test_mutually_recursive_duplicates():
    env, p = parse_program("A = a.B; B = a.B; B | A")
    assert env.alias == {"A": "A", "B": "A"}
    assert print_term(fold_constants(p, env)) == "A | A"
    assert check_loop(explore(p, env, Bounds(depth=4))).ok


def test_unbound_constant_in_body():
    with pytest.raises(UnboundConstantError):
        DefinitionEnv.make({"A": Prefix(Name("a"), Const("Z"))})
