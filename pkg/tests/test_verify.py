import json

import pytest

from rtpl.parser import parse_configuration, parse_program
from rtpl.printer import print_term
from rtpl.semantics import (
    Dir, EngineConfig, KeyAllocator, backward_steps, canon_state,
    forward_steps, forward_with_label,
)
from rtpl.terms import EMPTY_ENV, Name, SIGMA, action_from_text
from rtpl.trace import replay_trace, trace_json
from rtpl.verify import (
    Bounds, ParabolicFailure, Path, check_bti, check_causal_equivalence,
    check_commute, check_loop, check_square, check_synch_oracle,
    check_time_total_order, check_wf, cofinal_pairs, enumerate_paths, explore,
    fold_path, is_parabolic, parabolic_normalize, random_paths,
)


def space_of(src, depth=5, ghosts=True):
    env, p = parse_program(src)
    return explore(p, env, Bounds(depth=depth),
                   EngineConfig(ghosts=ghosts)), env, p


def test_explore_nil_depth_one():
    space, _, _ = space_of("0", depth=1)
    assert {print_term(s) for s in space.states} == {"0", "s_[0].0"}
    assert space.truncated  # ghost chains keep growing


def test_explore_dedups_by_canonical_keys():
    space, env, p = space_of("a.0 | b.0", depth=2)
    # a[i] then b[j] and b[j'] then a[i'] meet in one canonical state
    two_key_states = [s for s in space.states
                      if print_term(s) == "a[0].0 | b[1].0"]
    assert len(two_key_states) == 1


def test_metatheory_checks_clean_on_small_seeds():
    for src in ("a.0 + s.0", "[a.0](b.0) | 'a.0", "(a.b.0 + b.a.0) \\ b"):
        space, _, _ = space_of(src, depth=4)
        for check in (check_loop, check_square, check_bti, check_wf,
                      check_time_total_order, check_synch_oracle):
            rep = check(space)
            assert rep.ok, (src, rep.check, rep.violations[:2])


def test_report_json_shape():
    space, _, _ = space_of("a.0", depth=2)
    data = check_loop(space).to_json()
    assert set(data) == {"check", "states", "edges", "violations",
                         "truncated", "seed", "inconclusive"}
    json.dumps(data)


def test_single_state_vacuous():
    env, p = parse_program("0")
    space = explore(p, env, Bounds(depth=0))
    assert len(space.states) == 1
    assert check_loop(space).ok and check_bti(space).ok


def test_every_state_is_forward_reachable():
    # corollary of the Parabolic Lemma: backward edges add no new states,
    # and a forward-only path of the same length suffices
    for src in ("a.0 + s.0", "[a.0](b.0) | 'a.0", "A = a.s.A; A | 'a.0"):
        env, p = parse_program(src)
        mixed = explore(p, env, Bounds(depth=4))
        fwd_only = explore(p, env, Bounds(depth=4), forward_only=True)
        assert set(mixed.states) <= set(fwd_only.states)
        for state, info in mixed.states.items():
            assert fwd_only.states[state].depth <= info.depth


# -- mutation build -------------------------------------------------------------

def test_mutant_loop_failure_on_ghost_example():
    space, env, p = space_of("s.a.0 | b.s.0", depth=4, ghosts=False)
    rep = check_loop(space)
    assert not rep.ok
    assert any(v["what"] == "forward edge without backward mirror"
               for v in rep.violations)


def test_mutant_time_order_failure_matches_example():
    mut = EngineConfig(ghosts=False)
    env, p = parse_program("s.a.0 | b.s.0")
    x = p
    for (act, key) in ((SIGMA, 0), (Name("b"), 1), (SIGMA, 2)):
        x = forward_with_label(x, env, act, key, mut)[0].target
    assert print_term(x) == "s[0].a.0 | b[1].s[2].0"
    space, _, _ = space_of("s.a.0 | b.s.0", depth=4, ghosts=False)
    rep = check_time_total_order(space)
    assert canon_state(x, env) in {
        parse_configuration(v["state"], env) for v in rep.violations}


def test_ghost_build_is_clean_where_mutant_fails():
    space, _, _ = space_of("s.a.0 | b.s.0", depth=4)
    assert check_loop(space).ok
    assert check_time_total_order(space).ok


def test_commute_check_flags_fired_timeouts():
    space, _, _ = space_of("s.'p.0 | [p.a.0](b.0)", depth=3)
    rep = check_commute(space)
    assert not rep.ok  # the documented counterexample window


# -- paths and the parabolic lemma ------------------------------------------------

def walk(src, script):
    env, p = parse_program(src)
    at = p
    steps = []
    for tok in script.split(";"):
        tok = tok.strip()
        back = tok.startswith("~")
        if back:
            tok = tok[1:]
        act_text, num = tok[:-1].split("[")
        act, key = action_from_text(act_text), int(num)
        if back:
            cands = [t for t in backward_steps(at, env)
                     if t.label.action == act and t.label.key.id == key]
        else:
            cands = forward_with_label(at, env, act, key)
        at = cands[0].target
        steps.append(cands[0])
    return Path(p, tuple(steps)), env


def test_parabolic_empty_path():
    env, p = parse_program("a.0")
    out = parabolic_normalize(Path(p, ()), env)
    assert out.steps == ()


def test_parabolic_cancels_do_undo():
    path, env = walk("a.0", "a[0];~a[0]")
    out = parabolic_normalize(path, env)
    assert out.steps == ()


def test_parabolic_orders_ghost_run():
    # the ghost-corrected run of the motivating example, plus a late undo
    path, env = walk("s.a.0 | b.s.0", "s[0];b[1];s[2];~s[2]")
    out = parabolic_normalize(path, env)
    assert is_parabolic(out)
    assert len(out) <= len(path)
    assert out.source == path.source and out.target == path.target


def test_parabolic_rejects_only_sigma_undo_first():
    path, env = walk("s.a.0 | b.s.0", "s[0];b[1];s[2]")
    y = path.target
    assert print_term(y) == "s[0].s_[2].a.0 | s_[0].b[1].s[2].0"
    bks = backward_steps(y, env)
    assert [(b.label.key.id) for b in bks] == [2]


def test_random_paths_normalize():
    for src in ("a.0 | b.0", "a.0 + s.0", "[a.0](b.0)"):
        env, p = parse_program(src)
        for path in random_paths(p, env, count=40, length=8, seed=11):
            out = parabolic_normalize(path, env)
            assert is_parabolic(out) and len(out) <= len(path)
            assert out.source == path.source and out.target == path.target


# -- causal equivalence ------------------------------------------------------------

def test_cc_identical_paths():
    path, env = walk("a.0", "a[0]")
    res = check_causal_equivalence(path, path, env)
    assert res.equivalent and not res.inconclusive


def test_cc_two_interleavings():
    a_first, env = walk("a.0 | b.0", "a[0];b[1]")
    b_first, _ = walk("a.0 | b.0", "b[1];a[0]")
    res = check_causal_equivalence(a_first, b_first, env)
    assert res.equivalent


def test_cc_cancellation():
    chi, env = walk("a.b.0", "a[0];~a[0];a[0]")
    omega, _ = walk("a.b.0", "a[0]")
    res = check_causal_equivalence(chi, omega, env)
    assert res.equivalent


def test_cc_requires_cofinal():
    chi, env = walk("a.0 | b.0", "a[0]")
    omega, _ = walk("a.0 | b.0", "b[1]")
    with pytest.raises(ValueError):
        check_causal_equivalence(chi, omega, env)


def test_cofinal_pairs_join_up_to_key_bijection():
    env, p = parse_program("a.0 | b.0")
    paths = enumerate_paths(p, env, 2)
    pairs = cofinal_pairs(paths, env)
    assert pairs
    for (x, y) in pairs:
        assert x.source == y.source and x.target == y.target
        res = check_causal_equivalence(x, y, env)
        assert res.equivalent and not res.inconclusive


# -- traces ------------------------------------------------------------------------

def test_trace_roundtrip():
    path, env = walk("a.0 + s.0", "a[0];s[1];~s[1]")
    data = trace_json("a.0 + s.0", env, list(path.steps))
    env2, final = replay_trace(data)
    assert final == path.target
