#!/usr/bin/env python3
"""Randomized metatheory fuzz: generate many random processes (every other
one with guarded recursive definitions), explore each to a shallow depth,
and run every space-level check plus parabolic normalization on random
walks. A stricter net than the fixed corpus.

Usage: python scripts/fuzz_metatheory.py [--count N] [--seed S] [--depth D]
"""

import argparse
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from rtpl.printer import print_term  # noqa: E402
from rtpl.terms import (  # noqa: E402
    Const, CoName, DefinitionEnv, EMPTY_ENV, Name, Nil, Par, Prefix,
    Restrict, SIGMA, Sum, TAU, Timeout, UnguardedRecursionError,
)
from rtpl.verify import (  # noqa: E402
    Bounds, check_bti, check_embeddings, check_loop, check_square,
    check_synch_oracle, check_time_total_order, check_wf, explore,
    is_parabolic, parabolic_normalize, random_paths,
)

NAMES = ("a", "b", "c")
CONSTS = ("A", "B")


def random_process(rng: random.Random, size: int, consts=(), guarded=False):
    if size <= 1:
        leaves = [Nil(), Prefix(random_act(rng), Nil())]
        if consts and guarded:
            leaves.append(Const(rng.choice(consts)))
        return rng.choice(leaves)
    shape = rng.randrange(6)
    if shape == 0:
        return Prefix(random_act(rng), random_process(rng, size - 1, consts, True))
    left = random_process(rng, size // 2, consts, guarded)
    right = random_process(rng, size - size // 2, consts, guarded)
    if shape == 1:
        # a timeout guards its alternative branch only
        return Timeout(random_process(rng, size // 2, consts, guarded),
                       random_process(rng, size - size // 2, consts, True))
    if shape == 2:
        return Sum(left, right)
    if shape in (3, 4):
        return Par(left, right)
    return Restrict(random_process(rng, size - 1, consts, guarded),
                    rng.choice(NAMES))


def random_env(rng: random.Random):
    for _ in range(10):
        try:
            defs = {c: random_process(rng, rng.randrange(2, 6), CONSTS, False)
                    for c in CONSTS}
            return DefinitionEnv.make(defs, CONSTS)
        except UnguardedRecursionError:
            continue
    return EMPTY_ENV


def random_act(rng: random.Random):
    kind = rng.randrange(8)
    if kind < 3:
        return Name(rng.choice(NAMES))
    if kind < 6:
        return CoName(rng.choice(NAMES))
    if kind < 7:
        return SIGMA
    return TAU


CHECKS = (check_loop, check_square, check_bti, check_wf,
          check_time_total_order, check_synch_oracle, check_embeddings)


def dead_urgent_branch(x, env) -> bool:
    """An acted sum whose discarded branch can still synchronise internally.

    Such configurations are time deadlocks (ChoW needs the dead branch to
    tick, maximal progress forbids it) while their history image is patient,
    which falsifies the converse of the TPL embedding; this is a property of
    the calculus, not an engine bug, so the fuzz classifies it separately.
    """
    from rtpl.analysis import is_not_acted
    from rtpl.semantics import can_tau
    from rtpl.terms import subterms

    for s in subterms(x):
        if isinstance(s, Sum):
            if not is_not_acted(s.left) and can_tau(s.right, env):
                return True
            if not is_not_acted(s.right) and can_tau(s.left, env):
                return True
    return False


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=150)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--depth", type=int, default=4)
    ap.add_argument("--size", type=int, default=7)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    bad = 0
    known_gap = 0
    states = 0
    for i in range(args.count):
        env = random_env(rng) if i % 2 else EMPTY_ENV
        p = random_process(rng, args.size, env.order, guarded=True)
        space = explore(p, env, Bounds(depth=args.depth))
        states += len(space.states)
        for check in CHECKS:
            try:
                rep = check(space)
            except Exception as e:
                # phi_t images without a finite-control CCSK form are a
                # documented representation limit, not an engine failure
                if "CCSK reference cannot represent" in str(e):
                    continue
                raise
            if not rep.ok:
                from rtpl.parser import parse_configuration
                gap = all(
                    v["what"] == "TPL move unmatched by the configuration"
                    and dead_urgent_branch(parse_configuration(v["state"], env), env)
                    for v in rep.violations)
                if gap:
                    known_gap += len(rep.violations)
                    continue
                bad += 1
                print(f"[{i}] {print_term(p)} FAILS {rep.check}: "
                      f"{rep.violations[0]}")
        for path in random_paths(p, env, count=20, length=8,
                                 seed=args.seed + i):
            try:
                norm = parabolic_normalize(path, env)
                assert is_parabolic(norm) and len(norm) <= len(path)
                assert norm.source == path.source and norm.target == path.target
            except Exception as e:
                bad += 1
                print(f"[{i}] {print_term(p)} PL failure on "
                      f"{path.labels()}: {e}")
    print(f"{args.count} random processes, {states} states explored, "
          f"{bad} engine failures, {known_gap} dead-urgent-branch instances "
          "(known calculus-level gap, see notes)")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
