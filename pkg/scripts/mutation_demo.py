#!/usr/bin/env python3
"""Reproduce the ghost-prefix counterexample: with patient time steps left
unrecorded, the Loop Lemma and the total order on time keys both fail on
`s.a.0 | b.s.0`, while the shipped semantics is clean on the same space.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from rtpl.parser import parse_program  # noqa: E402
from rtpl.printer import print_term  # noqa: E402
from rtpl.semantics import EngineConfig, forward_with_label  # noqa: E402
from rtpl.terms import Name, SIGMA  # noqa: E402
from rtpl.verify import Bounds, check_loop, check_time_total_order, explore  # noqa: E402


def main() -> int:
    env, p = parse_program("s.a.0 | b.s.0")
    for ghosts, label in ((False, "mutant (no ghost prefixes)"),
                          (True, "shipped semantics")):
        cfg = EngineConfig(ghosts=ghosts)
        space = explore(p, env, Bounds(depth=4), cfg)
        loop = check_loop(space)
        order = check_time_total_order(space)
        print(f"== {label}: {len(space.states)} states")
        print(f"   loop violations:  {len(loop.violations)}")
        print(f"   order violations: {len(order.violations)}")
        for v in (loop.violations + order.violations)[:3]:
            print(f"     e.g. {v}")
        if not ghosts:
            x = p
            for (act, key) in ((SIGMA, 0), (Name("b"), 1), (SIGMA, 2)):
                x = forward_with_label(x, env, act, key, cfg)[0].target
            print(f"   run sigma;b;sigma reaches {print_term(x)} "
                  "(the first and last time steps are incomparable)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
