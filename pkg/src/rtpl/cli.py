"""Command-line front end.

Exit codes: 0 clean, 1 violation found, 2 usage or parse error,
3 inconclusive (a budget was exhausted before a verdict).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path as FsPath

from . import paper_examples
from .analysis import conflicting
from .corpus import SEEDS
from .parser import RtplSyntaxError, parse_configuration, parse_program
from .printer import print_program, print_term
from .reference import (
    Verdict, check_bf_simulation, check_timed_bisimulation, forget_history,
    forget_time,
)
from .semantics import (
    DEFAULT_CONFIG, Dir, EngineConfig, KeyAllocator, backward_steps,
    backward_with_label, forward_steps, forward_with_label,
)
from .terms import RtplError, Term, action_from_text, action_text, max_key
from .trace import trace_json
from . import verify
from .verify import Bounds, Report, explore

OK, VIOLATION, USAGE, INCONCLUSIVE = 0, 1, 2, 3

SUITES = ("loop", "square", "bti", "wf", "pl", "cc", "bisim", "sim", "order",
          "synch", "embed", "commute", "all")
ALL_SUITES = ("loop", "square", "bti", "wf", "order", "synch", "embed",
              "pl", "cc", "bisim", "sim")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="rtpl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_parse = sub.add_parser("parse", help="parse a program and print it canonically")
    p_parse.add_argument("file")
    p_parse.add_argument("--config", help="also parse this configuration text")

    p_steps = sub.add_parser("steps", help="enumerate transitions of a configuration")
    p_steps.add_argument("file")
    p_steps.add_argument("--config", help="configuration text (default: the main term)")
    p_steps.add_argument("--dir", choices=("fwd", "bk", "both"), default="both")

    p_run = sub.add_parser("run", help="apply a ;-separated step script")
    p_run.add_argument("file")
    p_run.add_argument("--script", required=True,
                       help="e.g. \"a[1];s[2];~s[2]\" (~ undoes)")
    p_run.add_argument("--trace", help="write the trace JSON to this file")

    p_check = sub.add_parser("check", help="run property suites over seed programs")
    p_check.add_argument("target", nargs="?",
                         help="an .rtpl file or a directory of them (default: built-in corpus)")
    p_check.add_argument("--suite", default="all", choices=SUITES)
    p_check.add_argument("--depth", type=int, default=6)
    p_check.add_argument("--seed", type=int,
                         default=int(os.environ.get("RTPL_SEED", "0")))
    p_check.add_argument("--no-ghosts", action="store_true",
                         help="mutation build: patient steps record nothing")
    p_check.add_argument("--out", help="write the JSON report here")

    sub.add_parser("examples", help="run the built-in worked-example regressions")

    p_serve = sub.add_parser("serve", help="start the interactive session service")
    p_serve.add_argument("--port", type=int, default=7411)
    p_serve.add_argument("--host", default="127.0.0.1")

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except RtplSyntaxError as e:
        print(f"syntax error: {e}", file=sys.stderr)
        return USAGE
    except RtplError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE


def _dispatch(args) -> int:
    if args.command == "parse":
        return cmd_parse(args)
    if args.command == "steps":
        return cmd_steps(args)
    if args.command == "run":
        return cmd_run(args)
    if args.command == "check":
        return cmd_check(args)
    if args.command == "examples":
        return cmd_examples(args)
    if args.command == "serve":
        return cmd_serve(args)
    return USAGE


def _load(path: str) -> tuple:
    text = FsPath(path).read_text()
    env, main = parse_program(text)
    return text, env, main


def cmd_parse(args) -> int:
    _, env, main = _load(args.file)
    print(print_program(env.defs, env.order, main))
    if args.config:
        print(print_term(parse_configuration(args.config, env)))
    return OK


def _current(args, env, main) -> Term:
    if getattr(args, "config", None):
        return parse_configuration(args.config, env)
    return main


def cmd_steps(args) -> int:
    _, env, main = _load(args.file)
    x = _current(args, env, main)
    ts = []
    if args.dir in ("fwd", "both"):
        ts += forward_steps(x, env, KeyAllocator(max_key(x) + 1))
    if args.dir in ("bk", "both"):
        ts += backward_steps(x, env)
    for i, t in enumerate(ts):
        mark = "" if t.direction is Dir.FWD else "~"
        print(f"[{i}] {mark}{action_text(t.label.action)}[{t.label.key.id}]"
              f"  ({t.rule})  ->  {print_term(t.target)}")
    if len(ts) > 1:
        print("conflict matrix (C = conflict, . = independent):")
        for i, a in enumerate(ts):
            row = "".join("C" if i != j and conflicting(a, b) else
                          ("-" if i == j else ".")
                          for j, b in enumerate(ts))
            print(f"  [{i}] {row}")
    return OK


def _parse_script(text: str) -> list[tuple[Dir, str, int | None]]:
    steps = []
    for raw in text.split(";"):
        tok = raw.strip()
        if not tok:
            continue
        direction = Dir.FWD
        if tok.startswith("~"):
            direction = Dir.BK
            tok = tok[1:].strip()
        key = None
        if "[" in tok:
            if not tok.endswith("]"):
                raise RtplError(f"malformed script step {raw!r}")
            tok, num = tok[:-1].split("[", 1)
            key = int(num)
        steps.append((direction, tok, key))
    return steps


def apply_script(x: Term, env, script: list[tuple[Dir, str, int | None]],
                 config: EngineConfig = DEFAULT_CONFIG):
    """Apply script steps; a bare action must be unambiguous."""
    alloc = KeyAllocator(max_key(x) + 1)
    taken = []
    for (direction, act_text_, key) in script:
        act = action_from_text(act_text_)
        if direction is Dir.FWD:
            cands = (forward_with_label(x, env, act, key, config) if key is not None
                     else [t for t in forward_steps(x, env, KeyAllocator(alloc.next), config)
                           if t.label.action == act])
        else:
            if key is not None:
                cands = backward_with_label(x, env, act, key, config)
            else:
                cands = [t for t in backward_steps(x, env, config)
                         if t.label.action == act]
        if not cands:
            raise RtplError(f"no enabled step {act_text_}"
                            f"{'' if key is None else f'[{key}]'} from {print_term(x)}")
        if len(cands) > 1:
            raise RtplError(f"ambiguous step {act_text_} from {print_term(x)}: "
                            + ", ".join(print_term(t.target) for t in cands))
        t = cands[0]
        alloc.note(t.label.key.id)
        taken.append(t)
        x = t.target
    return x, taken


def cmd_run(args) -> int:
    text, env, main = _load(args.file)
    x, taken = apply_script(main, env, _parse_script(args.script))
    print(print_term(x))
    data = trace_json(text, env, taken)
    if args.trace:
        FsPath(args.trace).write_text(json.dumps(data, indent=2))
    else:
        print(json.dumps(data))
    return OK


def _targets(args) -> dict[str, str]:
    if not args.target:
        return dict(SEEDS)
    path = FsPath(args.target)
    if path.is_dir():
        return {f.stem: f.read_text() for f in sorted(path.glob("*.rtpl"))}
    return {path.stem: path.read_text()}


def cmd_check(args) -> int:
    config = EngineConfig(ghosts=not args.no_ghosts)
    bounds = Bounds(depth=args.depth)
    suites = ALL_SUITES if args.suite == "all" else (args.suite,)
    print(f"check: suite={args.suite} depth={args.depth} seed={args.seed}"
          f"{' (no ghosts)' if args.no_ghosts else ''}")
    reports: list[dict] = []
    rc = OK
    for name, src in _targets(args).items():
        env, p = parse_program(src)
        space = None
        for suite in suites:
            rep = _run_suite(suite, name, p, env, space, bounds, config, args.seed)
            if rep is None:
                continue
            rep_json, space = rep
            reports.append(rep_json)
            status = "ok" if not rep_json["violations"] else "VIOLATION"
            if rep_json["inconclusive"]:
                status = "inconclusive"
                rc = max(rc, INCONCLUSIVE)
            if rep_json["violations"]:
                rc = VIOLATION
            print(f"{name:18s} {suite:8s} states={rep_json['states']:5d} "
                  f"violations={len(rep_json['violations'])} {status}")
    if args.out:
        FsPath(args.out).write_text(json.dumps(
            {"seed": args.seed, "reports": reports}, indent=2))
    return rc


_SPACE_SUITES = {"loop", "square", "bti", "wf", "order", "synch", "embed", "commute"}


def _run_suite(suite: str, name: str, p: Term, env, space, bounds: Bounds,
               config: EngineConfig, seed: int):
    if space is None and suite in _SPACE_SUITES:
        space = explore(p, env, bounds, config)
    if suite == "loop":
        rep = verify.check_loop(space)
    elif suite == "square":
        rep = verify.check_square(space)
    elif suite == "bti":
        rep = verify.check_bti(space)
    elif suite == "wf":
        rep = verify.check_wf(space)
    elif suite == "order":
        rep = verify.check_time_total_order(space)
    elif suite == "synch":
        rep = verify.check_synch_oracle(space)
    elif suite == "embed":
        rep = verify.check_embeddings(space)
    elif suite == "commute":
        rep = verify.check_commute(space)
    elif suite == "pl":
        rep = _pl_report(name, p, env, config, seed)
    elif suite == "cc":
        rep = _cc_report(name, p, env, config)
    elif suite == "bisim":
        rep = _bisim_report(name, p, env, config)
    elif suite == "sim":
        rep = _sim_report(name, p, env, config)
    else:
        raise RtplError(f"unknown suite {suite!r}")
    rep.seed = seed
    return rep.to_json(), space


def _pl_report(name: str, p: Term, env, config, seed: int,
               count: int = 1000, length: int = 10) -> Report:
    rep = Report("pl", 0, 0, seed=seed)
    paths = verify.random_paths(p, env, count=count, length=length,
                                seed=seed, config=config)
    for path in paths:
        try:
            norm = verify.parabolic_normalize(path, env, config)
        except verify.ParabolicFailure as e:
            rep.violations.append({"path": list(path.labels()), "what": str(e)})
            continue
        if not verify.is_parabolic(norm) or len(norm) > len(path) or \
                norm.source != path.source or norm.target != path.target:
            rep.violations.append({"path": list(path.labels()),
                                   "what": "normal form invalid"})
    rep.states = len(paths)
    return rep


def _cc_report(name: str, p: Term, env, config, length: int = 5) -> Report:
    return verify.check_cc_space(p, env, length, config=config)


def _bisim_report(name: str, p: Term, env, config, depth: int = 5) -> Report:
    rep = Report("bisim", 1, 0)
    out = check_timed_bisimulation(p, forget_history(p), env, depth=depth,
                                   config=config)
    if out.verdict is Verdict.COUNTEREXAMPLE:
        rep.violations.append({"root": name, "path": list(out.path)})
    elif out.verdict is Verdict.BUDGET_EXHAUSTED:
        rep.inconclusive += 1
    rep.edges = out.pairs
    return rep


def _sim_report(name: str, p: Term, env, config, depth: int = 5) -> Report:
    rep = Report("sim", 1, 0)
    out = check_bf_simulation(p, forget_time(p), env, depth=depth,
                              config=config)
    if out.verdict is Verdict.COUNTEREXAMPLE:
        rep.violations.append({"root": name, "path": list(out.path)})
    elif out.verdict is Verdict.BUDGET_EXHAUSTED:
        rep.inconclusive += 1
    rep.edges = out.pairs
    return rep


def cmd_examples(args) -> int:
    results = paper_examples.run_all()
    rc = OK
    for (name, ok, detail) in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name:20s} {detail}")
        if not ok:
            rc = VIOLATION
    return rc


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return OK


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
