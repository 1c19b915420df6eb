"""Reference engines for TPL and CCSK, the two forgetful maps, and the
behavioural checkers relating rTPL to its images.

The TPL engine is forward-only and history-free; the CCSK engine is the
untimed reversible core. Both are independent rule implementations used as
oracles against the rTPL engine. Figure slips in the background appendix
(vestigial ``+ Q`` in the CCS/TPL sum conclusions, mirrored labels in the
CCSK backward figure) are resolved to the standard rules, which the
embedding propositions' own proofs rely on.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass

from .analysis import is_not_acted, is_standard, key_ids
from .semantics import (
    Dir, EngineConfig, DEFAULT_CONFIG, KeyAllocator, Label, PLACEHOLDER,
    Transition, canon_state, canonicalize_keys, forward_steps, backward_steps,
)
from .terms import (
    Action, CoName, Const, DefinitionEnv, Key, KeyedPrefix, Kind, Name, Nil,
    Par, Prefix, Restrict, RpAct, SIGMA, Sigma, Sum, TAU, Tau, Term, Timeout,
    TimeoutL, TimeoutR, UnfoldBudgetExceeded, ValidationError, complement,
    fold_constants, max_key, rename_keys, subterms,
)


# ---------------------------------------------------------------------------
# Syntactic sub-calculi

def validate_tpl(p: Term) -> None:
    if not is_standard(p):
        raise ValidationError("a TPL process must be standard")


def validate_ccsk(x: Term) -> None:
    """CCSK configurations: no time constructs, no time history."""
    for s in subterms(x):
        match s:
            case Prefix(act, _) if isinstance(act, Sigma):
                raise ValidationError("sigma prefixes are not CCSK")
            case KeyedPrefix(rp, _, _) if not isinstance(rp, RpAct):
                raise ValidationError("time history is not CCSK")
            case Timeout(_, _) | TimeoutL(_, _, _) | TimeoutR(_, _, _):
                raise ValidationError("timeouts are not CCSK")
            case _:
                pass


# ---------------------------------------------------------------------------
# TPL engine (Appendix A.3)

def tpl_comm_steps(p: Term, env: DefinitionEnv, budget: int = 64
                   ) -> list[tuple[Action, Term]]:
    out: list[tuple[Action, Term]] = []
    match p:
        case Prefix(act, cont):
            if not isinstance(act, Sigma):
                out.append((act, cont))
        case Sum(l, r):
            out += [(a, t) for (a, t) in tpl_comm_steps(l, env, budget)]
            out += [(a, t) for (a, t) in tpl_comm_steps(r, env, budget)]
        case Timeout(m, _):
            out += tpl_comm_steps(m, env, budget)  # Then: the timeout is discarded
        case Par(l, r):
            ls = tpl_comm_steps(l, env, budget)
            rs = tpl_comm_steps(r, env, budget)
            out += [(a, Par(t, r)) for (a, t) in ls]
            out += [(a, Par(l, t)) for (a, t) in rs]
            for (a1, t1) in ls:
                co = complement(a1)
                if co is None:
                    continue
                for (a2, t2) in rs:
                    if a2 == co:
                        out.append((TAU, Par(t1, t2)))
        case Restrict(b, n):
            blocked = {Name(n), CoName(n)}
            out += [(a, Restrict(t, n)) for (a, t) in tpl_comm_steps(b, env, budget)
                    if a not in blocked]
        case Const(ident):
            if budget <= 0:
                raise UnfoldBudgetExceeded(ident)
            out += tpl_comm_steps(env.lookup(ident), env, budget - 1)
        case _:
            pass
    return out


def tpl_can_tau(p: Term, env: DefinitionEnv) -> bool:
    return any(isinstance(a, Tau) for (a, _) in tpl_comm_steps(p, env))


def tpl_time_step(p: Term, env: DefinitionEnv, budget: int = 64
                  ) -> Term | None:
    """The unique sigma-successor, or None. Patience covers all prefixes."""
    match p:
        case Nil():
            return p
        case Prefix(act, cont):
            return cont if isinstance(act, Sigma) else p
        case Sum(l, r):
            lt = tpl_time_step(l, env, budget)
            rt = tpl_time_step(r, env, budget)
            return Sum(lt, rt) if lt is not None and rt is not None else None
        case Timeout(m, a):
            return a if not tpl_can_tau(m, env) else None
        case Par(l, r):
            lt = tpl_time_step(l, env, budget)
            rt = tpl_time_step(r, env, budget)
            if lt is None or rt is None or tpl_can_tau(p, env):
                return None
            return Par(lt, rt)
        case Restrict(b, n):
            bt = tpl_time_step(b, env, budget)
            return Restrict(bt, n) if bt is not None else None
        case Const(ident):
            if budget <= 0:
                raise UnfoldBudgetExceeded(ident)
            return tpl_time_step(env.lookup(ident), env, budget - 1)
        case _:
            return None


def tpl_steps(p: Term, env: DefinitionEnv) -> list[tuple[Action, Term]]:
    out = tpl_comm_steps(p, env)
    t = tpl_time_step(p, env)
    if t is not None:
        out.append((SIGMA, t))
    return out


# ---------------------------------------------------------------------------
# CCSK engine (Appendix A.2)

def ccsk_pending_fwd(x: Term, env: DefinitionEnv, budget: int = 64
                     ) -> list[tuple[Action, Term]]:
    """Forward CCSK steps with the fresh key as a placeholder."""
    out: list[tuple[Action, Term]] = []
    match x:
        case Prefix(act, cont):
            out.append((act, KeyedPrefix(RpAct(act), PLACEHOLDER, cont)))
        case KeyedPrefix(rp, k, cont):
            out += [(a, KeyedPrefix(rp, k, t))
                    for (a, t) in ccsk_pending_fwd(cont, env, budget)]
        case Sum(l, r):
            if is_standard(r):
                out += [(a, Sum(t, r)) for (a, t) in ccsk_pending_fwd(l, env, budget)]
            if is_standard(l):
                out += [(a, Sum(l, t)) for (a, t) in ccsk_pending_fwd(r, env, budget)]
        case Par(l, r):
            ls = ccsk_pending_fwd(l, env, budget)
            rs = ccsk_pending_fwd(r, env, budget)
            out += [(a, Par(t, r)) for (a, t) in ls]
            out += [(a, Par(l, t)) for (a, t) in rs]
            for (a1, t1) in ls:
                co = complement(a1)
                if co is None:
                    continue
                for (a2, t2) in rs:
                    if a2 == co:
                        out.append((TAU, Par(t1, t2)))
        case Restrict(b, n):
            blocked = {Name(n), CoName(n)}
            out += [(a, Restrict(t, n)) for (a, t) in ccsk_pending_fwd(b, env, budget)
                    if a not in blocked]
        case Const(ident):
            if budget <= 0:
                raise UnfoldBudgetExceeded(ident)
            out += ccsk_pending_fwd(env.lookup(ident), env, budget - 1)
        case _:
            pass
    return out


def ccsk_steps_fwd(x: Term, env: DefinitionEnv, alloc: KeyAllocator
                   ) -> list[Transition]:
    out = []
    for (a, t) in ccsk_pending_fwd(x, env):
        k = alloc.fresh(x)
        out.append(Transition(Dir.FWD, Label(a, Key(k, Kind.COMM)), x,
                              rename_keys(t, {PLACEHOLDER: k}), "ccsk"))
    return out


def ccsk_fwd_with_key(x: Term, env: DefinitionEnv, action: Action, key: int
                      ) -> list[Term]:
    if key in key_ids(x):
        return []
    return [rename_keys(t, {PLACEHOLDER: key})
            for (a, t) in ccsk_pending_fwd(x, env) if a == action]


def ccsk_steps_bk(x: Term, env: DefinitionEnv) -> list[tuple[Action, int, Term]]:
    out: list[tuple[Action, int, Term]] = []
    match x:
        case KeyedPrefix(RpAct(act), k, cont):
            if is_standard(cont):
                out.append((act, k, Prefix(act, cont)))
            else:
                out += [(a, j, KeyedPrefix(RpAct(act), k, t))
                        for (a, j, t) in ccsk_steps_bk(cont, env) if j != k]
        case Sum(l, r):
            if is_standard(r):
                out += [(a, j, Sum(t, r)) for (a, j, t) in ccsk_steps_bk(l, env)]
            if is_standard(l):
                out += [(a, j, Sum(l, t)) for (a, j, t) in ccsk_steps_bk(r, env)]
        case Par(l, r):
            lbk = ccsk_steps_bk(l, env)
            rbk = ccsk_steps_bk(r, env)
            lk, rk = key_ids(l), key_ids(r)
            out += [(a, j, Par(t, r)) for (a, j, t) in lbk if j not in rk]
            out += [(a, j, Par(l, t)) for (a, j, t) in rbk if j not in lk]
            for (a1, j1, t1) in lbk:
                co = complement(a1)
                if co is None:
                    continue
                for (a2, j2, t2) in rbk:
                    if a2 == co and j1 == j2:
                        out.append((TAU, j1, Par(t1, t2)))
        case Restrict(b, n):
            blocked = {Name(n), CoName(n)}
            out += [(a, j, Restrict(t, n)) for (a, j, t) in ccsk_steps_bk(b, env)
                    if a not in blocked]
        case _:
            pass
    return out


# ---------------------------------------------------------------------------
# Forgetful maps

def forget_history(x: Term) -> Term:
    """phi_h: erase executed prefixes and decorations; keep chosen branches."""
    if is_standard(x):
        return x
    match x:
        case KeyedPrefix(_, _, c):
            return forget_history(c)
        case TimeoutL(m, _, _):
            return forget_history(m)
        case TimeoutR(_, a, _):
            return forget_history(a)
        case Par(l, r):
            return Par(forget_history(l), forget_history(r))
        case Restrict(b, n):
            return Restrict(forget_history(b), n)
        case Sum(l, r):
            nl, nr = is_not_acted(l), is_not_acted(r)
            if not nl and not nr:
                raise ValidationError("sum with two acted branches is unreachable")
            if not nl:
                return forget_history(l)
            if not nr:
                return forget_history(r)
            return Sum(forget_history(l), forget_history(r))
        case Prefix(act, c):
            return Prefix(act, forget_history(c))
        case Timeout(m, a):
            return Timeout(forget_history(m), forget_history(a))
        case _:
            return x


def forget_time(x: Term) -> Term:
    """phi_t: drop sigma and ghost material; timeouts become sums."""
    match x:
        case Nil() | Const(_):
            return x
        case Prefix(act, c):
            if isinstance(act, Sigma):
                return forget_time(c)
            return Prefix(act, forget_time(c))
        case KeyedPrefix(RpAct(a), k, c):
            return KeyedPrefix(RpAct(a), k, forget_time(c))
        case KeyedPrefix(_, _, c):
            return forget_time(c)
        case Sum(l, r):
            return Sum(forget_time(l), forget_time(r))
        case Par(l, r):
            return Par(forget_time(l), forget_time(r))
        case Restrict(b, n):
            return Restrict(forget_time(b), n)
        case Timeout(m, a):
            return Sum(forget_time(m), forget_time(a))
        case TimeoutL(m, a, _) | TimeoutR(m, a, _):
            return Sum(forget_time(m), forget_time(a))
    raise TypeError(x)


def time_forgotten_env(env: DefinitionEnv) -> DefinitionEnv:
    """The environment seen by CCSK: bodies with time erased.

    A constant whose unfolding never reaches a communication prefix (e.g.
    one guarded only by sigma prefixes) erases to a bare constant chain; it
    has no untimed behaviour at all, so its CCSK body is nil. Bodies whose
    image is unguarded but productive have no finite-control CCSK
    counterpart and are rejected.
    """
    bodies = {n: forget_time(env.defs[n]) for n in env.order}
    for name in env.order:
        b = bodies[name]
        seen = {name}
        while isinstance(b, Const):
            if b.ident in seen:
                bodies[name] = Nil()
                break
            seen.add(b.ident)
            b = bodies[b.ident]
    try:
        return DefinitionEnv.make(bodies, env.order)
    except ValidationError:
        raise
    except Exception as e:
        raise ValidationError(
            f"the time-forgotten image of the definitions is not guarded; "
            f"the CCSK reference cannot represent it ({e})") from e


# ---------------------------------------------------------------------------
# Behavioural checkers

class Verdict(enum.Enum):
    OK = "ok"
    COUNTEREXAMPLE = "counterexample"
    BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass(frozen=True)
class CheckOutcome:
    verdict: Verdict
    pairs: int
    path: tuple[str, ...] = ()
    frontier: int = 0  # pairs beyond the requested game horizon, if any

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.OK


def check_timed_bisimulation(x: Term, p: Term, env: DefinitionEnv,
                             budget: int = 20000, depth: int | None = None,
                             config: EngineConfig = DEFAULT_CONFIG) -> CheckOutcome:
    """On-the-fly check that x (rTPL) and p (TPL) are strongly timed bisimilar.

    When p is the history image of x, the candidate relation
    {(Y, phi_h(Y))} is verified pair by pair: both transfer clauses are
    checked concretely on each pair, and pairs are memoized after quotienting
    the rTPL side by its history image (the raw pair space is infinite:
    ghost chains grow unboundedly). The per-edge embedding checks in
    :mod:`rtpl.verify` cover every explored edge without this quotient. For
    unrelated inputs a bounded explicit game is solved instead.

    `depth` is the requested game horizon: pairs beyond it are not explored
    and are reported in the outcome's `frontier`. Exhausting `budget` before
    finishing the requested work is inconclusive, never a pass.
    """
    from .printer import print_term

    if fold_constants(forget_history(x), env) == fold_constants(p, env):
        pairs = 0
        frontier = 0
        seen: set[tuple[Term, Term]] = set()
        work: list[tuple[Term, Term, tuple[str, ...]]] = [(x, p, ())]
        while work:
            X, P, trail = work.pop()
            key = (canon_state(forget_history(X), env), fold_constants(P, env))
            if key in seen:
                continue
            if depth is not None and len(trail) > depth:
                frontier += 1
                continue
            seen.add(key)
            pairs += 1
            if pairs > budget:
                return CheckOutcome(Verdict.BUDGET_EXHAUSTED, pairs, trail)
            xmoves = forward_steps(X, env, KeyAllocator(max_key(X) + 1), config)
            pmoves = tpl_steps(P, env)
            for t in xmoves:
                want = fold_constants(forget_history(t.target), env)
                match_q = next((q for (a, q) in pmoves
                                if a == t.label.action
                                and fold_constants(q, env) == want), None)
                if match_q is None:
                    step = f"{print_term(X)} -{_lbl(t.label)}-> unmatched in TPL"
                    return CheckOutcome(Verdict.COUNTEREXAMPLE, pairs, trail + (step,))
                work.append((t.target, match_q, trail + (_lbl(t.label),)))
            for (a, q) in pmoves:
                fq = fold_constants(q, env)
                match_t = next((t for t in xmoves
                                if t.label.action == a
                                and fold_constants(forget_history(t.target), env) == fq),
                               None)
                if match_t is None:
                    step = f"TPL {print_term(P)} -{_act(a)}-> {print_term(q)} unmatched"
                    return CheckOutcome(Verdict.COUNTEREXAMPLE, pairs, trail + (step,))
                work.append((match_t.target, q, trail + (_act(a),)))
        return CheckOutcome(Verdict.OK, pairs, frontier=frontier)
    return _bisim_game(x, p, env, budget, config)


def _lbl(label: Label) -> str:
    from .terms import action_text
    return f"{action_text(label.action)}[{label.key.id}]"


def _act(a: Action) -> str:
    from .terms import action_text
    return action_text(a)


def _bisim_game(x: Term, p: Term, env: DefinitionEnv, budget: int,
                config: EngineConfig, max_depth: int = 12) -> CheckOutcome:
    """Bounded explicit bisimulation game with fixpoint elimination.

    Without the history quotient the pair space is infinite, so the game is
    cut at `max_depth`; a definite counterexample can still surface from the
    explored region, while an open frontier yields an inconclusive verdict.
    """
    Node = tuple[Term, Term]
    root = (canon_state(x, env), fold_constants(p, env))
    nodes: dict[Node, list[list[Node]]] = {}
    unknown: set[Node] = set()
    queue: deque[tuple[Node, int]] = deque([(root, 0)])
    budget = min(budget, 4000)
    while queue:
        node, depth = queue.popleft()
        if node in nodes or node in unknown:
            continue
        if len(nodes) >= budget or depth > max_depth:
            unknown.add(node)
            continue
        X, P = node
        obligations: list[list[Node]] = []
        xmoves = forward_steps(X, env, KeyAllocator(max_key(X) + 1), config)
        pmoves = tpl_steps(P, env)
        for t in xmoves:
            cands = [(canon_state(t.target, env), fold_constants(q, env))
                     for (a, q) in pmoves if a == t.label.action]
            obligations.append(cands)
        for (a, q) in pmoves:
            cands = [(canon_state(t.target, env), fold_constants(q, env))
                     for t in xmoves if t.label.action == a]
            obligations.append(cands)
        nodes[node] = obligations
        for obl in obligations:
            queue.extend((c, depth + 1) for c in obl)
    # greatest fixpoint: eliminate nodes with an unsatisfiable obligation
    bad: set[Node] = set()
    changed = True
    while changed:
        changed = False
        for node, obligations in nodes.items():
            if node in bad:
                continue
            for obl in obligations:
                if all(c in bad for c in obl if c not in unknown) and not any(
                        c in unknown for c in obl):
                    bad.add(node)
                    changed = True
                    break
    if root in bad:
        return CheckOutcome(Verdict.COUNTEREXAMPLE, len(nodes))
    if unknown:
        return CheckOutcome(Verdict.BUDGET_EXHAUSTED, len(nodes))
    return CheckOutcome(Verdict.OK, len(nodes))


def check_bf_simulation(x: Term, r: Term, env: DefinitionEnv,
                        budget: int = 20000, depth: int | None = None,
                        config: EngineConfig = DEFAULT_CONFIG) -> CheckOutcome:
    """Back-and-forward simulation of x (rTPL) by r (CCSK).

    Clause 1: forward communication moves are matched with the same key;
    clause 2: backward communication moves likewise; clause 3: sigma moves
    in either direction stutter. Verified on the candidate relation
    {(Y, phi_t(Y))} with pairs memoized up to the history/time quotient.
    Unlike the bisimulation game, communication history accumulates in the
    CCSK image, so recursive processes have an infinite pair space; pass a
    `depth` horizon for those (pairs beyond it are counted in `frontier`).
    """
    from .printer import print_term

    env_t = time_forgotten_env(env)
    if forget_time(x) != r and canonicalize_keys(
            fold_constants(forget_time(x), env_t)) != canonicalize_keys(
            fold_constants(r, env_t)):
        raise ValidationError("simulation checker expects r = phi_t(x) (up to keys)")
    pairs = 0
    frontier = 0
    seen: set[tuple[Term, Term]] = set()
    work: list[tuple[Term, Term, tuple[str, ...]]] = [(x, r, ())]
    while work:
        X, R, trail = work.pop()
        key = (fold_constants(forget_history(X), env),
               canon_state(forget_time(X), env_t))
        if key in seen:
            continue
        if depth is not None and len(trail) > depth:
            frontier += 1
            continue
        seen.add(key)
        pairs += 1
        if pairs > budget:
            return CheckOutcome(Verdict.BUDGET_EXHAUSTED, pairs, trail)
        alloc = KeyAllocator(max(max_key(X), max_key(R)) + 1)
        for t in forward_steps(X, env, alloc, config):
            if isinstance(t.label.action, Sigma):
                work.append((t.target, R, trail + (_lbl(t.label),)))
                continue
            want = fold_constants(forget_time(t.target), env_t)
            hits = [s for s in ccsk_fwd_with_key(R, env_t, t.label.action, t.label.key.id)
                    if fold_constants(s, env_t) == want]
            if not hits:
                step = f"{print_term(X)} -{_lbl(t.label)}-> unmatched in CCSK"
                return CheckOutcome(Verdict.COUNTEREXAMPLE, pairs, trail + (step,))
            work.append((t.target, hits[0], trail + (_lbl(t.label),)))
        for t in backward_steps(X, env, config):
            if isinstance(t.label.action, Sigma):
                work.append((t.target, R, trail + ("~" + _lbl(t.label),)))
                continue
            want = fold_constants(forget_time(t.target), env_t)
            hits = [s for (a, j, s) in ccsk_steps_bk(R, env_t)
                    if a == t.label.action and j == t.label.key.id
                    and fold_constants(s, env_t) == want]
            if not hits:
                step = f"{print_term(X)} ~{_lbl(t.label)}~> unmatched in CCSK"
                return CheckOutcome(Verdict.COUNTEREXAMPLE, pairs, trail + (step,))
            work.append((t.target, hits[0], trail + ("~" + _lbl(t.label),)))
    return CheckOutcome(Verdict.OK, pairs, frontier=frontier)
