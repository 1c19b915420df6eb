"""Forward and backward labelled transition systems for rTPL.

Transitions are derived with a placeholder for the one fresh key every
forward step introduces; rules that stamp several positions at once (Syn,
SynW, ChoW, Tout) share the placeholder, so substituting one fresh id per
derivation realizes the side conditions ``j != i`` / ``i not in key(Y)`` of
the rules. Backward steps read their keys from the configuration.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .analysis import is_not_acted, is_standard, key_ids
from .terms import (
    Action, CoName, Const, DefinitionEnv, Key, KeyedPrefix, Name, Nil,
    Par, Prefix, Restrict, Rp, RpAct, RpGhost, RpSigma, SIGMA, Sigma, Sum,
    TAU, Tau, Term, Timeout, TimeoutL, TimeoutR, UnfoldBudgetExceeded,
    ValidationError, complement, fold_constants, kind_for_action,
    max_key, rename_keys,
)

PLACEHOLDER = -1


class Dir(enum.Enum):
    FWD = "fwd"
    BK = "bk"


@dataclass(frozen=True, slots=True)
class Label:
    action: Action
    key: Key


@dataclass(frozen=True, slots=True)
class Transition:
    direction: Dir
    label: Label
    source: Term
    target: Term
    rule: str

    def inverse_of(self, other: "Transition") -> bool:
        return (self.label == other.label and self.direction is not other.direction
                and self.source == other.target and self.target == other.source)


@dataclass
class KeyAllocator:
    """Monotonic source of fresh key ids for one session."""

    next: int = 0

    def fresh(self, x: Term) -> int:
        k = max(self.next, max_key(x) + 1)
        self.next = k + 1
        return k

    def note(self, used: int) -> None:
        if used >= self.next:
            self.next = used + 1


@dataclass(frozen=True)
class EngineConfig:
    """Stepping knobs; ``ghosts=False`` leaves patient time steps unrecorded
    (the broken variant the mutation checks reproduce)."""

    ghosts: bool = True
    unfold_budget: int = 64


DEFAULT_CONFIG = EngineConfig()


@dataclass(frozen=True, slots=True)
class _PStep:
    action: Action
    target: Term
    rule: str


# ---------------------------------------------------------------------------
# Synchronisation operator (decidable encoding of the negative premises)

def synch(x: Term, env: DefinitionEnv) -> frozenset[frozenset[Action]]:
    """Families of jointly enabled forward prefixes.

    A member set is one consistent selection of enabled barbs across the
    parallel components; tau capability means some member holds a tau or a
    complementary pair. The empty family (nil, sigma prefixes) is neutral
    for the parallel combination.
    """
    match x:
        case Nil():
            return frozenset()
        case Prefix(act, _):
            if isinstance(act, Sigma):
                return frozenset()
            return frozenset({frozenset({act})})
        case Const(ident):
            return synch(env.lookup(ident), env)
        case KeyedPrefix(_, _, c):
            return synch(c, env)
        case Par(l, r):
            return _oplus(synch(l, env), synch(r, env))
        case Restrict(b, a):
            return frozenset(_strip(c, a) for c in synch(b, env))
        case Sum(l, r):
            nl, nr = is_not_acted(l), is_not_acted(r)
            if not nl and not nr:
                raise ValidationError("sum with two acted branches is unreachable")
            if not nl:
                return synch(l, env)
            if not nr:
                return synch(r, env)
            return synch(l, env) | synch(r, env)
        case Timeout(m, _) | TimeoutL(m, _, _):
            return synch(m, env)
        case TimeoutR(_, a, _):
            return synch(a, env)
        case _:
            raise TypeError(x)


def _oplus(a: frozenset[frozenset[Action]], b: frozenset[frozenset[Action]]
           ) -> frozenset[frozenset[Action]]:
    if not a:
        return b
    if not b:
        return a
    return frozenset(ca | cb for ca in a for cb in b)


def _strip(c: frozenset[Action], name: str) -> frozenset[Action]:
    blocked = {Name(name), CoName(name)}
    out = c - blocked
    if Name(name) in c and CoName(name) in c:
        out = out | {TAU}  # an internal pair under the restriction stays a tau
    return out


def can_tau(x: Term, env: DefinitionEnv) -> bool:
    """True iff x has a forward tau transition (synch-based, Appendix B)."""
    for c in synch(x, env):
        if TAU in c:
            return True
        for a in c:
            if complement(a) in c:
                return True
    return False


# ---------------------------------------------------------------------------
# Forward steps

def _rp_for(act: Action) -> Rp:
    return RpSigma() if isinstance(act, Sigma) else RpAct(act)


def _fwd_ph(x: Term, env: DefinitionEnv, cfg: EngineConfig, budget: int
            ) -> list[_PStep]:
    comm: list[_PStep] = []
    sigma: list[_PStep] = []

    def lift(steps: list[_PStep], wrap, rule: str | None = None) -> None:
        for p in steps:
            (sigma if isinstance(p.action, Sigma) else comm).append(
                _PStep(p.action, wrap(p.target), rule or p.rule))

    match x:
        case Nil():
            tgt = KeyedPrefix(RpGhost(), PLACEHOLDER, x) if cfg.ghosts else x
            sigma.append(_PStep(SIGMA, tgt, "Idle"))
        case Prefix(act, cont):
            comm_act = not isinstance(act, Sigma)
            step = _PStep(act, KeyedPrefix(_rp_for(act), PLACEHOLDER, cont), "RAct")
            (comm if comm_act else sigma).append(step)
            if comm_act:
                tgt = KeyedPrefix(RpGhost(), PLACEHOLDER, x) if cfg.ghosts else x
                sigma.append(_PStep(SIGMA, tgt, "PAct"))
        case Const(ident):
            if budget <= 0:
                raise UnfoldBudgetExceeded(ident)
            for p in _fwd_ph(env.lookup(ident), env, cfg, budget - 1):
                (sigma if isinstance(p.action, Sigma) else comm).append(
                    _PStep(p.action, p.target, "Const"))
        case KeyedPrefix(rp, k, cont):
            lift(_fwd_ph(cont, env, cfg, budget),
                 lambda t: KeyedPrefix(rp, k, t), "Act")
        case Timeout(m, a):
            for p in _fwd_ph(m, env, cfg, budget):
                if not isinstance(p.action, Sigma):
                    comm.append(_PStep(p.action, TimeoutL(p.target, a, PLACEHOLDER), "Tout"))
            if not can_tau(m, env):
                sigma.append(_PStep(SIGMA, TimeoutR(m, a, PLACEHOLDER), "STout"))
        case TimeoutL(m, a, k):
            lift(_fwd_ph(m, env, cfg, budget),
                 lambda t: TimeoutL(t, a, k), "Wait")
        case TimeoutR(m, a, k):
            lift(_fwd_ph(a, env, cfg, budget),
                 lambda t: TimeoutR(m, t, k), "SWait")
        case Sum(l, r):
            nl, nr = is_not_acted(l), is_not_acted(r)
            if not nl and not nr:
                raise ValidationError("sum with two acted branches is unreachable")
            lsteps = _fwd_ph(l, env, cfg, budget)
            rsteps = _fwd_ph(r, env, cfg, budget)
            if nr:
                for p in lsteps:
                    if not isinstance(p.action, Sigma):
                        comm.append(_PStep(p.action, Sum(p.target, r), "Cho"))
            if nl:
                for p in rsteps:
                    if not isinstance(p.action, Sigma):
                        comm.append(_PStep(p.action, Sum(l, p.target), "Cho"))
            ls = [p for p in lsteps if isinstance(p.action, Sigma)]
            rs = [p for p in rsteps if isinstance(p.action, Sigma)]
            if ls and rs:
                sigma.append(_PStep(SIGMA, Sum(ls[0].target, rs[0].target), "ChoW"))
        case Par(l, r):
            lsteps = _fwd_ph(l, env, cfg, budget)
            rsteps = _fwd_ph(r, env, cfg, budget)
            for p in lsteps:
                if not isinstance(p.action, Sigma):
                    comm.append(_PStep(p.action, Par(p.target, r), "Par"))
            for p in rsteps:
                if not isinstance(p.action, Sigma):
                    comm.append(_PStep(p.action, Par(l, p.target), "Par"))
            for pl in lsteps:
                co = complement(pl.action)
                if co is None:
                    continue
                for pr in rsteps:
                    if pr.action == co:
                        comm.append(_PStep(TAU, Par(pl.target, pr.target), "Syn"))
            ls = [p for p in lsteps if isinstance(p.action, Sigma)]
            rs = [p for p in rsteps if isinstance(p.action, Sigma)]
            if ls and rs and not can_tau(x, env):
                sigma.append(_PStep(SIGMA, Par(ls[0].target, rs[0].target), "SynW"))
        case Restrict(b, a):
            blocked = {Name(a), CoName(a)}
            lift([p for p in _fwd_ph(b, env, cfg, budget) if p.action not in blocked],
                 lambda t: Restrict(t, a), "Hide")
        case _:
            raise TypeError(x)

    assert len(sigma) <= 1, f"time determinism violated at {x}"
    return comm + sigma


def forward_pending(x: Term, env: DefinitionEnv,
                    config: EngineConfig = DEFAULT_CONFIG) -> list[_PStep]:
    """Forward steps with the fresh key left as a placeholder."""
    return _fwd_ph(x, env, config, config.unfold_budget)


def forward_steps(x: Term, env: DefinitionEnv, alloc: KeyAllocator,
                  config: EngineConfig = DEFAULT_CONFIG) -> list[Transition]:
    """All forward transitions of x, one fresh key per transition."""
    out = []
    for p in forward_pending(x, env, config):
        k = alloc.fresh(x)
        out.append(_materialize(x, p, k))
    return out


def _materialize(x: Term, p: _PStep, key: int) -> Transition:
    target = rename_keys(p.target, {PLACEHOLDER: key})
    return Transition(Dir.FWD, Label(p.action, Key(key, kind_for_action(p.action))),
                      x, target, p.rule)


def forward_with_label(x: Term, env: DefinitionEnv, action: Action, key: int,
                       config: EngineConfig = DEFAULT_CONFIG) -> list[Transition]:
    """Forward transitions with the given action, forced to use `key`.

    Any fresh key is licensed by the rules, so forcing is sound whenever
    `key` is not already in the configuration.
    """
    if key in key_ids(x):
        return []
    return [_materialize(x, p, key) for p in forward_pending(x, env, config)
            if p.action == action]


# ---------------------------------------------------------------------------
# Backward steps

def backward_steps(x: Term, env: DefinitionEnv,
                   config: EngineConfig = DEFAULT_CONFIG) -> list[Transition]:
    """All backward transitions of x; keys are read from the configuration."""
    return [Transition(Dir.BK, Label(a, Key(k, kind_for_action(a))), x, t, r)
            for (a, k, t, r) in _bk(x, env)]


def _bk(x: Term, env: DefinitionEnv) -> list[tuple[Action, int, Term, str]]:
    out: list[tuple[Action, int, Term, str]] = []
    match x:
        case KeyedPrefix(rp, k, cont):
            if is_standard(cont):
                match rp:
                    case RpAct(a):
                        out.append((a, k, Prefix(a, cont), "Ract"))
                    case RpSigma():
                        out.append((SIGMA, k, Prefix(SIGMA, cont), "Ract"))
                    case RpGhost():
                        match cont:
                            case Prefix(a, _) if not isinstance(a, Sigma):
                                out.append((SIGMA, k, cont, "Pact"))
                            case Nil():
                                out.append((SIGMA, k, cont, "Idle"))
            else:
                for (a, j, t, _) in _bk(cont, env):
                    if j != k:
                        out.append((a, j, KeyedPrefix(rp, k, t), "Act"))
        case TimeoutL(m, alt, k):
            for (a, j, t, _) in _bk(m, env):
                if j != k:
                    out.append((a, j, TimeoutL(t, alt, k), "Wait"))
                elif not isinstance(a, Sigma) and is_standard(t):
                    out.append((a, k, Timeout(t, alt), "Tout"))
        case TimeoutR(m, alt, k):
            for (a, j, t, _) in _bk(alt, env):
                if j != k:
                    out.append((a, j, TimeoutR(m, t, k), "SWait"))
            if is_standard(alt) and not can_tau(m, env):
                out.append((SIGMA, k, Timeout(m, alt), "STout"))
        case Sum(l, r):
            nl, nr = is_not_acted(l), is_not_acted(r)
            if not nl and not nr:
                raise ValidationError("sum with two acted branches is unreachable")
            lbk = _bk(l, env)
            rbk = _bk(r, env)
            if nr:
                rkeys = key_ids(r)
                for (a, j, t, _) in lbk:
                    if not isinstance(a, Sigma) and j not in rkeys:
                        out.append((a, j, Sum(t, r), "Cho"))
            if nl:
                lkeys = key_ids(l)
                for (a, j, t, _) in rbk:
                    if not isinstance(a, Sigma) and j not in lkeys:
                        out.append((a, j, Sum(l, t), "Cho"))
            for (a1, j1, t1, _) in lbk:
                if isinstance(a1, Sigma):
                    for (a2, j2, t2, _) in rbk:
                        if isinstance(a2, Sigma) and j1 == j2:
                            out.append((SIGMA, j1, Sum(t1, t2), "ChoW"))
        case Par(l, r):
            lbk = _bk(l, env)
            rbk = _bk(r, env)
            lkeys, rkeys = key_ids(l), key_ids(r)
            for (a, j, t, _) in lbk:
                if not isinstance(a, Sigma) and j not in rkeys:
                    out.append((a, j, Par(t, r), "Par"))
            for (a, j, t, _) in rbk:
                if not isinstance(a, Sigma) and j not in lkeys:
                    out.append((a, j, Par(l, t), "Par"))
            for (a1, j1, t1, _) in lbk:
                co = complement(a1)
                if co is None:
                    continue
                for (a2, j2, t2, _) in rbk:
                    if a2 == co and j1 == j2:
                        out.append((TAU, j1, Par(t1, t2), "Syn"))
            sl = [(j, t) for (a, j, t, _) in lbk if isinstance(a, Sigma)]
            sr = [(j, t) for (a, j, t, _) in rbk if isinstance(a, Sigma)]
            for (j1, t1) in sl:
                for (j2, t2) in sr:
                    if j1 == j2 and not _bk_tau_exists(x, env):
                        out.append((SIGMA, j1, Par(t1, t2), "SynW"))
        case Restrict(b, a):
            blocked = {Name(a), CoName(a)}
            for (act, j, t, _) in _bk(b, env):
                if act not in blocked:
                    out.append((act, j, Restrict(t, a), "Hide"))
        case _:
            pass  # standard configurations have no backward transitions
    return out


def _bk_tau_exists(x: Term, env: DefinitionEnv) -> bool:
    """Backward tau capability; never passes through the sigma rules."""
    match x:
        case KeyedPrefix(rp, k, cont):
            if is_standard(cont):
                return isinstance(rp, RpAct) and isinstance(rp.act, Tau)
            return _bk_tau_exists(cont, env)
        case TimeoutL(m, _, k):
            for (a, j, t, _) in _bk(m, env):
                if isinstance(a, Tau) and (j != k or is_standard(t)):
                    return True
            return False
        case TimeoutR(_, alt, _):
            return _bk_tau_exists(alt, env)
        case Sum(l, r):
            nl, nr = is_not_acted(l), is_not_acted(r)
            if nr and _bk_tau_lifts(l, key_ids(r), env):
                return True
            if nl and _bk_tau_lifts(r, key_ids(l), env):
                return True
            return False
        case Par(l, r):
            if _bk_tau_lifts(l, key_ids(r), env) or _bk_tau_lifts(r, key_ids(l), env):
                return True
            lbk = _bk(l, env)
            rbk = _bk(r, env)
            for (a1, j1, _, _) in lbk:
                co = complement(a1)
                if co is None:
                    continue
                for (a2, j2, _, _) in rbk:
                    if a2 == co and j1 == j2:
                        return True
            return False
        case Restrict(b, _):
            return _bk_tau_exists(b, env)
        case _:
            return False


def _bk_tau_lifts(side: Term, sibling_keys: frozenset[int], env: DefinitionEnv) -> bool:
    return any(isinstance(a, Tau) and j not in sibling_keys
               for (a, j, _, _) in _bk(side, env))


def backward_with_label(x: Term, env: DefinitionEnv, action: Action, key: int,
                        config: EngineConfig = DEFAULT_CONFIG) -> list[Transition]:
    return [t for t in backward_steps(x, env, config)
            if t.label.action == action and t.label.key.id == key]


# ---------------------------------------------------------------------------
# Canonical forms

def canonicalize_keys_with_map(x: Term) -> tuple[Term, dict[int, int]]:
    """Rename key ids by first occurrence in a leftmost-innermost traversal."""
    mapping: dict[int, int] = {}

    def visit(t: Term) -> None:
        match t:
            case KeyedPrefix(_, k, c):
                visit(c)
                mapping.setdefault(k, len(mapping))
            case TimeoutL(m, a, k):
                visit(m)
                visit(a)
                mapping.setdefault(k, len(mapping))
            case TimeoutR(m, a, k):
                visit(m)
                visit(a)
                mapping.setdefault(k, len(mapping))
            case _:
                for c in _term_children(t):
                    visit(c)

    visit(x)
    return rename_keys(x, mapping), mapping


def _term_children(t: Term) -> tuple[Term, ...]:
    from .terms import children
    return children(t)


def canonicalize_keys(x: Term) -> Term:
    return canonicalize_keys_with_map(x)[0]


def canon_state(x: Term, env: DefinitionEnv) -> Term:
    """State identity: fold constant bodies, then canonicalize key ids."""
    return canonicalize_keys(fold_constants(x, env))
