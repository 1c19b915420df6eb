"""Term representations for rTPL processes and configurations.

A single immutable term type covers both levels: process constructors
(``Nil``, ``Prefix``, ``Timeout``, ``Sum``, ``Par``, ``Restrict``, ``Const``)
are also configuration constructors, and the history-carrying forms
(``KeyedPrefix``, ``TimeoutL``, ``TimeoutR``) only appear in configurations.
A *process* is a term with no keys anywhere; ``is_standard`` in
:mod:`rtpl.analysis` recovers the distinction.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union


class RtplError(Exception):
    """Base class for all rTPL errors."""


class ValidationError(RtplError):
    """A term violates a structural invariant (e.g. a doubly-acted sum)."""


class UnboundConstantError(RtplError):
    def __init__(self, ident: str):
        super().__init__(f"unbound constant {ident!r}")
        self.ident = ident


class UnguardedRecursionError(RtplError):
    def __init__(self, ident: str):
        super().__init__(f"definition of {ident!r} is not guarded")
        self.ident = ident


class UnfoldBudgetExceeded(RtplError):
    """Constant unfolding exceeded its budget; impossible for guarded envs."""


# ---------------------------------------------------------------------------
# Actions

@dataclass(frozen=True, slots=True)
class Name:
    sym: str


@dataclass(frozen=True, slots=True)
class CoName:
    sym: str


@dataclass(frozen=True, slots=True)
class Tau:
    pass


@dataclass(frozen=True, slots=True)
class Sigma:
    pass


Action = Union[Name, CoName, Tau, Sigma]
CommAction = Union[Name, CoName, Tau]

TAU = Tau()
SIGMA = Sigma()


def complement(a: Action) -> Action | None:
    """`a` <-> `'a`; tau and sigma have no complement."""
    match a:
        case Name(s):
            return CoName(s)
        case CoName(s):
            return Name(s)
        case _:
            return None


def is_comm(a: Action) -> bool:
    return not isinstance(a, Sigma)


def action_text(a: Action) -> str:
    match a:
        case Name(s):
            return s
        case CoName(s):
            return f"'{s}"
        case Tau():
            return "tau"
        case Sigma():
            return "s"
    raise TypeError(a)


def action_from_text(text: str) -> Action:
    if text == "tau":
        return TAU
    if text == "s":
        return SIGMA
    if text.startswith("'"):
        return CoName(text[1:])
    return Name(text)


# ---------------------------------------------------------------------------
# Keys

class Kind(enum.Enum):
    TIME = "time"
    COMM = "comm"


@dataclass(frozen=True, slots=True)
class Key:
    """A key id together with the kind of event it identifies.

    Terms store bare ids; the kind is fixed by the carrying form at each
    occurrence (ghost / executed sigma / @R decorations are time keys, the
    rest are communication keys), so a Key object can always be rebuilt.
    """

    id: int
    kind: Kind


def kind_for_action(a: Action) -> Kind:
    return Kind.TIME if isinstance(a, Sigma) else Kind.COMM


# ---------------------------------------------------------------------------
# Runtime prefixes (the rho of keyed prefixes)

@dataclass(frozen=True, slots=True)
class RpAct:
    """An executed communication prefix alpha[i]."""

    act: CommAction


@dataclass(frozen=True, slots=True)
class RpSigma:
    """An executed sigma prefix s[i] (a deliberate delay)."""


@dataclass(frozen=True, slots=True)
class RpGhost:
    """A ghost prefix s_[i]: patiently registered passage of time."""


Rp = Union[RpAct, RpSigma, RpGhost]


def rp_kind(rp: Rp) -> Kind:
    return Kind.COMM if isinstance(rp, RpAct) else Kind.TIME


def rp_action(rp: Rp) -> Action:
    """The action whose execution the runtime prefix records."""
    return rp.act if isinstance(rp, RpAct) else SIGMA


# ---------------------------------------------------------------------------
# Terms

@dataclass(frozen=True, slots=True)
class Nil:
    pass


@dataclass(frozen=True, slots=True)
class Prefix:
    act: Action
    cont: "Term"


@dataclass(frozen=True, slots=True)
class Timeout:
    """`[main](alt)`: run main if it can act, fall to alt on a time step."""

    main: "Term"
    alt: "Term"


@dataclass(frozen=True, slots=True)
class Sum:
    left: "Term"
    right: "Term"


@dataclass(frozen=True, slots=True)
class Par:
    left: "Term"
    right: "Term"


@dataclass(frozen=True, slots=True)
class Restrict:
    body: "Term"
    name: str


@dataclass(frozen=True, slots=True)
class Const:
    ident: str


@dataclass(frozen=True, slots=True)
class KeyedPrefix:
    rp: Rp
    key: int
    cont: "Term"


@dataclass(frozen=True, slots=True)
class TimeoutL:
    """`[main](alt)@L[key]`: the main branch acted with `key`; alt is frozen."""

    main: "Term"
    alt: "Term"
    key: int


@dataclass(frozen=True, slots=True)
class TimeoutR:
    """`[main](alt)@R[key]`: the timeout fired at time step `key`; main is frozen."""

    main: "Term"
    alt: "Term"
    key: int


Term = Union[
    Nil, Prefix, Timeout, Sum, Par, Restrict, Const,
    KeyedPrefix, TimeoutL, TimeoutR,
]

NIL = Nil()


def children(t: Term) -> tuple[Term, ...]:
    match t:
        case Prefix(_, c) | KeyedPrefix(_, _, c):
            return (c,)
        case Timeout(m, a) | TimeoutL(m, a, _) | TimeoutR(m, a, _):
            return (m, a)
        case Sum(l, r) | Par(l, r):
            return (l, r)
        case Restrict(b, _):
            return (b,)
        case _:
            return ()


def subterms(t: Term) -> Iterator[Term]:
    yield t
    for c in children(t):
        yield from subterms(c)


def max_key(t: Term) -> int:
    """Largest key id in t, or -1 when standard."""
    best = -1
    for s in subterms(t):
        match s:
            case KeyedPrefix(_, k, _) | TimeoutL(_, _, k) | TimeoutR(_, _, k):
                if k > best:
                    best = k
    return best


def rename_keys(t: Term, mapping: Mapping[int, int]) -> Term:
    """Apply a key-id substitution everywhere. Ids not in the map are kept."""
    match t:
        case KeyedPrefix(rp, k, c):
            return KeyedPrefix(rp, mapping.get(k, k), rename_keys(c, mapping))
        case TimeoutL(m, a, k):
            return TimeoutL(rename_keys(m, mapping), rename_keys(a, mapping),
                            mapping.get(k, k))
        case TimeoutR(m, a, k):
            return TimeoutR(rename_keys(m, mapping), rename_keys(a, mapping),
                            mapping.get(k, k))
        case Prefix(act, c):
            return Prefix(act, rename_keys(c, mapping))
        case Timeout(m, a):
            return Timeout(rename_keys(m, mapping), rename_keys(a, mapping))
        case Sum(l, r):
            return Sum(rename_keys(l, mapping), rename_keys(r, mapping))
        case Par(l, r):
            return Par(rename_keys(l, mapping), rename_keys(r, mapping))
        case Restrict(b, n):
            return Restrict(rename_keys(b, mapping), n)
        case _:
            return t


# ---------------------------------------------------------------------------
# Definition environments

@dataclass(frozen=True, eq=False)
class DefinitionEnv:
    """Constant definitions `A = P`, with fold-normalized bodies.

    Bodies are normalized to a fixpoint by folding subterms that equal another
    (normalized) body back into that constant; `body_index` then maps each
    normalized body to its first-declared constant. This gives a canonical
    form in which a fired constant and its unfolding are the same state.
    """

    defs: Mapping[str, Term]
    order: tuple[str, ...] = field(default=())
    normalized: Mapping[str, Term] = field(default_factory=dict)
    body_index: Mapping[Term, str] = field(default_factory=dict)
    alias: Mapping[str, str] = field(default_factory=dict)

    @staticmethod
    def make(defs: Mapping[str, Term], order: tuple[str, ...] | None = None
             ) -> "DefinitionEnv":
        order = tuple(order if order is not None else defs.keys())
        for name in order:
            _check_bound(defs[name], defs, name)
            _check_guarded(defs[name], name)
        # Fold bodies against each other to a fixpoint, rewriting every
        # constant occurrence to its first-declared alias, so that a body
        # and its duplicates normalize identically everywhere; the root of
        # a body never folds into its own constant (bare aliases stay).
        normalized = dict(defs)
        alias = {name: name for name in order}
        for _ in range(len(order) * max(_size(b) for b in defs.values()) + 2
                       if defs else 0):
            index = _first_declared_index(normalized, order)
            alias = _compute_alias(normalized, index, order)
            newnorm = {name: _fold_against(normalized[name], index, alias,
                                           forbid=name)
                       for name in order}
            if newnorm == normalized:
                break
            normalized = newnorm
        index = _first_declared_index(normalized, order)
        alias = _compute_alias(normalized, index, order)
        return DefinitionEnv(defs=dict(defs), order=order,
                             normalized=normalized,
                             body_index=index, alias=alias)

    def lookup(self, ident: str) -> Term:
        try:
            return self.normalized[ident]
        except KeyError:
            raise UnboundConstantError(ident) from None

    def names(self) -> tuple[str, ...]:
        return self.order


def _size(t: Term) -> int:
    return 1 + sum(_size(c) for c in children(t))


def _first_declared_index(bodies: Mapping[str, Term], order: tuple[str, ...]
                          ) -> dict[Term, str]:
    index: dict[Term, str] = {}
    for name in order:
        index.setdefault(bodies[name], name)
    return index


def _compute_alias(bodies: Mapping[str, Term], index: Mapping[Term, str],
                   order: tuple[str, ...]) -> dict[str, str]:
    alias: dict[str, str] = {}
    for name in order:
        body = bodies[name]
        target = name
        seen = {name}
        while isinstance(body, Const) and body.ident not in seen:
            target = body.ident
            seen.add(target)
            body = bodies[target]
        alias[name] = index.get(bodies[target], target)
    return alias


def _fold_against(t: Term, index: Mapping[Term, str],
                  alias: Mapping[str, str], forbid: str | None) -> Term:
    rebuilt: Term
    match t:
        case Const(ident):
            canonical = alias.get(ident, ident)
            rebuilt = t if canonical == ident else Const(canonical)
        case Prefix(act, c):
            rebuilt = Prefix(act, _fold_against(c, index, alias, forbid))
        case Timeout(m, a):
            rebuilt = Timeout(_fold_against(m, index, alias, forbid),
                              _fold_against(a, index, alias, forbid))
        case Sum(l, r):
            rebuilt = Sum(_fold_against(l, index, alias, forbid),
                          _fold_against(r, index, alias, forbid))
        case Par(l, r):
            rebuilt = Par(_fold_against(l, index, alias, forbid),
                          _fold_against(r, index, alias, forbid))
        case Restrict(b, n):
            rebuilt = Restrict(_fold_against(b, index, alias, forbid), n)
        case KeyedPrefix(rp, k, c):
            rebuilt = KeyedPrefix(rp, k, _fold_against(c, index, alias, forbid))
        case TimeoutL(m, a, k):
            rebuilt = TimeoutL(_fold_against(m, index, alias, forbid),
                               _fold_against(a, index, alias, forbid), k)
        case TimeoutR(m, a, k):
            rebuilt = TimeoutR(_fold_against(m, index, alias, forbid),
                               _fold_against(a, index, alias, forbid), k)
        case _:
            rebuilt = t
    hit = index.get(rebuilt)
    if hit is not None and hit != forbid and not isinstance(rebuilt, Const):
        canonical = alias.get(hit, hit)
        if canonical != forbid:
            return Const(canonical)
    return rebuilt


def fold_constants(t: Term, env: DefinitionEnv) -> Term:
    """Fold subterms equal to a definition body back into the constant.

    Idempotent; used for state identity so that a constant that unfolded
    during a step and was later undone compares equal to its folded origin,
    with duplicate-bodied constants rewritten to their first declaration.
    """
    if not env.order:
        return t
    return _fold_against(t, env.body_index, env.alias, forbid=None)


def _check_bound(t: Term, defs: Mapping[str, Term], owner: str) -> None:
    for s in subterms(t):
        if isinstance(s, Const) and s.ident not in defs:
            raise UnboundConstantError(s.ident)


def _check_guarded(body: Term, owner: str) -> None:
    """Every constant occurrence sits under a prefix or in a timeout alt.

    The main branch of a timeout does not protect: both rule Tout and the
    tau-capability analysis recurse into it without consuming a step.
    """

    def walk(t: Term, protected: bool) -> None:
        match t:
            case Const(_):
                if not protected:
                    raise UnguardedRecursionError(owner)
            case Prefix(_, c):
                walk(c, True)
            case Timeout(m, a):
                walk(m, protected)
                walk(a, True)
            case Sum(l, r) | Par(l, r):
                walk(l, protected)
                walk(r, protected)
            case Restrict(b, _):
                walk(b, protected)
            case KeyedPrefix(_, _, c):
                walk(c, protected)
            case TimeoutL(m, a, _):
                walk(m, protected)
                walk(a, True)
            case TimeoutR(m, a, _):
                walk(m, protected)
                walk(a, protected)
            case _:
                pass

    walk(body, False)


EMPTY_ENV = DefinitionEnv.make({})
