"""Static predicates and the causal structure of configurations.

Implements the key set, the standard and not-acted predicates, the causality
partial order on keys, forward communication conflict, and conflict /
independence of coinitial transitions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .terms import (
    Const, Key, KeyedPrefix, Kind, Nil, Par, Prefix, Restrict, RpAct, Rp,
    RtplError, Sigma, Sum, Term, Timeout, TimeoutL, TimeoutR, rp_kind,
)


class FccShapeError(RtplError):
    """fcc applied to targets that cannot come from a common source."""


class NotCoinitialError(RtplError):
    """Conflict/independence is only defined for coinitial transitions."""


# ---------------------------------------------------------------------------
# key, std, nact (Definitions 3.1 and 3.2)

@lru_cache(maxsize=None)
def keys_of(x: Term) -> frozenset[Key]:
    """The set of keys of a configuration, with their kinds."""
    match x:
        case KeyedPrefix(rp, k, c):
            return keys_of(c) | {Key(k, rp_kind(rp))}
        case TimeoutL(m, _, k):
            return keys_of(m) | {Key(k, Kind.COMM)}
        case TimeoutR(_, a, k):
            return keys_of(a) | {Key(k, Kind.TIME)}
        case Sum(l, r) | Par(l, r):
            return keys_of(l) | keys_of(r)
        case Restrict(b, _):
            return keys_of(b)
        case Prefix(_, c):
            return keys_of(c)
        case Timeout(m, a):
            return keys_of(m) | keys_of(a)
        case _:
            return frozenset()


def key_ids(x: Term) -> frozenset[int]:
    return frozenset(k.id for k in keys_of(x))


def is_standard(x: Term) -> bool:
    return not keys_of(x)


@lru_cache(maxsize=None)
def is_not_acted(x: Term) -> bool:
    """True iff x has executed no communication action (time steps allowed)."""
    match x:
        case KeyedPrefix(rp, _, c):
            return False if isinstance(rp, RpAct) else is_not_acted(c)
        case TimeoutL(_, _, _):
            return False
        case TimeoutR(_, a, _):
            return is_not_acted(a)
        case Restrict(b, _):
            return is_not_acted(b)
        case Sum(l, r) | Par(l, r):
            return is_not_acted(l) and is_not_acted(r)
        case _:
            return True  # nil, constants, prefixes, timeouts


# ---------------------------------------------------------------------------
# The partial order on keys

@dataclass(frozen=True)
class KeyOrder:
    """Reflexive-transitive closure of ord(X) over the keys of X."""

    keys: frozenset[Key]
    pairs: frozenset[tuple[int, int]]  # strict pairs i < j from ord(X) closure

    def le(self, i: int, j: int) -> bool:
        return i == j or (i, j) in self.pairs

    def lt(self, i: int, j: int) -> bool:
        return (i, j) in self.pairs

    def kinds(self) -> dict[int, Kind]:
        return {k.id: k.kind for k in self.keys}

    def time_keys(self) -> list[int]:
        return sorted(k.id for k in self.keys if k.kind is Kind.TIME)

    def time_total(self) -> bool:
        """Is the restriction to time keys a total order?"""
        ts = self.time_keys()
        return all(self.le(a, b) or self.le(b, a)
                   for idx, a in enumerate(ts) for b in ts[idx + 1:])

    def to_json(self) -> dict:
        return {
            "lt": sorted([i, j] for (i, j) in self.pairs),
            "kinds": {str(k.id): k.kind.value for k in sorted(self.keys, key=lambda k: k.id)},
        }


def ord_pairs(x: Term) -> frozenset[tuple[int, int]]:
    """The generating set ord(X): i < j when i's position causes j."""
    match x:
        case KeyedPrefix(_, k, c):
            return frozenset((k, j) for j in key_ids(c)) | ord_pairs(c)
        case TimeoutL(m, _, k):
            return frozenset((k, j) for j in key_ids(m) if j != k) | ord_pairs(m)
        case TimeoutR(_, a, k):
            return frozenset((k, j) for j in key_ids(a)) | ord_pairs(a)
        case Sum(l, r) | Par(l, r) | Timeout(l, r):
            return ord_pairs(l) | ord_pairs(r)
        case Restrict(b, _):
            return ord_pairs(b)
        case Prefix(_, c):
            return ord_pairs(c)
        case _:
            return frozenset()


def key_order(x: Term) -> KeyOrder:
    keys = keys_of(x)
    pairs = set(ord_pairs(x))
    # transitive closure; antisymmetry must hold for reachable configurations
    changed = True
    while changed:
        changed = False
        for (a, b) in list(pairs):
            for (c, d) in list(pairs):
                if b == c and (a, d) not in pairs and a != d:
                    pairs.add((a, d))
                    changed = True
    for (a, b) in pairs:
        if (b, a) in pairs:
            raise RtplError(f"key order has a cycle through {a} and {b}")
    return KeyOrder(keys=keys, pairs=frozenset(pairs))


# ---------------------------------------------------------------------------
# Forward communication conflict

def fcc(y: Term, z: Term) -> bool:
    """Conflict of two forward-communication targets from one source.

    The clause table assumes y and z arise from the same configuration; pairs
    where the two transitions acted in disjoint positions compare a touched
    against an untouched subterm, which is never a conflict (the key sets
    differ); shapes that cannot share a source raise :class:`FccShapeError`.
    """
    if y == z:
        return False
    match (y, z):
        case (KeyedPrefix(rp1, k1, c1), KeyedPrefix(rp2, k2, c2)):
            if rp1 == rp2 and k1 == k2:
                return fcc(c1, c2)
            if isinstance(rp1, RpAct) and rp1 == rp2 and k1 != k2 and c1 == c2:
                return True  # the same prefix consumed by both transitions
        case (Par(y1, y2), Par(z1, z2)):
            return fcc(y1, z1) or fcc(y2, z2)
        case (Sum(y1, y2), Sum(z1, z2)):
            if y1 != z1 and y2 != z2:
                return True  # different branches of the same choice
            return fcc(y1, z1) or fcc(y2, z2)
        case (Restrict(b1, n1), Restrict(b2, n2)) if n1 == n2:
            return fcc(b1, b2)
        case (TimeoutL(m1, a1, k1), TimeoutL(m2, a2, k2)) if a1 == a2:
            # distinct decoration keys: both transitions committed the same
            # timeout, which is a conflict (the decorations cannot commute)
            return True if k1 != k2 else fcc(m1, m2)
        case (TimeoutR(m1, a1, k1), TimeoutR(m2, a2, k2)) if m1 == m2 and k1 == k2:
            return fcc(a1, a2)
    if key_ids(y) != key_ids(z):
        return False  # the transitions acted at disjoint positions
    raise FccShapeError(f"fcc undefined for this pair of shapes")


# ---------------------------------------------------------------------------
# Conflict and independence of coinitial transitions

def conflicting(t, s) -> bool:
    """The four-clause conflict relation on coinitial transitions.

    Accepts :class:`rtpl.semantics.Transition` values (duck-typed: direction,
    label, source, target).
    """
    from .semantics import Dir  # local import to keep module layering acyclic

    if t.source != s.source:
        raise NotCoinitialError("conflict is defined for coinitial transitions only")
    t_fwd = t.direction is Dir.FWD
    s_fwd = s.direction is Dir.FWD
    t_sigma = isinstance(t.label.action, Sigma)
    s_sigma = isinstance(s.label.action, Sigma)
    if t_fwd and s_fwd:
        if t_sigma != s_sigma:
            return True  # clause 1: a delay against a communication action
        if t.label.key.id == s.label.key.id:
            return True  # clause 4: same key picked twice
        if not t_sigma:
            return fcc(t.target, s.target)  # clause 2
        return False  # two forward sigmas with distinct keys (one is emitted)
    if not t_fwd and not s_fwd:
        return False  # backward transitions are never in conflict
    fwd, bk = (t, s) if t_fwd else (s, t)
    order = key_order(fwd.target)
    return order.le(bk.label.key.id, fwd.label.key.id)  # clause 3


def independent(t, s) -> bool:
    return not conflicting(t, s)
