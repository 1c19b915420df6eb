"""Bounded state-space exploration and the metatheory property suites.

Ghost-prefix chains make every space infinite, so exploration is bounded and
each report records whether the bounds truncated anything. States are
deduplicated by folding constant bodies and canonicalizing key ids; the
checks themselves run on concrete transitions recomputed from each state's
canonical representative, so label and target comparisons are exact.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field

from .analysis import (
    FccShapeError, conflicting, key_order, keys_of,
)
from .printer import print_term
from .reference import (
    ccsk_fwd_with_key, ccsk_steps_bk, forget_history, forget_time,
    time_forgotten_env, tpl_steps,
)
from .semantics import (
    DEFAULT_CONFIG, Dir, EngineConfig, KeyAllocator, Label, Transition,
    backward_steps, canon_state, forward_steps, forward_with_label,
)
from .terms import (
    DefinitionEnv, Sigma, Term, fold_constants, max_key, rename_keys,
)


@dataclass(frozen=True)
class Bounds:
    depth: int = 6
    max_states: int = 20000
    unfold_budget: int = 64


@dataclass
class StateInfo:
    depth: int
    fwd: list[Transition]
    bk: list[Transition]


@dataclass
class StateSpace:
    root: Term
    env: DefinitionEnv
    config: EngineConfig
    bounds: Bounds
    states: dict[Term, StateInfo]
    truncated: bool

    def edge_count(self) -> int:
        return sum(len(i.fwd) + len(i.bk) for i in self.states.values())


def explore(p: Term, env: DefinitionEnv, bounds: Bounds = Bounds(),
            config: EngineConfig = DEFAULT_CONFIG,
            forward_only: bool = False) -> StateSpace:
    """BFS over forward and backward steps from a standard root.

    With `forward_only` the frontier follows forward edges only (backward
    transitions are still recorded per state); by the corollary of the
    Parabolic Lemma this reaches the same states within the same depth.
    """
    cfg = EngineConfig(ghosts=config.ghosts, unfold_budget=bounds.unfold_budget)
    root = canon_state(p, env)
    states: dict[Term, StateInfo] = {}
    queue: deque[tuple[Term, int]] = deque([(root, 0)])
    truncated = False
    while queue:
        term, depth = queue.popleft()
        if term in states:
            continue
        if len(states) >= bounds.max_states:
            truncated = True
            break
        fwd = forward_steps(term, env, KeyAllocator(max_key(term) + 1), cfg)
        bk = backward_steps(term, env, cfg)
        states[term] = StateInfo(depth, fwd, bk)
        if depth >= bounds.depth:
            truncated = truncated or bool(fwd) or bool(bk)
            continue
        for t in (fwd if forward_only else fwd + bk):
            succ = canon_state(t.target, env)
            if succ not in states:
                queue.append((succ, depth + 1))
    return StateSpace(root, env, cfg, bounds, states, truncated)


# ---------------------------------------------------------------------------
# Reports

@dataclass
class Report:
    check: str
    states: int
    edges: int
    violations: list[dict] = field(default_factory=list)
    truncated: bool = False
    seed: int | None = None
    inconclusive: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "states": self.states,
            "edges": self.edges,
            "violations": self.violations,
            "truncated": self.truncated,
            "seed": self.seed,
            "inconclusive": self.inconclusive,
        }


def _violation(state: Term, what: str, **extra) -> dict:
    return {"state": print_term(state), "what": what, **extra}


# ---------------------------------------------------------------------------
# Loop Lemma

def check_loop(space: StateSpace) -> Report:
    """Every forward edge has the exact reverse backward edge and vice versa."""
    env, cfg = space.env, space.config
    rep = Report("loop", len(space.states), space.edge_count(),
                 truncated=space.truncated)
    for s, info in space.states.items():
        for t in info.fwd:
            mirrors = [b for b in backward_steps(t.target, env, cfg)
                       if b.label == t.label
                       and fold_constants(b.target, env) == s]
            if not mirrors:
                rep.violations.append(_violation(
                    s, "forward edge without backward mirror",
                    label=_label_text(t.label), target=print_term(t.target)))
        for b in info.bk:
            mirrors = [t for t in forward_with_label(
                           b.target, env, b.label.action, b.label.key.id, cfg)
                       if fold_constants(t.target, env) == s]
            if not mirrors:
                rep.violations.append(_violation(
                    s, "backward edge without forward mirror",
                    label=_label_text(b.label), target=print_term(b.target)))
    return rep


def _label_text(label: Label) -> str:
    from .terms import action_text
    return f"{action_text(label.action)}[{label.key.id}]"


# ---------------------------------------------------------------------------
# Square property

def _with_label(x: Term, env: DefinitionEnv, cfg: EngineConfig,
                want: Transition) -> list[Transition]:
    if want.direction is Dir.FWD:
        return forward_with_label(x, env, want.label.action, want.label.key.id, cfg)
    return [b for b in backward_steps(x, env, cfg) if b.label == want.label]


def check_square(space: StateSpace) -> Report:
    """Coinitial independent pairs commute to a common configuration."""
    env, cfg = space.env, space.config
    rep = Report("square", len(space.states), space.edge_count(),
                 truncated=space.truncated)
    for s, info in space.states.items():
        ts = info.fwd + info.bk
        for i in range(len(ts)):
            for j in range(i + 1, len(ts)):
                t, u = ts[i], ts[j]
                try:
                    if conflicting(t, u):
                        continue
                except FccShapeError as e:
                    rep.violations.append(_violation(
                        s, "fcc undefined on coinitial communication targets",
                        labels=[_label_text(t.label), _label_text(u.label)],
                        error=str(e)))
                    continue
                closures_t = _with_label(t.target, env, cfg, u)
                closures_u = _with_label(u.target, env, cfg, t)
                if not any(fold_constants(a.target, env) == fold_constants(b.target, env)
                           for a in closures_t for b in closures_u):
                    rep.violations.append(_violation(
                        s, "independent pair does not close a square",
                        labels=[_label_text(t.label), _label_text(u.label)]))
    return rep


# ---------------------------------------------------------------------------
# BTI and backward exclusivity

def check_bti(space: StateSpace) -> Report:
    rep = Report("bti", len(space.states), space.edge_count(),
                 truncated=space.truncated)
    for s, info in space.states.items():
        for i in range(len(info.bk)):
            for j in range(i + 1, len(info.bk)):
                if conflicting(info.bk[i], info.bk[j]):
                    rep.violations.append(_violation(
                        s, "coinitial backward transitions in conflict",
                        labels=[_label_text(info.bk[i].label),
                                _label_text(info.bk[j].label)]))
        has_sigma = any(isinstance(b.label.action, Sigma) for b in info.bk)
        has_comm = any(not isinstance(b.label.action, Sigma) for b in info.bk)
        if has_sigma and has_comm:
            rep.violations.append(_violation(
                s, "backward sigma and communication co-enabled"))
    return rep


# ---------------------------------------------------------------------------
# Well-foundedness

def check_wf(space: StateSpace) -> Report:
    rep = Report("wf", len(space.states), space.edge_count(),
                 truncated=space.truncated)
    for s, info in space.states.items():
        have = keys_of(s)
        for b in info.bk:
            if keys_of(b.target) != have - {b.label.key}:
                rep.violations.append(_violation(
                    s, "backward step does not remove exactly its key",
                    label=_label_text(b.label)))
        for t in info.fwd:
            if keys_of(t.target) != have | {t.label.key}:
                rep.violations.append(_violation(
                    s, "forward step does not add exactly its key",
                    label=_label_text(t.label)))
    return rep


# ---------------------------------------------------------------------------
# Total order on time keys

def check_time_total_order(space: StateSpace) -> Report:
    rep = Report("order", len(space.states), space.edge_count(),
                 truncated=space.truncated)
    for s in space.states:
        order = key_order(s)
        if not order.time_total():
            ts = order.time_keys()
            bad = [(a, b) for idx, a in enumerate(ts) for b in ts[idx + 1:]
                   if not (order.le(a, b) or order.le(b, a))]
            rep.violations.append(_violation(
                s, "time keys not totally ordered", pairs=bad))
    return rep


# ---------------------------------------------------------------------------
# Embedding checks (every explored edge)

def check_embeddings(space: StateSpace) -> Report:
    """Per-edge transfer properties of phi_h and phi_t, plus commutation."""
    env, cfg = space.env, space.config
    env_t = time_forgotten_env(env)
    rep = Report("embeddings", len(space.states), space.edge_count(),
                 truncated=space.truncated)

    def ft(x: Term) -> Term:
        return fold_constants(forget_time(x), env_t)

    def fh(x: Term) -> Term:
        return fold_constants(forget_history(x), env)

    for s, info in space.states.items():
        h = forget_history(s)
        tmoves = tpl_steps(h, env)
        # converse of the TPL embedding: every TPL move is matched
        for (a, q) in tmoves:
            if not any(t.label.action == a and fh(t.target) == fold_constants(q, env)
                       for t in info.fwd):
                rep.violations.append(_violation(
                    s, "TPL move unmatched by the configuration",
                    action=print_term(q)))
        for t in info.fwd:
            # phi_h image transition exists in TPL
            if not any(a == t.label.action and fold_constants(q, env) == fh(t.target)
                       for (a, q) in tmoves):
                rep.violations.append(_violation(
                    s, "phi_h image of a forward edge missing in TPL",
                    label=_label_text(t.label)))
            # phi_t clauses
            if isinstance(t.label.action, Sigma):
                if ft(s) != ft(t.target):
                    rep.violations.append(_violation(
                        s, "sigma step changed the time-forgotten image",
                        label=_label_text(t.label)))
            else:
                hits = ccsk_fwd_with_key(forget_time(s), env_t,
                                         t.label.action, t.label.key.id)
                if not any(fold_constants(hit, env_t) == ft(t.target) for hit in hits):
                    rep.violations.append(_violation(
                        s, "phi_t image of a forward edge missing in CCSK",
                        label=_label_text(t.label)))
        for b in info.bk:
            if isinstance(b.label.action, Sigma):
                if ft(s) != ft(b.target):
                    rep.violations.append(_violation(
                        s, "backward sigma changed the time-forgotten image",
                        label=_label_text(b.label)))
            else:
                hits = [tgt for (a, j, tgt) in ccsk_steps_bk(forget_time(s), env_t)
                        if a == b.label.action and j == b.label.key.id]
                if not any(fold_constants(hit, env_t) == ft(b.target) for hit in hits):
                    rep.violations.append(_violation(
                        s, "phi_t image of a backward edge missing in CCSK",
                        label=_label_text(b.label)))
    return rep


def check_commute(space: StateSpace) -> Report:
    """phi_h(phi_t(X)) = phi_t(phi_h(X)) pointwise.

    Known to fail on reachable configurations holding a fired timeout whose
    selected branch has not yet communicated (e.g. `[p.a.0](b.0)@R[0]`):
    phi_t forgets that the timeout fired while phi_h keeps only the selected
    branch, and both maps are forced by their embedding theorems. See the
    decisions ledger; the test suite documents the witness.
    """
    rep = Report("commute", len(space.states), space.edge_count(),
                 truncated=space.truncated)
    for s in space.states:
        if forget_history(forget_time(s)) != forget_time(forget_history(s)):
            rep.violations.append(_violation(s, "forgetting maps do not commute"))
    return rep


# ---------------------------------------------------------------------------
# The synch oracle

def check_synch_oracle(space: StateSpace) -> Report:
    from .semantics import can_tau
    from .terms import Tau
    rep = Report("synch", len(space.states), space.edge_count(),
                 truncated=space.truncated)
    for s, info in space.states.items():
        enumerated = any(isinstance(t.label.action, Tau) for t in info.fwd)
        if can_tau(s, space.env) != enumerated:
            rep.violations.append(_violation(
                s, "synch-based can_tau disagrees with enumeration",
                synch=can_tau(s, space.env), enumerated=enumerated))
    return rep


# ---------------------------------------------------------------------------
# Paths, the Parabolic Lemma, causal equivalence

@dataclass(frozen=True)
class Path:
    source: Term
    steps: tuple[Transition, ...]

    def __post_init__(self):
        at = self.source
        for t in self.steps:
            if t.source != at:
                raise ValueError("path steps do not compose")
            at = t.target

    @property
    def target(self) -> Term:
        return self.steps[-1].target if self.steps else self.source

    def __len__(self) -> int:
        return len(self.steps)

    def labels(self) -> tuple[str, ...]:
        return tuple(("" if t.direction is Dir.FWD else "~") + _label_text(t.label)
                     for t in self.steps)


class ParabolicFailure(Exception):
    """A fwd/bk adjacency that neither cancels nor swaps: a PL counterexample."""


def parabolic_normalize(path: Path, env: DefinitionEnv,
                        config: EngineConfig = DEFAULT_CONFIG) -> Path:
    """Rewrite a path into backward-then-forward form.

    Repeatedly cancels adjacent do/undo pairs and swaps forward-then-backward
    adjacencies through the square property. The result is coinitial and
    cofinal with the input (in the fold-normalized LTS) and no longer; a
    stuck adjacency falsifies the Parabolic Lemma and raises
    :class:`ParabolicFailure`.
    """
    path = fold_path(path, env)
    steps = list(path.steps)
    while True:
        # cancellations first: they strictly shorten
        cancelled = False
        for m in range(len(steps) - 1):
            if steps[m + 1].inverse_of(steps[m]):
                del steps[m:m + 2]
                cancelled = True
                break
        if cancelled:
            continue
        swap_at = next((m for m in range(len(steps) - 1)
                        if steps[m].direction is Dir.FWD
                        and steps[m + 1].direction is Dir.BK), None)
        if swap_at is None:
            return Path(path.source, tuple(steps))
        t, u = steps[swap_at], steps[swap_at + 1]
        found = None
        for s0 in _with_label_folded(t.source, env, config, u):
            for t2 in _with_label_folded(s0.target, env, config, t):
                if t2.target == u.target:
                    found = (s0, t2)
                    break
            if found:
                break
        if found is None:
            raise ParabolicFailure(
                f"cannot swap {_label_text(t.label)} with undo of "
                f"{_label_text(u.label)} at {print_term(t.source)}")
        steps[swap_at:swap_at + 2] = list(found)


def random_paths(root: Term, env: DefinitionEnv, *, count: int, length: int,
                 seed: int, config: EngineConfig = DEFAULT_CONFIG) -> list[Path]:
    """Seeded random forward/backward walks from a standard root."""
    rng = random.Random(seed)
    start = fold_constants(root, env)
    out = []
    for _ in range(count):
        at = start
        alloc = KeyAllocator(max_key(root) + 1)
        steps: list[Transition] = []
        for _ in range(length):
            options = forward_steps(at, env, alloc, config) + \
                backward_steps(at, env, config)
            if not options:
                break
            t = _fold_transition(rng.choice(options), env)
            steps.append(t)
            at = t.target
        out.append(Path(start, tuple(steps)))
    return out


def is_parabolic(path: Path) -> bool:
    seen_fwd = False
    for t in path.steps:
        if t.direction is Dir.FWD:
            seen_fwd = True
        elif seen_fwd:
            return False
    return True


# -- causal equivalence ------------------------------------------------------

def _fold_transition(t: Transition, env: DefinitionEnv) -> Transition:
    """Project a transition into the fold-normalized LTS."""
    return Transition(t.direction, t.label, fold_constants(t.source, env),
                      fold_constants(t.target, env), t.rule)


def fold_path(path: Path, env: DefinitionEnv) -> Path:
    return Path(fold_constants(path.source, env),
                tuple(_fold_transition(t, env) for t in path.steps))


def _with_label_folded(x: Term, env: DefinitionEnv, cfg: EngineConfig,
                       want: Transition) -> list[Transition]:
    return [_fold_transition(t, env) for t in _with_label(x, env, cfg, want)]


def _rewrites(path: tuple[Transition, ...], env: DefinitionEnv,
              config: EngineConfig) -> list[tuple[Transition, ...]]:
    """One-step neighbours under cancellation and independent swaps."""
    out = []
    for m in range(len(path) - 1):
        t, u = path[m], path[m + 1]
        if u.inverse_of(t):
            out.append(path[:m] + path[m + 2:])
        try:
            swappable = False
            for s0 in _with_label_folded(t.source, env, config, u):
                if conflicting(t, s0):
                    continue
                for t2 in _with_label_folded(s0.target, env, config, t):
                    if t2.target == u.target:
                        out.append(path[:m] + (s0, t2) + path[m + 2:])
                        swappable = True
                        break
                if swappable:
                    break
        except FccShapeError:
            pass
    return out


@dataclass(frozen=True)
class CcResult:
    equivalent: bool
    inconclusive: bool
    explored: int


def check_causal_equivalence(chi: Path, omega: Path, env: DefinitionEnv,
                             budget: int = 50000,
                             config: EngineConfig = DEFAULT_CONFIG) -> CcResult:
    """Bounded search for a common form of two coinitial, cofinal paths.

    Meet-in-the-middle breadth-first search over the rewrite relation
    (cancel adjacent do/undo pairs, swap adjacent independent steps);
    insertions of do/undo pairs on one side appear as deletions on the
    other, which is how causal-consistency witnesses are shaped.
    """
    chi = fold_path(chi, env)
    omega = fold_path(omega, env)
    if chi.source != omega.source or chi.target != omega.target:
        raise ValueError("paths must be coinitial and cofinal")
    sides = [{chi.steps}, {omega.steps}]
    frontiers = [deque([chi.steps]), deque([omega.steps])]
    explored = 0
    if chi.steps == omega.steps:
        return CcResult(True, False, 0)
    while any(frontiers) and explored < budget:
        side = 0 if len(frontiers[0]) <= len(frontiers[1]) and frontiers[0] else 1
        if not frontiers[side]:
            side = 1 - side
        cur = frontiers[side].popleft()
        for nxt in _rewrites(cur, env, config):
            if nxt in sides[side]:
                continue
            explored += 1
            if nxt in sides[1 - side]:
                return CcResult(True, False, explored)
            sides[side].add(nxt)
            frontiers[side].append(nxt)
    return CcResult(False, True, explored) if explored >= budget else \
        CcResult(False, False, explored)


# -- path enumeration for the causal-consistency suite -----------------------

def enumerate_paths(root: Term, env: DefinitionEnv, length: int,
                    config: EngineConfig = DEFAULT_CONFIG,
                    limit: int | None = None) -> list[Path]:
    """All paths from `root` up to `length`, with a monotone key discipline."""
    out: list[Path] = []
    start = fold_constants(root, env)

    def extend(at: Term, next_key: int, acc: tuple[Transition, ...]) -> None:
        out.append(Path(start, acc))
        if len(acc) >= length or (limit is not None and len(out) > limit):
            return
        alloc = KeyAllocator(next_key)
        for raw in forward_steps(at, env, alloc, config) + backward_steps(at, env, config):
            t = _fold_transition(raw, env)
            extend(t.target, max(next_key, t.label.key.id + 1), acc + (t,))

    extend(start, max_key(root) + 1, ())
    if limit is not None and len(out) > limit:
        raise RuntimeError(f"path enumeration exceeded {limit}")
    return out


def rename_path_keys(path: Path, mapping: dict[int, int]) -> Path:
    steps = tuple(
        Transition(t.direction,
                   Label(t.label.action,
                         type(t.label.key)(mapping.get(t.label.key.id, t.label.key.id),
                                           t.label.key.kind)),
                   rename_keys(t.source, mapping), rename_keys(t.target, mapping),
                   t.rule)
        for t in path.steps)
    return Path(rename_keys(path.source, mapping), steps)


def align_cofinal(a: Path, b: Path, env: DefinitionEnv) -> Path | None:
    """Rename b's keys so its endpoint equals a's (None if impossible).

    Endpoints that agree up to a key bijection are joined through it;
    interior keys (introduced and undone within b) go to fresh ids. Key
    renaming is an LTS automorphism, so the result is a valid path.
    """
    from .semantics import canonicalize_keys_with_map

    if a.target == b.target:
        return b
    fa = fold_constants(a.target, env)
    fb = fold_constants(b.target, env)
    _, ma = canonicalize_keys_with_map(fa)
    _, mb = canonicalize_keys_with_map(fb)
    inv_a = {v: k for k, v in ma.items()}
    if set(mb.values()) != set(inv_a):
        return None
    mapping = {k: inv_a[c] for k, c in mb.items()}
    fresh = max([max_key(a.target), max_key(b.target),
                 *(t.label.key.id for t in a.steps),
                 *(t.label.key.id for t in b.steps), -1]) + 1
    for t in b.steps:
        k = t.label.key.id
        if k not in mapping:
            mapping[k] = fresh
            fresh += 1
    renamed = rename_path_keys(b, mapping)
    return renamed if renamed.target == a.target else None


def cofinal_pairs(paths: list[Path], env: DefinitionEnv
                  ) -> list[tuple[Path, Path]]:
    """Coinitial-cofinal pairs, joining endpoints up to canonical key renaming."""
    groups: dict[Term, list[Path]] = {}
    for p in paths:
        groups.setdefault(canon_state(p.target, env), []).append(p)
    pairs: list[tuple[Path, Path]] = []
    for group in groups.values():
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                a, b = group[i], group[j]
                if a.steps == b.steps:
                    continue
                aligned = align_cofinal(a, b, env)
                if aligned is not None:
                    pairs.append((a, aligned))
    return pairs


def check_cc_space(root: Term, env: DefinitionEnv, length: int = 5,
                   budget: int = 50000,
                   config: EngineConfig = DEFAULT_CONFIG) -> Report:
    """Causal consistency over all coinitial-cofinal path pairs up to `length`.

    Within each endpoint class every path is proven equivalent to a chosen
    representative; all pairs then follow because causal equivalence is an
    equivalence relation. `edges` counts the pairs covered this way.
    """
    rep = Report("cc", 0, 0)
    paths = enumerate_paths(root, env, length, config)
    rep.states = len(paths)
    groups: dict[Term, list[Path]] = {}
    for p in paths:
        groups.setdefault(canon_state(p.target, env), []).append(p)
    for group in groups.values():
        rep.edges += len(group) * (len(group) - 1) // 2
        base = min(group, key=len)
        for other in group:
            if other is base:
                continue
            aligned = align_cofinal(base, other, env)
            if aligned is None:
                rep.violations.append({"what": "endpoints do not align",
                                       "chi": list(base.labels()),
                                       "omega": list(other.labels())})
                continue
            res = check_causal_equivalence(base, aligned, env, budget, config)
            if res.inconclusive:
                rep.inconclusive += 1
            elif not res.equivalent:
                rep.violations.append({"what": "no common form found",
                                       "chi": list(base.labels()),
                                       "omega": list(aligned.labels())})
    return rep
