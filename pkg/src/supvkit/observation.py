"""Natural projection and the observability family of properties.

Relative observability is decided on a finite look-alike pair structure: a
node ``(k, c, g, k2)`` records the supervisor state ``k`` reached by a string
``s`` of K-bar, and for a partner string ``s'`` of C-bar with the same
projection, its ambient state ``c``, plant state ``g`` and supervisor state
``k2`` (``None`` once ``s'`` has left K-bar).  Observable events advance both
sides, unobservable events advance exactly one.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from supvkit.core import (
    Alphabet,
    Automaton,
    ObservationMask,
    Verdict,
    canonical,
    is_sublanguage,
    language_equal,
    meet,
    minimize,
    trim,
)
from supvkit.errors import ContainmentViolated, NotSubbehavior
from supvkit.synthesis import Supervisor, supcon

MAX_SUPCONROBS_ROUNDS = 1000


def _automaton(x: Automaton | Supervisor) -> Automaton:
    return x.automaton if isinstance(x, Supervisor) else x


def _unobservable_reach(a: Automaton, states: Iterable[int], hidden: list[str]) -> frozenset[int]:
    seen = set(states)
    stack = list(seen)
    while stack:
        x = stack.pop()
        for label in hidden:
            y = a.delta[x].get(label)
            if y is not None and y not in seen:
                seen.add(y)
                stack.append(y)
    return frozenset(seen)


def observer(a: Automaton, mask: ObservationMask) -> tuple[Automaton, list[frozenset[int]]]:
    """Subset construction of ``a`` under ``mask``.

    Returns the projected recognizer over the observable sub-alphabet and the
    state subset behind each of its states.  Subsets are canonicalised as
    sorted index sets and numbered in breadth-first order.
    """
    sub = mask.observable_alphabet()
    if a.is_empty():
        return Automaton.empty(sub), []
    hidden = [e for e in a.alphabet.labels if e not in mask.observable]
    visible = [e for e in a.alphabet.labels if e in mask.observable]
    start = _unobservable_reach(a, [a.initial], hidden)
    subsets = [start]
    index = {start: 0}
    queue = deque([start])
    rows: list[dict[str, int]] = []
    while queue:
        cur = queue.popleft()
        row = {}
        for label in visible:
            nxt = {a.delta[x][label] for x in sorted(cur) if label in a.delta[x]}
            if not nxt:
                continue
            nxt = _unobservable_reach(a, nxt, hidden)
            if nxt not in index:
                index[nxt] = len(subsets)
                subsets.append(nxt)
                queue.append(nxt)
            row[label] = index[nxt]
        rows.append(row)
    marked = frozenset(i for i, s in enumerate(subsets) if s & a.marked)
    return Automaton(sub, len(subsets), 0, marked, tuple(rows)), subsets


def project(a: Automaton | Supervisor, mask: ObservationMask, *, minimal: bool = False) -> Automaton:
    """Deterministic recognizer of P(L(a)) and P(Lm(a)).

    A subset state is marked iff it contains a marked state.  With
    ``minimal=True`` the result is also state-minimised.
    """
    result, _ = observer(_automaton(a), mask)
    return minimize(result) if minimal else result


def inverse_project(a: Automaton, full: Alphabet) -> Automaton:
    """Self-loop every event of ``full`` missing from ``a``'s alphabet.

    The result recognizes the inverse projections of L(a) and Lm(a).
    """
    extra = [ev for ev in full.events if ev.label not in a.alphabet]
    for ev in a.alphabet.events:
        if ev.label not in full:
            raise ValueError(f"event {ev.label!r} is not in the target alphabet")
        if full.is_controllable(ev.label) != ev.controllable:
            raise ValueError(f"event {ev.label!r} changes controllability")
    if a.is_empty():
        return Automaton.empty(full)
    rows = []
    for row in a.delta:
        new = dict(row)
        for ev in extra:
            new[ev.label] = len(rows)
        rows.append(new)
    return Automaton(full, a.n_states, a.initial, a.marked, tuple(rows))


def lift(spec: Automaton, full: Alphabet) -> Automaton:
    """Alias of :func:`inverse_project` used when preparing specifications."""
    return inverse_project(spec, full)


@dataclass(frozen=True)
class UncertaintyReport:
    """Uncertainty sets of a supervisor and the look-alike state pairs they induce."""

    sets: tuple[frozenset[int], ...]
    pairs: frozenset[tuple[int, int]]

    def contains_pair(self, x: int, y: int) -> bool:
        return (min(x, y), max(x, y)) in self.pairs


def uncertainty_sets(sup: Automaton | Supervisor, mask: ObservationMask) -> UncertaintyReport:
    """Every U(s) over the supervisor and all unordered co-resident state pairs."""
    _, subsets = observer(_automaton(sup), mask)
    pairs = set()
    for s in subsets:
        members = sorted(s)
        for i, x in enumerate(members):
            for y in members[i + 1:]:
                pairs.add((x, y))
    return UncertaintyReport(tuple(subsets), frozenset(pairs))


@dataclass(frozen=True)
class ObservationWitness:
    """A violating look-alike pair.

    ``condition`` is ``"enablement"`` when ``s + event`` is in K-bar, ``s'``
    in C-bar and ``s' + event`` in L(G) but not in K-bar; it is
    ``"marking"`` when ``s`` is in K and ``s'`` in C-bar & Lm(G) but not in K
    (``event`` is then ``None``).
    """

    s: tuple[str, ...]
    s_prime: tuple[str, ...]
    event: str | None
    condition: str

    def __str__(self) -> str:
        tail = f", event {self.event}" if self.event is not None else ""
        return (
            f"{self.condition}: s={','.join(self.s) or 'eps'} "
            f"s'={','.join(self.s_prime) or 'eps'}{tail}"
        )


def _pair_trace(parent: dict, node) -> tuple[tuple[str, ...], tuple[str, ...]]:
    left: list[str] = []
    right: list[str] = []
    while parent[node] is not None:
        node, label, side = parent[node]
        if side in ("both", "s"):
            left.append(label)
        if side in ("both", "s'"):
            right.append(label)
    return tuple(reversed(left)), tuple(reversed(right))


def _relative_observability(
    k_aut: Automaton, c_aut: Automaton, plant: Automaton, mask: ObservationMask
) -> Verdict:
    if k_aut.is_empty():
        return Verdict(True)
    labels = k_aut.alphabet.labels
    observable = mask.observable
    start = (k_aut.initial, c_aut.initial, plant.initial, k_aut.initial)
    parent: dict = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        k, c, g, k2 = node
        if (
            k in k_aut.marked
            and g in plant.marked
            and (k2 is None or k2 not in k_aut.marked)
        ):
            s, s2 = _pair_trace(parent, node)
            return Verdict(False, ObservationWitness(s, s2, None, "marking"))
        for label in labels:
            if (
                label in k_aut.delta[k]
                and label in plant.delta[g]
                and (k2 is None or label not in k_aut.delta[k2])
            ):
                s, s2 = _pair_trace(parent, node)
                return Verdict(False, ObservationWitness(s, s2, label, "enablement"))
        for label in labels:
            nk = k_aut.delta[k].get(label)
            nc = c_aut.delta[c].get(label)
            ng = plant.delta[g].get(label) if nc is not None else None
            if ng is None:
                nc = None
            nk2 = k_aut.delta[k2].get(label) if (k2 is not None and nc is not None) else None
            if label in observable:
                if nk is None or nc is None:
                    continue
                moves = [((nk, nc, ng, nk2), "both")]
            else:
                moves = []
                if nk is not None:
                    moves.append(((nk, c, g, k2), "s"))
                if nc is not None:
                    moves.append(((k, nc, ng, nk2), "s'"))
            for nxt, side in moves:
                if nxt not in parent:
                    parent[nxt] = (node, label, side)
                    queue.append(nxt)
    return Verdict(True)


def is_relatively_observable(
    supK: Automaton | Supervisor,
    ambientC: Automaton,
    plant: Automaton,
    mask: ObservationMask,
) -> Verdict:
    """Decide whether K = Lm(supK) is relatively observable w.r.t. C-bar, G and P.

    C is Lm(ambientC) and C-bar its prefix closure.  Raises
    :class:`ContainmentViolated` unless K <= C <= Lm(G).  On failure the
    witness is an :class:`ObservationWitness` found by breadth-first search,
    so it is short and reproducible.
    """
    k_aut = trim(_automaton(supK))
    c_aut = trim(ambientC)
    check = is_sublanguage(k_aut, c_aut, marked=True)
    if not check:
        raise ContainmentViolated(f"K is not contained in C: {','.join(check.witness)}")
    check = is_sublanguage(c_aut, plant, marked=True)
    if not check:
        raise ContainmentViolated(f"C is not contained in Lm(G): {','.join(check.witness)}")
    return _relative_observability(k_aut, c_aut, plant, mask)


def is_observable(supK: Automaton | Supervisor, plant: Automaton, mask: ObservationMask) -> Verdict:
    """Observability of Lm(supK): relative observability with C = K."""
    k_aut = trim(_automaton(supK))
    check = is_sublanguage(k_aut, plant)
    if not check:
        raise NotSubbehavior(f"supervisor string {','.join(check.witness)} is not in L(G)")
    return _relative_observability(k_aut, k_aut, plant, mask)


def is_normal(supK: Automaton | Supervisor, plant: Automaton, mask: ObservationMask) -> Verdict:
    """Decide P^-1 P(K-bar) & L(G) = K-bar.

    The witness is a shortest string of L(G) that looks like a string of
    K-bar but is not in K-bar.
    """
    k_aut = trim(_automaton(supK))
    check = is_sublanguage(k_aut, plant)
    if not check:
        raise NotSubbehavior(f"supervisor string {','.join(check.witness)} is not in L(G)")
    k_closed = k_aut.with_marked(range(k_aut.n_states))
    g_closed = canonical(plant)
    g_closed = g_closed.with_marked(range(g_closed.n_states))
    lifted = inverse_project(project(k_closed, mask), plant.alphabet)
    return language_equal(meet(lifted, g_closed), k_closed)


# -- supremal relatively observable and controllable sublanguage --------------


def _robs_refinement(
    h: Automaton, c_aut: Automaton, plant: Automaton, mask: ObservationMask
) -> tuple[Automaton, bool]:
    """Refine ``h`` by the look-alike partner estimate and prune violations.

    A state of the refinement is ``(h-state, S)`` where ``S`` is the set of
    ``(c, g, h2)`` triples reachable by partner strings with the current
    projection.  Violations depend only on that state, so removing the
    offending event (or the marking) there removes exactly the strings that
    no relatively observable sublanguage may contain.
    """
    labels = h.alphabet.labels
    hidden = [e for e in labels if e not in mask.observable]

    def partner_step(triple, label):
        c, g, h2 = triple
        nc = c_aut.delta[c].get(label)
        if nc is None:
            return None
        ng = plant.delta[g].get(label)
        if ng is None:
            return None
        nh2 = h.delta[h2].get(label) if h2 is not None else None
        return (nc, ng, nh2)

    def close(triples):
        seen = set(triples)
        stack = list(seen)
        while stack:
            t = stack.pop()
            for label in hidden:
                u = partner_step(t, label)
                if u is not None and u not in seen:
                    seen.add(u)
                    stack.append(u)
        return frozenset(seen)

    start = (h.initial, close([(c_aut.initial, plant.initial, h.initial)]))
    nodes = [start]
    index = {start: 0}
    queue = deque([start])
    rows: list[dict[str, int]] = []
    marked = set()
    pruned = False
    while queue:
        hx, est = queue.popleft()
        i = index[(hx, est)]
        if hx in h.marked:
            if any(
                g in plant.marked and (h2 is None or h2 not in h.marked) for _, g, h2 in est
            ):
                pruned = True
            else:
                marked.add(i)
        row = {}
        for label in labels:
            nh = h.delta[hx].get(label)
            if nh is None:
                continue
            if any(
                label in plant.delta[g] and (h2 is None or label not in h.delta[h2])
                for _, g, h2 in est
            ):
                pruned = True
                continue
            if label in mask.observable:
                nest = close(u for t in est if (u := partner_step(t, label)) is not None)
            else:
                nest = est
            nxt = (nh, nest)
            if nxt not in index:
                index[nxt] = len(nodes)
                nodes.append(nxt)
                queue.append(nxt)
            row[label] = index[nxt]
        rows.append(row)
    refined = Automaton(h.alphabet, len(nodes), 0, frozenset(marked), tuple(rows))
    return refined, pruned


def supconrobs(
    plant: Automaton,
    spec: Automaton,
    mask: ObservationMask,
    *,
    ambient: str = "moving",
) -> Supervisor:
    """Controllable and relatively observable sublanguage of Lm(G) & Lm(spec).

    Controllability pruning and relative-observability pruning alternate
    until neither removes anything.  ``ambient`` chooses the partner
    language C-bar of each observability round:

    ``"moving"`` (default)
        C-bar is the closure of the current candidate, so each round prunes
        observability violations of the candidate against itself.  The
        result is controllable and observable.
    ``"fixed"``
        C-bar stays at the closure of the plain supremal controllable
        sublanguage, giving the supremal sublanguage that is relatively
        observable with respect to it.  Far more conservative: partner
        strings outside the final K still count.
    """
    if ambient not in ("moving", "fixed"):
        raise ValueError(f"unknown ambient mode {ambient!r}")
    first = supcon(plant, spec)
    if first.is_empty():
        return first
    current = first
    for _ in range(MAX_SUPCONROBS_ROUNDS):
        h = minimize(current.automaton)
        c_aut = h if ambient == "moving" else first.automaton
        refined, pruned = _robs_refinement(h, c_aut, plant, mask)
        if not pruned:
            return current
        current = supcon(plant, refined)
        if current.is_empty():
            return current
    raise RuntimeError("supconrobs did not converge")


__all__ = [
    "ObservationWitness",
    "UncertaintyReport",
    "inverse_project",
    "is_normal",
    "is_observable",
    "is_relatively_observable",
    "lift",
    "observer",
    "project",
    "supconrobs",
    "uncertainty_sets",
]
