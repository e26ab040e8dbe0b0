"""Supremal controllable sublanguage synthesis and supervisor bookkeeping."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable

from supvkit.core import (
    Automaton,
    ObservationMask,
    Verdict,
    _require_same_alphabet,
    _trace,
    language_equal,
    live_states,
    meet,
    meet_with_pairs,
    restrict_with_map,
    subautomaton,
    trim,
)
from supvkit.errors import AlphabetMismatch, NotSubbehavior


@dataclass(frozen=True)
class SupervisorFlags:
    """Per-state control data of a supervisor evaluated against a plant.

    For supervisor state ``x``: ``enabled[x]`` is E(x), the events defined at
    ``x``; ``disabled[x]`` is D(x), events undefined at ``x`` but defined at
    some plant state paired with ``x``; ``marked_in_sup[x]`` is M(x);
    ``marked_in_plant[x]`` is T(x), true when some paired plant state is
    marked.
    """

    enabled: tuple[frozenset[str], ...]
    disabled: tuple[frozenset[str], ...]
    marked_in_sup: tuple[bool, ...]
    marked_in_plant: tuple[bool, ...]
    plant_states: tuple[frozenset[int], ...]

    def __len__(self) -> int:
        return len(self.enabled)


@dataclass(frozen=True, eq=False)
class Supervisor:
    """A supervisor recognizer together with its plant and control flags."""

    automaton: Automaton
    plant: Automaton
    flags: SupervisorFlags

    @property
    def plant_pairing(self) -> tuple[frozenset[int], ...]:
        return self.flags.plant_states

    def is_empty(self) -> bool:
        return self.automaton.is_empty()

    @property
    def n_states(self) -> int:
        return self.automaton.n_states


def compute_flags(sup: Automaton, plant: Automaton) -> SupervisorFlags:
    """Evaluate E, D, M and T for every state of ``sup`` against ``plant``.

    Pairings come from the reachable part of the product of ``sup`` and
    ``plant``; raises :class:`NotSubbehavior` (with the offending string in
    the message) when L(sup) is not contained in L(plant).
    """
    n = sup.n_states
    pairing: list[set[int]] = [set() for _ in range(n)]
    if n:
        if plant.is_empty():
            raise NotSubbehavior("the plant is empty but the supervisor is not")
        start = (sup.initial, plant.initial)
        parent: dict = {start: None}
        queue = deque([start])
        while queue:
            x, q = queue.popleft()
            pairing[x].add(q)
            for label in sup.enabled(x):
                q2 = plant.delta[q].get(label)
                if q2 is None:
                    s = ",".join(_trace(parent, (x, q)) + (label,))
                    raise NotSubbehavior(f"supervisor string {s} is not generated by the plant")
                nxt = (sup.delta[x][label], q2)
                if nxt not in parent:
                    parent[nxt] = ((x, q), label)
                    queue.append(nxt)
    enabled = []
    disabled = []
    for x in range(n):
        e = frozenset(sup.delta[x])
        plant_defined = set()
        for q in pairing[x]:
            plant_defined.update(plant.delta[q])
        enabled.append(e)
        disabled.append(frozenset(plant_defined - e))
    return SupervisorFlags(
        enabled=tuple(enabled),
        disabled=tuple(disabled),
        marked_in_sup=tuple(x in sup.marked for x in range(n)),
        marked_in_plant=tuple(any(q in plant.marked for q in pairing[x]) for x in range(n)),
        plant_states=tuple(frozenset(p) for p in pairing),
    )


def make_supervisor(sup: Automaton, plant: Automaton) -> Supervisor:
    """Wrap an externally supplied recognizer as a :class:`Supervisor`."""
    return Supervisor(sup, plant, compute_flags(sup, plant))


def supcon(plant: Automaton, spec: Automaton) -> Supervisor:
    """Recognizer of the supremal controllable sublanguage of Lm(plant) & Lm(spec).

    ``spec`` must already be over the plant's alphabet; lift sub-alphabet
    specifications with :func:`supvkit.observation.inverse_project` first.
    Each pass deletes every product state where an uncontrollable event is
    defined in the plant but not in the product, then re-trims, until no
    such state remains.

    >>> from supvkit.core import Alphabet
    >>> sigma = Alphabet.from_pairs([("a", False)])
    >>> g = Automaton.build(sigma, 2, 0, [0, 1], [(0, "a", 1)])
    >>> e = Automaton.build(sigma, 1, 0, [0], [])
    >>> supcon(g, e).is_empty()
    True
    """
    _require_same_alphabet(plant, spec)
    product, pairs = meet_with_pairs(plant, spec)
    uncontrollable = plant.alphabet.uncontrollable
    alive = live_states(product)
    while True:
        bad = set()
        for i in alive:
            g = pairs[i][0]
            for label in uncontrollable:
                if label in plant.delta[g]:
                    j = product.delta[i].get(label)
                    if j is None or j not in alive:
                        bad.add(i)
                        break
        if not bad:
            break
        alive = live_states(product, alive - bad)
    result, _ = restrict_with_map(product, alive)
    return make_supervisor(result, plant)


def is_controllable(sup: Automaton, plant: Automaton) -> Verdict:
    """Check that no uncontrollable plant event is ever disabled by ``sup``.

    The witness is a string ``s`` of L(sup) followed by the uncontrollable
    event it blocks.
    """
    if sup.is_empty():
        return Verdict(True)
    uncontrollable = plant.alphabet.sort(plant.alphabet.uncontrollable)
    start = (sup.initial, plant.initial)
    parent: dict = {start: None}
    queue = deque([start])
    while queue:
        x, q = queue.popleft()
        for label in uncontrollable:
            if label in plant.delta[q] and label not in sup.delta[x]:
                return Verdict(False, _trace(parent, (x, q)) + (label,))
        for label in sup.enabled(x):
            q2 = plant.delta[q].get(label)
            if q2 is None:
                continue
            nxt = (sup.delta[x][label], q2)
            if nxt not in parent:
                parent[nxt] = ((x, q), label)
                queue.append(nxt)
    return Verdict(True)


def _as_automaton(x: Automaton | Supervisor) -> Automaton:
    return x.automaton if isinstance(x, Supervisor) else x


def control_equivalent(
    cand: Automaton, sup: Automaton | Supervisor, plant: Automaton
) -> Verdict:
    """Decide Lm(G) & Lm(cand) = Lm(SUP) and L(G) & L(cand) = L(SUP)."""
    sup = _as_automaton(sup)
    if set(cand.alphabet.labels) != set(plant.alphabet.labels):
        raise AlphabetMismatch("candidate and plant alphabets differ")
    return language_equal(meet(plant, cand), sup)


def projected_control_equivalent(
    cand: Automaton,
    sup: Automaton | Supervisor,
    plant: Automaton,
    mask: ObservationMask,
) -> Verdict:
    """Control equivalence of the projected supervisors, lifted back to the plant.

    Compares ``G & P^-1(P(cand))`` with ``G & P^-1(P(sup))`` on both the
    closed and the marked behaviour.
    """
    from supvkit.observation import inverse_project, project

    sup = _as_automaton(sup)
    for a in (cand, sup):
        if set(a.alphabet.labels) != set(plant.alphabet.labels):
            raise AlphabetMismatch("supervisor and plant alphabets differ")
    full = plant.alphabet
    lifted_cand = inverse_project(project(cand, mask), full)
    lifted_sup = inverse_project(project(sup, mask), full)
    return language_equal(meet(plant, lifted_cand), meet(plant, lifted_sup))


def forbid_states(plant: Automaton, bad: Callable[[int], bool]) -> Automaton:
    """Delete the states satisfying ``bad`` from ``plant`` and trim the rest."""
    keep = [x for x in range(plant.n_states) if not bad(x)]
    return trim(subautomaton(plant, keep))


__all__ = [
    "Supervisor",
    "SupervisorFlags",
    "compute_flags",
    "control_equivalent",
    "forbid_states",
    "is_controllable",
    "make_supervisor",
    "projected_control_equivalent",
    "supcon",
]
