"""Supervisor reduction by control congruences.

The pipeline is: control consistency relation, greedy congruence search,
induced supervisor over the cells, then pruning of every transition, state
and marking of the induced automaton that no supervisor string exercises.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import chain
from typing import Iterable

import numpy as np

from supvkit.core import Automaton, Verdict, trim
from supvkit.errors import NonCongruenceCover
from supvkit.synthesis import Supervisor, SupervisorFlags, control_equivalent


@dataclass(frozen=True, eq=False)
class ConsistencyRelation:
    """Symmetric boolean table of control-consistent supervisor state pairs."""

    table: np.ndarray

    def __call__(self, x: int, y: int) -> bool:
        return bool(self.table[x, y])

    def __len__(self) -> int:
        return self.table.shape[0]

    def pairs(self) -> list[tuple[int, int]]:
        xs, ys = np.nonzero(np.triu(self.table, 1))
        return list(zip(xs.tolist(), ys.tolist()))


def _consistent(flags: SupervisorFlags, x: int, y: int) -> bool:
    if flags.enabled[x] & flags.disabled[y] or flags.enabled[y] & flags.disabled[x]:
        return False
    if flags.marked_in_plant[x] == flags.marked_in_plant[y]:
        return flags.marked_in_sup[x] == flags.marked_in_sup[y]
    return True


def consistency_relation(sup: Supervisor) -> ConsistencyRelation:
    """Evaluate control consistency over all state pairs.

    ``x`` and ``y`` are consistent when neither enables an event the other
    disables, and whenever their plant-marking flags agree their supervisor
    markings agree too.  Pairs with differing plant-marking flags impose no
    marking constraint.
    """
    n = sup.n_states
    table = np.zeros((n, n), dtype=bool)
    for x in range(n):
        table[x, x] = True
        for y in range(x + 1, n):
            table[x, y] = table[y, x] = _consistent(sup.flags, x, y)
    return ConsistencyRelation(table)


@dataclass(frozen=True)
class ControlCover:
    cells: tuple[frozenset[int], ...]

    @property
    def congruence(self) -> bool:
        seen: set[int] = set()
        for cell in self.cells:
            if seen & cell:
                return False
            seen |= cell
        return True

    def cell_of(self) -> dict[int, int]:
        if not self.congruence:
            raise NonCongruenceCover("overlapping cells have no unique cell map")
        return {x: i for i, cell in enumerate(self.cells) for x in cell}

    def __len__(self) -> int:
        return len(self.cells)


def check_cover(cover: ControlCover, sup: Supervisor, rel: ConsistencyRelation | None = None) -> Verdict:
    """Re-verify the cover conditions: nonempty consistent cells, closed successors.

    ``info`` names the failing cell and, for closure failures, the event.
    """
    rel = consistency_relation(sup) if rel is None else rel
    a = sup.automaton
    covered = set().union(*cover.cells) if cover.cells else set()
    if covered != set(range(a.n_states)):
        return Verdict(False, info={"uncovered": sorted(set(range(a.n_states)) - covered)})
    for i, cell in enumerate(cover.cells):
        if not cell:
            return Verdict(False, info={"cell": i, "reason": "empty"})
        members = sorted(cell)
        for p, x in enumerate(members):
            for y in members[p + 1:]:
                if not rel(x, y):
                    return Verdict(False, (x, y), {"cell": i, "reason": "inconsistent pair"})
        for label in a.alphabet.labels:
            targets = {a.delta[x][label] for x in cell if label in a.delta[x]}
            if targets and not any(targets <= other for other in cover.cells):
                return Verdict(False, None, {"cell": i, "event": label, "reason": "successors split"})
    return Verdict(True)


class _Partition:
    """Disjoint cells with cheap copy for tentative merges."""

    def __init__(self, n: int):
        self.owner = list(range(n))
        self.members: dict[int, list[int]] = {x: [x] for x in range(n)}

    def copy(self) -> "_Partition":
        other = _Partition.__new__(_Partition)
        other.owner = list(self.owner)
        other.members = {k: list(v) for k, v in self.members.items()}
        return other

    def union(self, a: int, b: int) -> int:
        if len(self.members[a]) < len(self.members[b]) or (
            len(self.members[a]) == len(self.members[b]) and b < a
        ):
            a, b = b, a
        for x in self.members[b]:
            self.owner[x] = a
        self.members[a].extend(self.members.pop(b))
        self.members[a].sort()
        return a


def _try_merge(part: _Partition, x: int, y: int, a: Automaton, rel: ConsistencyRelation) -> _Partition | None:
    trial = part.copy()
    waiting = deque([(x, y)])
    labels = a.alphabet.labels
    while waiting:
        p, q = waiting.popleft()
        cp, cq = trial.owner[p], trial.owner[q]
        if cp == cq:
            continue
        left, right = trial.members[cp], trial.members[cq]
        if not rel.table[np.ix_(left, right)].all():
            return None
        cell = trial.union(cp, cq)
        for label in labels:
            targets = [a.delta[z][label] for z in trial.members[cell] if label in a.delta[z]]
            for t in targets[1:]:
                if trial.owner[t] != trial.owner[targets[0]]:
                    waiting.append((targets[0], t))
    return trial


def build_congruence(
    sup: Supervisor,
    rel: ConsistencyRelation | None = None,
    *,
    prefer: Iterable[str] = (),
) -> ControlCover:
    """Greedy control congruence.

    Candidate pairs come in three passes: the endpoints of every transition
    labelled by an event in ``prefer``, then the endpoints of all other
    transitions (both in transition order), so that merges which turn edges
    into self-loops get priority, and finally all remaining pairs in
    lexicographic order.  Each tentative merge propagates the successor merges it forces and is rolled back as a whole
    if any forced merge would join inconsistent states.  Cells are numbered
    by first visit in a breadth-first walk of the supervisor.
    """
    rel = consistency_relation(sup) if rel is None else rel
    a = sup.automaton
    n = a.n_states
    part = _Partition(n)
    prefer = set(prefer)
    edges = [(min(x, y), max(x, y)) for x, _, y in a.transitions() if x != y]
    preferred = [(min(x, y), max(x, y)) for x, e, y in a.transitions() if x != y and e in prefer]
    lexicographic = ((x, y) for x in range(n) for y in range(x + 1, n))
    for x, y in chain(preferred, edges, lexicographic):
        if part.owner[x] == part.owner[y] or not rel.table[x, y]:
            continue
        merged = _try_merge(part, x, y, a, rel)
        if merged is not None:
            part = merged
    order: list[int] = []
    if n:
        seen = {a.initial}
        queue = deque([a.initial])
        while queue:
            x = queue.popleft()
            if part.owner[x] not in order:
                order.append(part.owner[x])
            for label in a.alphabet.labels:
                y = a.delta[x].get(label)
                if y is not None and y not in seen:
                    seen.add(y)
                    queue.append(y)
        order += sorted(set(part.owner) - set(order))
    return ControlCover(tuple(frozenset(part.members[r]) for r in order))


def induce(sup: Supervisor, cover: ControlCover) -> Automaton:
    """Induced supervisor over the cells of a control congruence.

    Cell ``i`` moves to cell ``j`` on an event when some member moves into
    ``j`` and every member defining the event does.  State ``i`` of the
    result is cell ``i`` of ``cover``.
    """
    a = sup.automaton
    if not cover.congruence:
        raise NonCongruenceCover("induced supervisors are only built from congruences")
    cell_of = cover.cell_of()
    if a.is_empty():
        return Automaton.empty(a.alphabet)
    rows: list[dict[str, int]] = [dict() for _ in cover.cells]
    for i, cell in enumerate(cover.cells):
        for x in sorted(cell):
            for label, y in a.delta[x].items():
                j = cell_of[y]
                if rows[i].setdefault(label, j) != j:
                    raise ValueError(f"cell {i} splits on event {label!r}: not a control cover")
    marked = frozenset(i for i, cell in enumerate(cover.cells) if cell & a.marked)
    return Automaton(a.alphabet, len(cover.cells), cell_of[a.initial], marked, tuple(rows))


def _exercise(r: Automaton, sup: Automaton):
    """Walk the reachable product of SUP and ``r``.

    Returns the reached ``r`` states, the exercised ``r`` transitions, the
    ``r`` states reached by marked supervisor strings, and parent pointers
    for witness strings.
    """
    reached: set[int] = set()
    used: set[tuple[int, str]] = set()
    marked_hits: set[int] = set()
    parent: dict = {}
    if sup.is_empty() or r.is_empty():
        return reached, used, marked_hits, parent
    start = (sup.initial, r.initial)
    parent[start] = None
    queue = deque([start])
    while queue:
        x, z = queue.popleft()
        reached.add(z)
        if x in sup.marked:
            marked_hits.add(z)
        for label in sup.enabled(x):
            nz = r.delta[z].get(label)
            if nz is None:
                continue
            used.add((z, label))
            nxt = (sup.delta[x][label], nz)
            if nxt not in parent:
                parent[nxt] = ((x, z), label)
                queue.append(nxt)
    return reached, used, marked_hits, parent


def _normal_part(j: Automaton, sup: Automaton) -> tuple[Automaton, dict[int, int]]:
    reached, used, marked_hits, _ = _exercise(j, sup)
    if not reached:
        return Automaton.empty(j.alphabet), {}
    keep = sorted(reached)
    rows = [dict() for _ in range(j.n_states)]
    for z in keep:
        for label, nz in j.delta[z].items():
            if (z, label) in used:
                rows[z][label] = nz
    marked = (j.marked & marked_hits)
    pruned = Automaton(j.alphabet, j.n_states, j.initial, frozenset(marked), tuple(rows))
    result = trim(pruned)
    # trim renumbers breadth-first; recover the map by a joint walk
    mapping = {pruned.initial: result.initial} if not result.is_empty() else {}
    queue = deque(mapping.items())
    while queue:
        z, w = queue.popleft()
        for label, nz in result.delta[w].items():
            oz = pruned.delta[z][label]
            if oz not in mapping:
                mapping[oz] = nz
                queue.append((oz, nz))
    return result, mapping


def enforce_normality(j: Automaton, sup: Supervisor | Automaton) -> Automaton:
    """Drop states, transitions and markings of ``j`` not exercised by SUP.

    Transitions survive only when some supervisor string takes them, states
    only when reached, markings only when reached by a marked supervisor
    string; the result is re-trimmed.
    """
    sup_aut = sup.automaton if isinstance(sup, Supervisor) else sup
    return _normal_part(j, sup_aut)[0]


def check_rsup_normality(r: Automaton, sup: Supervisor | Automaton) -> Verdict:
    """Check the three normality clauses of ``r`` with respect to SUP.

    ``info`` on failure is a dict naming the clause (``"reach"``,
    ``"transition"`` or ``"marking"``) and the offending state/event.
    """
    sup_aut = sup.automaton if isinstance(sup, Supervisor) else sup
    if r.is_empty():
        return Verdict(True)
    reached, used, marked_hits, _ = _exercise(r, sup_aut)
    for z in range(r.n_states):
        if z not in reached:
            return Verdict(False, info={"clause": "reach", "state": z})
    for z, label, _ in r.transitions():
        if (z, label) not in used:
            return Verdict(False, info={"clause": "transition", "state": z, "event": label})
    for z in sorted(r.marked):
        if z not in marked_hits:
            return Verdict(False, info={"clause": "marking", "state": z})
    return Verdict(True)


@dataclass(frozen=True, eq=False)
class ReducedSupervisor:
    automaton: Automaton
    cover: ControlCover
    cell_of: dict[int, int]
    sup: Supervisor

    @property
    def n_states(self) -> int:
        return self.automaton.n_states


def supreduce(
    sup: Supervisor, *, prefer: Iterable[str] = (), verify: bool = True
) -> ReducedSupervisor:
    """Reduce ``sup`` and return the normal, control-equivalent reduced supervisor.

    With ``verify`` set, control equivalence and normality of the output are
    re-checked and a failure raises ``RuntimeError``.

    ``prefer`` names events (typically the unobservable ones) whose
    transitions the congruence search tries to turn into self-loops first.
    ``cell_of`` maps every supervisor state to its reduced state.
    """
    rel = consistency_relation(sup)
    cover = build_congruence(sup, rel, prefer=prefer)
    j = induce(sup, cover)
    rsup, mapping = _normal_part(j, sup.automaton)
    cells = cover.cell_of()
    cell_of = {x: mapping[cells[x]] for x in range(sup.n_states) if cells[x] in mapping}
    if verify and not sup.is_empty():
        eq = control_equivalent(rsup, sup, sup.plant)
        if not eq:
            raise RuntimeError(f"reduced supervisor is not control equivalent: {eq.witness}")
        normal = check_rsup_normality(rsup, sup)
        if not normal:
            raise RuntimeError(f"reduced supervisor is not normal: {normal.info}")
    return ReducedSupervisor(rsup, cover, cell_of, sup)


__all__ = [
    "ConsistencyRelation",
    "ControlCover",
    "ReducedSupervisor",
    "build_congruence",
    "check_cover",
    "check_rsup_normality",
    "consistency_relation",
    "enforce_normality",
    "induce",
    "supreduce",
]
