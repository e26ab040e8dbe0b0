"""Bundled example systems: an industrial transfer line and a two-vehicle guideway.

Both follow the usual convention that odd-numbered events are controllable.
The ambient languages used for relative observability are the synthesized
supervisors' languages extended by a few named look-alike strings, each
completed by a shortest marked plant continuation.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from supvkit.core import Alphabet, Automaton, ObservationMask, sync, trim
from supvkit.observation import inverse_project, supconrobs
from supvkit.synthesis import Supervisor, forbid_states, supcon

TRANSFER_LINE_EVENTS = ("1", "2", "3", "4", "5", "6", "8")
GUIDEWAY_EVENTS = ("11", "13", "10", "15", "12", "21", "23", "20", "25", "22")


def _machine(name_events: tuple[str, str]) -> Automaton:
    start, finish = name_events
    sigma = Alphabet.odd_controllable([start, finish])
    return Automaton.build(sigma, 2, 0, [0], [(0, start, 1), (1, finish, 0)])


def m1() -> Automaton:
    """Machine 1: takes a workpiece (1) and deposits it in buffer 1 (2)."""
    return _machine(("1", "2"))


def m2() -> Automaton:
    """Machine 2: takes from buffer 1 (3) and deposits in buffer 2 (4)."""
    return _machine(("3", "4"))


def test_unit() -> Automaton:
    """Test unit: takes from buffer 2 (5), then accepts (6) or rejects back to buffer 1 (8)."""
    sigma = Alphabet.odd_controllable(["5", "6", "8"])
    return Automaton.build(sigma, 2, 0, [0], [(0, "5", 1), (1, "6", 0), (1, "8", 0)])


test_unit.__test__ = False  # keep pytest from collecting this as a test


def buffer(increments: Iterable[str], decrements: Iterable[str], capacity: int) -> Automaton:
    """Counter specification over its own events: never under- or overflow."""
    inc = [str(e) for e in increments]
    dec = [str(e) for e in decrements]
    labels = sorted(set(inc) | set(dec), key=int)
    sigma = Alphabet.odd_controllable(labels)
    transitions = []
    for k in range(capacity + 1):
        if k < capacity:
            transitions += [(k, e, k + 1) for e in inc]
        if k > 0:
            transitions += [(k, e, k - 1) for e in dec]
    return Automaton.build(sigma, capacity + 1, 0, [0], transitions)


def buffer1() -> Automaton:
    return buffer(["2", "8"], ["3"], 3)


def buffer2() -> Automaton:
    return buffer(["4"], ["5"], 1)


def transfer_line_plant() -> Automaton:
    return sync(m1(), m2(), test_unit()).with_alphabet(
        Alphabet.odd_controllable(TRANSFER_LINE_EVENTS)
    )


def transfer_line_spec() -> Automaton:
    """Both buffer specifications, lifted to the full transfer-line alphabet."""
    full = Alphabet.odd_controllable(TRANSFER_LINE_EVENTS)
    return sync(inverse_project(buffer1(), full), inverse_project(buffer2(), full))


def vehicle(prefix: int) -> Automaton:
    """Six-state chain: station A, sections 1-4, station B (marked)."""
    chain = [f"{prefix}{d}" for d in (1, 3, 0, 5, 2)]
    sigma = Alphabet.odd_controllable(chain)
    return Automaton.build(sigma, 6, 0, [5], [(k, e, k + 1) for k, e in enumerate(chain)])


def _vehicle_positions(plant: Automaton) -> list[tuple[int, int]]:
    """Section of each vehicle at every state of the guideway plant."""
    v1, v2 = vehicle(1), vehicle(2)
    pos = [None] * plant.n_states
    pos[plant.initial] = (0, 0)
    queue = deque([plant.initial])
    while queue:
        x = queue.popleft()
        p1, p2 = pos[x]
        for label, y in plant.delta[x].items():
            if pos[y] is None:
                n1 = v1.delta[p1].get(label, p1)
                n2 = v2.delta[p2].get(label, p2)
                pos[y] = (n1, n2)
                queue.append(y)
    return pos


def guideway_plant() -> Automaton:
    return sync(vehicle(1), vehicle(2))


def guideway_spec() -> Automaton:
    """Mutual exclusion: the vehicles never share a track section 1..4."""
    plant = guideway_plant()
    pos = _vehicle_positions(plant)
    return forbid_states(plant, lambda x: pos[x][0] == pos[x][1] and 1 <= pos[x][0] <= 4)


def _strings(*specs: str) -> list[tuple[str, ...]]:
    return [tuple(s.split(",")) for s in specs]


# Look-alike strings named for each example; each must lie in its ambient.
TRANSFER_LINE_AMBIENT_STRINGS = _strings("1,2,3,4,5,1,8", "1,2,3,4,5,1")
GUIDEWAY_AMBIENT_STRINGS = _strings(
    "11,13,10,15,21,23,12",
    "11,13,10,15,21,23,12,20,25,22",
)


def _shortest_completion(plant: Automaton, s: tuple[str, ...]) -> tuple[str, ...]:
    """``s`` followed by a shortest suffix reaching a marked plant state (event order breaks ties)."""
    x = plant.run(s)
    if x is None:
        raise ValueError(f"{','.join(s)} is not generated by the plant")
    parent: dict[int, tuple[int, str] | None] = {x: None}
    queue = deque([x])
    while queue:
        y = queue.popleft()
        if y in plant.marked:
            suffix = []
            while parent[y] is not None:
                y, label = parent[y]
                suffix.append(label)
            return tuple(s) + tuple(reversed(suffix))
        for label in plant.alphabet.labels:
            z = plant.delta[y].get(label)
            if z is not None and z not in parent:
                parent[z] = (y, label)
                queue.append(z)
    raise ValueError(f"{','.join(s)} has no marked extension in the plant")


def ambient(sup: Automaton, plant: Automaton, strings: Iterable[tuple[str, ...]]) -> Automaton:
    """Recognizer of C = Lm(sup) plus a shortest marked plant completion of each
    string in ``strings`` that is not already a prefix of Lm(sup).

    Raises ``ValueError`` if such a string has no marked extension in the plant.
    """
    extras = {
        _shortest_completion(plant, tuple(s))
        for s in strings
        if sup.is_empty() or not sup.generates(s)
    }
    prefixes = {s[:k] for s in extras for k in range(len(s) + 1)}

    def step(node, label):
        k, g, p = node
        ng = plant.delta[g].get(label)
        if ng is None:
            return None
        nk = sup.delta[k].get(label) if k is not None else None
        np_ = p + (label,) if p is not None and p + (label,) in prefixes else None
        if nk is None and np_ is None:
            return None
        return nk, ng, np_

    start = (None if sup.is_empty() else sup.initial, plant.initial, ())
    nodes = [start]
    index = {start: 0}
    rows: list[dict[str, int]] = []
    queue = deque([start])
    while queue:
        node = queue.popleft()
        row = {}
        for label in plant.alphabet.labels:
            nxt = step(node, label)
            if nxt is None:
                continue
            if nxt not in index:
                index[nxt] = len(nodes)
                nodes.append(nxt)
                queue.append(nxt)
            row[label] = index[nxt]
        rows.append(row)
    marked = [
        i
        for i, (k, g, p) in enumerate(nodes)
        if (k is not None and k in sup.marked) or p in extras
    ]
    return trim(Automaton(plant.alphabet, len(nodes), 0, frozenset(marked), tuple(rows)))


@dataclass(frozen=True, eq=False)
class Bundle:
    """A bundled example: plant, lifted specification and the supervisors built from them."""

    name: str
    plant: Automaton
    spec: Automaton
    components: dict[str, Automaton]

    def mask(self, unobservable: Iterable[str | int]) -> ObservationMask:
        return ObservationMask.hiding(self.plant.alphabet, unobservable)


@lru_cache(maxsize=None)
def transfer_line() -> Bundle:
    return Bundle(
        "transfer_line",
        transfer_line_plant(),
        transfer_line_spec(),
        {"m1": m1(), "m2": m2(), "tu": test_unit(), "b1": buffer1(), "b2": buffer2()},
    )


@lru_cache(maxsize=None)
def guideway() -> Bundle:
    return Bundle(
        "guideway",
        guideway_plant(),
        guideway_spec(),
        {"v1": vehicle(1), "v2": vehicle(2)},
    )


def transfer_line_ambient(sup: Supervisor | Automaton | None = None) -> Automaton:
    b = transfer_line()
    if sup is None:
        sup = supcon(b.plant, b.spec)
    sup = sup.automaton if isinstance(sup, Supervisor) else sup
    return ambient(sup, b.plant, TRANSFER_LINE_AMBIENT_STRINGS)


def guideway_ambient(sup: Supervisor | Automaton | None = None) -> Automaton:
    b = guideway()
    if sup is None:
        sup = supconrobs(b.plant, b.spec, b.mask(["13", "23"]))
    sup = sup.automaton if isinstance(sup, Supervisor) else sup
    return ambient(sup, b.plant, GUIDEWAY_AMBIENT_STRINGS)
