"""Deterministic automata over labelled alphabets and language-level primitives.

States are dense integer indices ``0..n-1``; event labels live only in the
:class:`Alphabet`, whose order is the tie-break order for every traversal.
The transition function is partial: an undefined ``(state, event)`` pair
simply has no entry, and no dump state is ever materialised.
"""

from __future__ import annotations

import itertools
import os
from collections import deque
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence

from supvkit.errors import AlphabetMismatch, BudgetExceeded, ConflictingAttributes

DEFAULT_ENUMERATION_CAP = 2_000_000


def budget(default: int) -> int:
    """Return the search budget, honouring the ``SUPVKIT_BUDGET`` override."""
    raw = os.environ.get("SUPVKIT_BUDGET")
    if raw is None or not raw.strip():
        return default
    return int(raw)


@dataclass(frozen=True)
class Event:
    label: str
    controllable: bool


@dataclass(frozen=True)
class Alphabet:
    """Ordered event set with a controllable/uncontrollable split.

    >>> sigma = Alphabet.from_pairs([("a", True), ("b", False)])
    >>> sigma.labels
    ('a', 'b')
    >>> sorted(sigma.uncontrollable)
    ['b']
    """

    events: tuple[Event, ...]
    _index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        index: dict[str, int] = {}
        for i, ev in enumerate(self.events):
            if ev.label in index:
                raise ValueError(f"duplicate event label {ev.label!r}")
            index[ev.label] = i
        object.__setattr__(self, "_index", MappingProxyType(index))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, bool]]) -> "Alphabet":
        return cls(tuple(Event(str(label), bool(c)) for label, c in pairs))

    @classmethod
    def odd_controllable(cls, labels: Iterable[str | int]) -> "Alphabet":
        """Numeric labels, odd ones controllable (the usual TCT convention)."""
        return cls.from_pairs((str(lab), int(lab) % 2 == 1) for lab in labels)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(ev.label for ev in self.events)

    @property
    def controllable(self) -> frozenset[str]:
        return frozenset(ev.label for ev in self.events if ev.controllable)

    @property
    def uncontrollable(self) -> frozenset[str]:
        return frozenset(ev.label for ev in self.events if not ev.controllable)

    def __contains__(self, label: object) -> bool:
        return label in self._index

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    def __len__(self) -> int:
        return len(self.events)

    def position(self, label: str) -> int:
        return self._index[label]

    def is_controllable(self, label: str) -> bool:
        return self.events[self._index[label]].controllable

    def union(self, other: "Alphabet") -> "Alphabet":
        """Events of ``self`` followed by the new events of ``other``."""
        merged = list(self.events)
        for ev in other.events:
            if ev.label in self._index:
                if self.events[self._index[ev.label]].controllable != ev.controllable:
                    raise ConflictingAttributes(
                        f"event {ev.label!r} is controllable in one alphabet only"
                    )
            else:
                merged.append(ev)
        return Alphabet(tuple(merged))

    def restrict(self, labels: Iterable[str]) -> "Alphabet":
        keep = set(labels)
        return Alphabet(tuple(ev for ev in self.events if ev.label in keep))

    def sort(self, labels: Iterable[str]) -> list[str]:
        return sorted(labels, key=self.position)


@dataclass(frozen=True)
class ObservationMask:
    """The observable subset of an alphabet, defining a natural projection."""

    alphabet: Alphabet
    observable: frozenset[str]

    def __post_init__(self) -> None:
        unknown = set(self.observable) - set(self.alphabet.labels)
        if unknown:
            raise ValueError(f"observable events not in alphabet: {sorted(unknown)}")
        object.__setattr__(self, "observable", frozenset(self.observable))

    @classmethod
    def full(cls, alphabet: Alphabet) -> "ObservationMask":
        return cls(alphabet, frozenset(alphabet.labels))

    @classmethod
    def hiding(cls, alphabet: Alphabet, unobservable: Iterable[str | int]) -> "ObservationMask":
        hidden = {str(x) for x in unobservable}
        unknown = hidden - set(alphabet.labels)
        if unknown:
            raise ValueError(f"unobservable events not in alphabet: {sorted(unknown)}")
        return cls(alphabet, frozenset(alphabet.labels) - hidden)

    @property
    def unobservable(self) -> frozenset[str]:
        return frozenset(self.alphabet.labels) - self.observable

    def project(self, string: Iterable[str]) -> tuple[str, ...]:
        return tuple(e for e in string if e in self.observable)

    def observable_alphabet(self) -> Alphabet:
        return self.alphabet.restrict(self.observable)


@dataclass(frozen=True)
class Verdict:
    """Outcome of a decision procedure, truthy when the property holds.

    ``witness`` carries the distinguishing or violating string(s) when the
    property fails; ``info`` carries auxiliary results (an isomorphism map,
    a violated clause, ...).
    """

    holds: bool
    witness: Any = None
    info: Any = None

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True, eq=False)
class Automaton:
    """Deterministic recognizer ``(states, alphabet, delta, initial, marked)``.

    ``delta[x]`` maps event labels to successor states.  The empty automaton
    has ``n_states == 0`` and ``initial is None``.
    """

    alphabet: Alphabet
    n_states: int
    initial: int | None
    marked: frozenset[int]
    delta: tuple[Mapping[str, int], ...]

    def __post_init__(self) -> None:
        n = self.n_states
        if n == 0:
            if self.initial is not None or self.marked or self.delta:
                raise ValueError("the empty automaton has no initial state, marks or transitions")
        elif self.initial is None or not 0 <= self.initial < n:
            raise ValueError(f"initial state {self.initial!r} out of range")
        if len(self.delta) != n:
            raise ValueError("delta must have one row per state")
        for x in self.marked:
            if not 0 <= x < n:
                raise ValueError(f"marked state {x} out of range")
        for x, row in enumerate(self.delta):
            for label, y in row.items():
                if label not in self.alphabet:
                    raise ValueError(f"transition {x} -{label}-> {y} uses unknown event")
                if not 0 <= y < n:
                    raise ValueError(f"transition {x} -{label}-> {y} leaves the state set")
        object.__setattr__(self, "marked", frozenset(self.marked))
        object.__setattr__(
            self, "delta", tuple(MappingProxyType(dict(row)) for row in self.delta)
        )

    @classmethod
    def build(
        cls,
        alphabet: Alphabet,
        n_states: int,
        initial: int | None,
        marked: Iterable[int],
        transitions: Iterable[tuple[int, str, int]],
    ) -> "Automaton":
        rows: list[dict[str, int]] = [dict() for _ in range(n_states)]
        for src, label, dst in transitions:
            label = str(label)
            if not 0 <= src < n_states:
                raise ValueError(f"transition source {src} out of range")
            if label in rows[src] and rows[src][label] != dst:
                raise ValueError(f"nondeterministic transition at state {src} on {label!r}")
            rows[src][label] = dst
        return cls(alphabet, n_states, initial if n_states else None, frozenset(marked), tuple(rows))

    @classmethod
    def empty(cls, alphabet: Alphabet) -> "Automaton":
        return cls(alphabet, 0, None, frozenset(), ())

    @classmethod
    def universal(cls, alphabet: Alphabet) -> "Automaton":
        """One marked state self-looping every event: recognizes Sigma*."""
        return cls.build(alphabet, 1, 0, [0], ((0, e, 0) for e in alphabet.labels))

    def is_empty(self) -> bool:
        return self.n_states == 0

    def transitions(self) -> Iterator[tuple[int, str, int]]:
        """All transitions, ordered by source state then event order."""
        for x, row in enumerate(self.delta):
            for label in self.alphabet.sort(row):
                yield x, label, row[label]

    def n_transitions(self) -> int:
        return sum(len(row) for row in self.delta)

    def step(self, state: int | None, label: str) -> int | None:
        if state is None:
            return None
        return self.delta[state].get(label)

    def run(self, string: Iterable[str]) -> int | None:
        """State reached by ``string`` from the initial state, or ``None``."""
        x = self.initial
        for label in string:
            x = self.step(x, label)
            if x is None:
                return None
        return x

    def generates(self, string: Iterable[str]) -> bool:
        """Membership in the closed behaviour L."""
        return self.run(string) is not None

    def accepts(self, string: Iterable[str]) -> bool:
        """Membership in the marked behaviour Lm."""
        x = self.run(string)
        return x is not None and x in self.marked

    def enabled(self, state: int) -> list[str]:
        return self.alphabet.sort(self.delta[state])

    def with_alphabet(self, alphabet: Alphabet) -> "Automaton":
        return Automaton(alphabet, self.n_states, self.initial, self.marked, self.delta)

    def with_marked(self, marked: Iterable[int]) -> "Automaton":
        return Automaton(self.alphabet, self.n_states, self.initial, frozenset(marked), self.delta)

    def __repr__(self) -> str:
        return (
            f"Automaton(states={self.n_states}, transitions={self.n_transitions()}, "
            f"marked={len(self.marked)}, events={len(self.alphabet)})"
        )


# -- structural helpers ------------------------------------------------------


def _bfs_order(a: Automaton) -> list[int]:
    if a.is_empty():
        return []
    seen = {a.initial}
    order = [a.initial]
    queue = deque(order)
    while queue:
        x = queue.popleft()
        for label in a.alphabet.labels:
            y = a.delta[x].get(label)
            if y is not None and y not in seen:
                seen.add(y)
                order.append(y)
                queue.append(y)
    return order


def reachable(a: Automaton) -> set[int]:
    return set(_bfs_order(a))


def coreachable(a: Automaton) -> set[int]:
    preds: list[list[int]] = [[] for _ in range(a.n_states)]
    for x, row in enumerate(a.delta):
        for y in row.values():
            preds[y].append(x)
    seen = set(a.marked)
    stack = list(seen)
    while stack:
        y = stack.pop()
        for x in preds[y]:
            if x not in seen:
                seen.add(x)
                stack.append(x)
    return seen


def subautomaton(a: Automaton, keep: Iterable[int]) -> Automaton:
    """Restrict ``a`` to ``keep`` and renumber in breadth-first order.

    States of ``keep`` not reachable inside the restriction are dropped; if
    the initial state is not kept the result is empty.
    """
    return restrict_with_map(a, keep)[0]


def restrict_with_map(a: Automaton, keep: Iterable[int]) -> tuple[Automaton, list[int]]:
    """:func:`subautomaton` plus the original index of every new state."""
    keep = set(keep)
    if a.is_empty() or a.initial not in keep:
        return Automaton.empty(a.alphabet), []
    order = [a.initial]
    new = {a.initial: 0}
    queue = deque(order)
    rows: list[dict[str, int]] = []
    while queue:
        x = queue.popleft()
        row = {}
        for label in a.alphabet.labels:
            y = a.delta[x].get(label)
            if y is None or y not in keep:
                continue
            if y not in new:
                new[y] = len(order)
                order.append(y)
                queue.append(y)
            row[label] = new[y]
        rows.append(row)
    marked = frozenset(new[x] for x in order if x in a.marked)
    return Automaton(a.alphabet, len(order), 0, marked, tuple(rows)), order


def canonical(a: Automaton) -> Automaton:
    """Reachable part of ``a`` with states renumbered breadth-first."""
    return subautomaton(a, range(a.n_states))


def live_states(a: Automaton, keep: Iterable[int] | None = None) -> set[int]:
    """States of ``keep`` reachable and co-reachable without leaving ``keep``."""
    keep = set(range(a.n_states)) if keep is None else set(keep)
    if a.is_empty() or a.initial not in keep:
        return set()
    fwd = {a.initial}
    stack = [a.initial]
    while stack:
        x = stack.pop()
        for y in a.delta[x].values():
            if y in keep and y not in fwd:
                fwd.add(y)
                stack.append(y)
    preds: dict[int, list[int]] = {x: [] for x in fwd}
    for x in fwd:
        for y in a.delta[x].values():
            if y in fwd:
                preds[y].append(x)
    bwd = {x for x in fwd if x in a.marked}
    stack = list(bwd)
    while stack:
        y = stack.pop()
        for x in preds[y]:
            if x not in bwd:
                bwd.add(x)
                stack.append(x)
    return bwd


def reachable_trim(a: Automaton) -> Automaton:
    """Keep only states that are reachable and co-reachable.

    >>> sigma = Alphabet.from_pairs([("a", True), ("b", True)])
    >>> chain = Automaton.build(sigma, 3, 0, [1], [(0, "a", 1), (1, "b", 2)])
    >>> reachable_trim(chain).n_states
    2
    """
    return subautomaton(a, live_states(a))


trim = reachable_trim


def is_trim(a: Automaton) -> bool:
    states = set(range(a.n_states))
    return reachable(a) == states and coreachable(a) == states


def closure(a: Automaton) -> Automaton:
    """Trim ``a`` and mark every state, so that Lm(result) = closure of Lm(a)."""
    t = trim(a)
    return t.with_marked(range(t.n_states))


def minimize(a: Automaton) -> Automaton:
    """Minimal deterministic recognizer of (L(a), Lm(a)) by Moore refinement.

    The input is first restricted to its reachable part; undefined moves are
    treated as moves into an implicit dead block.
    """
    a = canonical(a)
    if a.is_empty():
        return a
    labels = a.alphabet.labels
    live = coreachable(a)
    # Non-coreachable states still differ by which events they define, so the
    # dead block is only implicit, never merged with real states.
    block = [(x in a.marked, x in live) for x in range(a.n_states)]
    ids = {key: i for i, key in enumerate(sorted(set(block)))}
    part = [ids[key] for key in block]
    while True:
        sig = [
            (part[x],) + tuple(part[a.delta[x][e]] if e in a.delta[x] else -1 for e in labels)
            for x in range(a.n_states)
        ]
        ids = {}
        for s in sig:
            ids.setdefault(s, len(ids))
        new_part = [ids[s] for s in sig]
        if len(ids) == len(set(part)):
            break
        part = new_part
    n = len(set(part))
    rows: list[dict[str, int]] = [dict() for _ in range(n)]
    for x in range(a.n_states):
        for e, y in a.delta[x].items():
            rows[part[x]][e] = part[y]
    marked = {part[x] for x in a.marked}
    return canonical(Automaton(a.alphabet, n, part[a.initial], frozenset(marked), tuple(rows)))


# -- products ---------------------------------------------------------------


def _product(
    a: Automaton,
    b: Automaton,
    alphabet: Alphabet,
    moves: Callable[[int, int, str], tuple[int, int] | None],
) -> tuple[Automaton, list[tuple[int, int]]]:
    if a.is_empty() or b.is_empty():
        return Automaton.empty(alphabet), []
    start = (a.initial, b.initial)
    pairs = [start]
    index = {start: 0}
    queue = deque([start])
    rows: list[dict[str, int]] = []
    while queue:
        x, y = queue.popleft()
        row = {}
        for label in alphabet.labels:
            nxt = moves(x, y, label)
            if nxt is None:
                continue
            if nxt not in index:
                index[nxt] = len(pairs)
                pairs.append(nxt)
                queue.append(nxt)
            row[label] = index[nxt]
        rows.append(row)
    marked = frozenset(i for i, (x, y) in enumerate(pairs) if x in a.marked and y in b.marked)
    return Automaton(alphabet, len(pairs), 0, marked, tuple(rows)), pairs


def sync(a: Automaton, *others: Automaton) -> Automaton:
    """Synchronous product: shared events move both sides, private ones move one.

    Accepts any number of operands; the result alphabet is the ordered union.
    """
    result = a
    for b in others:
        alphabet = result.alphabet.union(b.alphabet)
        left, right = result, b

        def moves(x: int, y: int, label: str, left=left, right=right) -> tuple[int, int] | None:
            in_l = label in left.alphabet
            in_r = label in right.alphabet
            nx = left.delta[x].get(label) if in_l else x
            ny = right.delta[y].get(label) if in_r else y
            if nx is None or ny is None:
                return None
            return nx, ny

        result, _ = _product(left, right, alphabet, moves)
    return result


def _require_same_alphabet(a: Automaton, b: Automaton) -> None:
    if a.alphabet.labels != b.alphabet.labels and set(a.alphabet.labels) != set(b.alphabet.labels):
        raise AlphabetMismatch(
            f"alphabets differ: {sorted(set(a.alphabet.labels) ^ set(b.alphabet.labels))}"
        )
    if a.alphabet.controllable != b.alphabet.controllable:
        raise ConflictingAttributes("operands disagree on controllability")


def meet_with_pairs(a: Automaton, b: Automaton) -> tuple[Automaton, list[tuple[int, int]]]:
    """:func:`meet` together with the source state pair of every result state."""
    _require_same_alphabet(a, b)

    def moves(x: int, y: int, label: str) -> tuple[int, int] | None:
        nx = a.delta[x].get(label)
        ny = b.delta[y].get(label)
        if nx is None or ny is None:
            return None
        return nx, ny

    return _product(a, b, a.alphabet, moves)


def meet(a: Automaton, b: Automaton) -> Automaton:
    """Reachable product over a common alphabet: L and Lm are intersected."""
    return meet_with_pairs(a, b)[0]


# -- language comparison ----------------------------------------------------


def _trace(parent: dict, node) -> tuple[str, ...]:
    out = []
    while parent[node] is not None:
        node, label = parent[node]
        out.append(label)
    return tuple(reversed(out))


def _event_order(a: Automaton, b: Automaton) -> list[str]:
    labels = list(a.alphabet.labels)
    labels += [e for e in b.alphabet.labels if e not in a.alphabet]
    return labels


def language_equal(a: Automaton, b: Automaton) -> Verdict:
    """Decide L(a) = L(b) and Lm(a) = Lm(b).

    On inequality the witness is a shortest string (ties broken by event
    order) lying in exactly one of the closed or exactly one of the marked
    languages; ``info`` names which ("closed" or "marked").
    """
    if a.is_empty() and b.is_empty():
        return Verdict(True)
    if a.is_empty() or b.is_empty():
        return Verdict(False, (), "closed")
    labels = _event_order(a, b)
    start = (a.initial, b.initial)
    parent: dict = {start: None}
    queue = deque([start])
    while queue:
        x, y = queue.popleft()
        if (x in a.marked) != (y in b.marked):
            return Verdict(False, _trace(parent, (x, y)), "marked")
        for label in labels:
            nx = a.delta[x].get(label)
            ny = b.delta[y].get(label)
            if nx is None and ny is None:
                continue
            if nx is None or ny is None:
                return Verdict(False, _trace(parent, (x, y)) + (label,), "closed")
            if (nx, ny) not in parent:
                parent[(nx, ny)] = ((x, y), label)
                queue.append((nx, ny))
    return Verdict(True)


def is_sublanguage(a: Automaton, b: Automaton, *, marked: bool = False) -> Verdict:
    """Decide L(a) <= L(b), or Lm(a) <= Lm(b) when ``marked`` is set.

    The witness is a shortest string of the left language missing from the
    right one.
    """
    if a.is_empty():
        return Verdict(True)
    labels = list(a.alphabet.labels)
    start = (a.initial, b.initial)
    parent: dict = {start: None}
    queue = deque([start])
    while queue:
        x, y = queue.popleft()
        if not marked and y is None:
            return Verdict(False, _trace(parent, (x, y)))
        if marked and x in a.marked and (y is None or y not in b.marked):
            return Verdict(False, _trace(parent, (x, y)))
        for label in labels:
            nx = a.delta[x].get(label)
            if nx is None:
                continue
            ny = b.delta[y].get(label) if y is not None and label in b.alphabet else None
            if (nx, ny) not in parent:
                parent[(nx, ny)] = ((x, y), label)
                queue.append((nx, ny))
    return Verdict(True)


def des_isomorphic(a: Automaton, b: Automaton) -> Verdict:
    """Decide whether two reachable deterministic automata are DES-isomorphic.

    The bijection is forced by parallel traversal from the initial states.
    On success ``info`` holds the map (state of ``a`` -> state of ``b``); on
    failure ``witness`` is a string leading to the first discrepancy and
    ``info`` describes it.
    """
    if a.is_empty() or b.is_empty():
        if a.is_empty() and b.is_empty():
            return Verdict(True, info={})
        return Verdict(False, (), "exactly one automaton is empty")
    labels = _event_order(a, b)
    theta = {a.initial: b.initial}
    inverse = {b.initial: a.initial}
    parent: dict = {a.initial: None}
    queue = deque([a.initial])
    while queue:
        x = queue.popleft()
        y = theta[x]
        if (x in a.marked) != (y in b.marked):
            return Verdict(False, _trace(parent, x), "marking differs")
        for label in labels:
            nx = a.delta[x].get(label)
            ny = b.delta[y].get(label)
            if nx is None and ny is None:
                continue
            here = _trace(parent, x) + (label,)
            if nx is None or ny is None:
                return Verdict(False, here, "transition defined on one side only")
            if nx in theta:
                if theta[nx] != ny:
                    return Verdict(False, here, "successor mapping is not a function")
                continue
            if ny in inverse:
                return Verdict(False, here, "successor mapping is not injective")
            theta[nx] = ny
            inverse[ny] = nx
            parent[nx] = (x, label)
            queue.append(nx)
    if len(theta) != a.n_states or len(inverse) != b.n_states:
        return Verdict(False, None, "unreachable states prevent a bijection")
    return Verdict(True, info=dict(sorted(theta.items())))


def enumerate_strings(
    a: Automaton,
    max_len: int,
    *,
    alphabet: Sequence[str] | None = None,
    cap: int | None = None,
) -> dict[tuple[str, ...], tuple[bool, bool]]:
    """Brute-force membership table for every string of length <= ``max_len``.

    Maps each string to ``(in_closed, in_marked)``.  Raises
    :class:`BudgetExceeded` when the number of strings exceeds ``cap``.
    """
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    labels = list(alphabet) if alphabet is not None else list(a.alphabet.labels)
    cap = budget(DEFAULT_ENUMERATION_CAP) if cap is None else cap
    total = sum(len(labels) ** k for k in range(max_len + 1))
    if total > cap:
        raise BudgetExceeded(f"{total} strings exceed the enumeration cap {cap}")
    table = {}
    for k in range(max_len + 1):
        for s in itertools.product(labels, repeat=k):
            x = a.run(s) if all(e in a.alphabet for e in s) else None
            table[s] = (x is not None, x is not None and x in a.marked)
    return table
