"""Self-loop structure of reduced supervisors and the randomized property harness.

The harness regenerates every instance from its seed, so a reported
counterexample can always be replayed with ``random_instance(seed)``.
Failing instances are shrunk by deleting states, events, transitions and
markings for as long as the property keeps failing.
"""

from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

from supvkit.core import (
    Alphabet,
    Automaton,
    ObservationMask,
    budget,
    closure,
    language_equal,
    live_states,
    meet,
    restrict_with_map,
    trim,
)
from supvkit.errors import BudgetExceeded
from supvkit.observation import (
    is_normal,
    is_relatively_observable,
    supconrobs,
    uncertainty_sets,
)
from supvkit.reduction import check_rsup_normality, consistency_relation, supreduce
from supvkit.synthesis import Supervisor, control_equivalent, forbid_states, supcon

SELF_LOOP_ONLY = "self_loop_only"
UNIVERSAL = "universal_self_loop"
MIXED = "mixed"
ABSENT = "absent"

DEFAULT_MASK_BUDGET = 2**12


# -- self-loop classification -------------------------------------------------


@dataclass(frozen=True)
class SelfLoopReport:
    """Per-event structural classification of an automaton's transitions.

    ``classes`` partitions the alphabet into the four classes.  Because a
    universally self-looped event is in particular self-loop-only, the
    :attr:`self_loop_only` view includes both.
    """

    classes: dict[str, str]
    loop_states: dict[str, frozenset[int]]
    moves: dict[str, tuple[tuple[int, int], ...]]

    def of_class(self, cls: str) -> frozenset[str]:
        return frozenset(e for e, c in self.classes.items() if c == cls)

    @property
    def self_loop_only(self) -> frozenset[str]:
        return self.of_class(SELF_LOOP_ONLY) | self.of_class(UNIVERSAL)

    @property
    def universal(self) -> frozenset[str]:
        return self.of_class(UNIVERSAL)

    @property
    def mixed(self) -> frozenset[str]:
        return self.of_class(MIXED)

    @property
    def absent(self) -> frozenset[str]:
        return self.of_class(ABSENT)


def classify_selfloops(r: Automaton) -> SelfLoopReport:
    """Classify every event of ``r`` by how it occurs among the transitions.

    >>> sigma = Alphabet.from_pairs([("a", True), ("b", True), ("c", False)])
    >>> r = Automaton.build(sigma, 2, 0, [0], [(0, "a", 0), (1, "a", 1), (0, "b", 1)])
    >>> rep = classify_selfloops(r)
    >>> rep.classes["a"], rep.classes["b"], rep.classes["c"]
    ('universal_self_loop', 'mixed', 'absent')
    """
    loops: dict[str, set[int]] = {e: set() for e in r.alphabet.labels}
    moves: dict[str, list[tuple[int, int]]] = {e: [] for e in r.alphabet.labels}
    for x, label, y in r.transitions():
        if x == y:
            loops[label].add(x)
        else:
            moves[label].append((x, y))
    classes = {}
    for e in r.alphabet.labels:
        if moves[e]:
            classes[e] = MIXED
        elif not loops[e]:
            classes[e] = ABSENT
        elif len(loops[e]) == r.n_states:
            classes[e] = UNIVERSAL
        else:
            classes[e] = SELF_LOOP_ONLY
    return SelfLoopReport(
        classes,
        {e: frozenset(v) for e, v in loops.items()},
        {e: tuple(v) for e, v in moves.items()},
    )


# -- tolerable projections ---------------------------------------------------


@dataclass(frozen=True)
class ProjectionVerdict:
    mask: ObservationMask
    rel_obs: bool
    normal: bool
    witness: object = None

    @property
    def hidden(self) -> tuple[str, ...]:
        return self.mask.alphabet.sort(self.mask.unobservable)


def _judge(sup: Supervisor, plant: Automaton, ambient: Automaton, mask: ObservationMask) -> ProjectionVerdict:
    robs = is_relatively_observable(sup, ambient, plant, mask)
    normal = is_normal(sup, plant, mask)
    witness = robs.witness if not robs else (normal.witness if not normal else None)
    return ProjectionVerdict(mask, robs.holds, normal.holds, witness)


def find_tolerable_projections(
    sup: Supervisor,
    plant: Automaton,
    ambientC: Automaton,
    *,
    exhaustive: bool = False,
    also_try: Iterable[Iterable[str]] = (),
    max_masks: int | None = None,
) -> list[ProjectionVerdict]:
    """Candidate observation masks read off the reduced supervisor, each checker-confirmed.

    Proposals, in order: full observation; hiding every self-loop-only event
    of the reduction; hiding the universally self-looped events; with
    ``exhaustive``, every subset of the self-loop-only events; and finally
    the hidden sets in ``also_try``.  Every verdict comes from the
    relative-observability and normality checkers, never from structure
    alone, since self-loops do not imply observability.
    """
    sigma = plant.alphabet
    report = classify_selfloops(supreduce(sup).automaton)
    proposals: list[frozenset[str]] = [
        frozenset(),
        report.self_loop_only,
        report.universal,
    ]
    if exhaustive:
        loops = sigma.sort(report.self_loop_only)
        limit = budget(DEFAULT_MASK_BUDGET) if max_masks is None else max_masks
        if 2 ** len(loops) > limit:
            raise BudgetExceeded(f"{2 ** len(loops)} masks exceed the budget {limit}")
        for k in range(len(loops) + 1):
            proposals += [frozenset(c) for c in itertools.combinations(loops, k)]
    proposals += [frozenset(str(e) for e in hidden) for hidden in also_try]
    verdicts = []
    seen = set()
    for hidden in proposals:
        if hidden in seen:
            continue
        seen.add(hidden)
        verdicts.append(_judge(sup, plant, ambientC, ObservationMask.hiding(sigma, hidden)))
    return verdicts


# -- property verification ------------------------------------------------------


HOLDS = "holds"
FAILS = "fails"
SKIPPED = "skipped"


@dataclass(frozen=True)
class Outcome:
    """Result of one property check: holds, fails, or skipped (hypothesis unmet)."""

    status: str
    counterexample: object = None
    detail: str = ""

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    @property
    def fails(self) -> bool:
        return self.status == FAILS

    @property
    def skipped(self) -> bool:
        return self.status == SKIPPED

    def __bool__(self) -> bool:
        return self.status != FAILS


def _pairs_consistent(sup: Supervisor, mask: ObservationMask) -> Outcome:
    rel = consistency_relation(sup)
    report = uncertainty_sets(sup, mask)
    for x, y in sorted(report.pairs):
        if not rel(x, y):
            return Outcome(FAILS, (x, y), "look-alike states are not control consistent")
    return Outcome(HOLDS, detail=f"{len(report.pairs)} look-alike pairs")


def verify_proposition1(
    sup: Supervisor, plant: Automaton, ambientC: Automaton, mask: ObservationMask
) -> Outcome:
    """Look-alike supervisor states are control consistent when K is relatively observable."""
    if sup.is_empty():
        return Outcome(SKIPPED, detail="empty supervisor")
    if not is_relatively_observable(sup, ambientC, plant, mask):
        return Outcome(SKIPPED, detail="K is not relatively observable")
    return _pairs_consistent(sup, mask)


def is_lm_closed(sup: Supervisor | Automaton, plant: Automaton) -> bool:
    """K = K-bar & Lm(G)."""
    a = sup.automaton if isinstance(sup, Supervisor) else sup
    a = trim(a)
    if a.is_empty():
        return True
    return language_equal(meet(plant, closure(a)), a).holds


def verify_proposition2(sup: Supervisor, plant: Automaton, mask: ObservationMask) -> Outcome:
    """Look-alike supervisor states are control consistent when K is normal and Lm(G)-closed."""
    if sup.is_empty():
        return Outcome(SKIPPED, detail="empty supervisor")
    if not is_normal(sup, plant, mask):
        return Outcome(SKIPPED, detail="K is not normal")
    if not is_lm_closed(sup, plant):
        return Outcome(SKIPPED, detail="K is not Lm(G)-closed")
    return _pairs_consistent(sup, mask)


def verify_theorem1(plant: Automaton, spec: Automaton, mask: ObservationMask) -> Outcome:
    """Unobservable events occur only as self-loops in the reduced supervisor.

    The supervisor is the controllable, relatively observable one from
    :func:`supconrobs`; its hypothesis is re-confirmed by the checker before
    the structure of the reduction is inspected.  The counterexample is
    ``(event, source, target)`` for the first offending transition.
    """
    sup = supconrobs(plant, spec, mask)
    if sup.is_empty():
        return Outcome(SKIPPED, detail="empty supervisor")
    if not is_relatively_observable(sup, sup.automaton, plant, mask):
        return Outcome(SKIPPED, detail="K is not observable")
    hidden = plant.alphabet.sort(mask.unobservable)
    report = classify_selfloops(supreduce(sup, prefer=hidden).automaton)
    for e in hidden:
        if report.classes[e] == MIXED:
            x, y = report.moves[e][0]
            return Outcome(FAILS, (e, x, y), f"{e} moves between reduced states")
    occurring = sum(report.classes[e] != ABSENT for e in hidden)
    return Outcome(HOLDS, detail=f"{occurring} of {len(hidden)} hidden events occur")


def verify_structure(sup: Supervisor) -> Outcome:
    """Control equivalence and normality of the reduction of ``sup``."""
    if sup.is_empty():
        return Outcome(SKIPPED, detail="empty supervisor")
    rsup = supreduce(sup, verify=False).automaton
    eq = control_equivalent(rsup, sup, sup.plant)
    if not eq:
        return Outcome(FAILS, eq.witness, "not control equivalent")
    normal = check_rsup_normality(rsup, sup)
    if not normal:
        return Outcome(FAILS, normal.witness, f"not normal ({normal.info})")
    return Outcome(HOLDS, detail=f"{sup.n_states} -> {rsup.n_states} states")


# -- random instances --------------------------------------------------------------


LABELS = "abcdefgh"


@dataclass(frozen=True)
class Limits:
    max_states: int = 6
    max_events: int = 4

    def __post_init__(self) -> None:
        if self.max_states < 1 or self.max_events < 1:
            raise ValueError("bounds must be positive")
        if self.max_events > len(LABELS):
            raise ValueError(f"at most {len(LABELS)} events")


@dataclass(frozen=True, eq=False)
class Instance:
    """A plant, the plant states the specification forbids, and the hidden events."""

    plant: Automaton
    forbidden: frozenset[int]
    hidden: frozenset[str]
    seed: int | None = None

    @property
    def spec(self) -> Automaton:
        return forbid_states(self.plant, lambda x: x in self.forbidden)

    @property
    def mask(self) -> ObservationMask:
        return ObservationMask.hiding(self.plant.alphabet, self.hidden)

    def __iter__(self) -> Iterator:
        return iter((self.plant, self.spec, self.mask))

    def size(self) -> tuple[int, int, int]:
        return (self.plant.n_states, len(self.plant.alphabet), self.plant.n_transitions())


def random_instance(seed: int, limits: Limits = Limits()) -> Instance:
    """Reproducible random instance with a trim, nonempty plant.

    Unpacks as ``plant, spec, mask``.
    """
    rng = random.Random(seed)
    while True:
        n = rng.randint(1, limits.max_states)
        k = rng.randint(1, limits.max_events)
        sigma = Alphabet.from_pairs((LABELS[i], rng.random() < 0.5) for i in range(k))
        transitions = [
            (x, e, rng.randrange(n)) for x in range(n) for e in sigma.labels if rng.random() < 0.45
        ]
        marked = [x for x in range(n) if rng.random() < 0.35] or [rng.randrange(n)]
        plant = trim(Automaton.build(sigma, n, 0, marked, transitions))
        if not plant.is_empty():
            break
    forbidden = frozenset(x for x in range(plant.n_states) if rng.random() < 0.2)
    hidden = frozenset(e for e in sigma.labels if rng.random() < 0.35)
    return Instance(plant, forbidden, hidden, seed)


# -- harness ---------------------------------------------------------------------


PROPERTIES = ("structure", "prop1", "prop2", "thm1")


def evaluate(inst: Instance) -> dict[str, Outcome]:
    """Run every harness property on one instance."""
    plant, spec, mask = inst
    sup = supcon(plant, spec)
    robs = supconrobs(plant, spec, mask)
    structure = verify_structure(sup)
    if structure and not robs.is_empty():
        second = verify_structure(robs)
        if second.fails:
            structure = second
    return {
        "structure": structure,
        "prop1": verify_proposition1(robs, plant, robs.automaton, mask),
        "prop2": verify_proposition2(sup, plant, mask),
        "thm1": verify_theorem1(plant, spec, mask),
    }


def _shrink_candidates(inst: Instance) -> Iterator[Instance]:
    plant = inst.plant
    # drop a state
    for x in range(plant.n_states):
        if x == plant.initial:
            continue
        keep = [y for y in range(plant.n_states) if y != x]
        smaller, order = restrict_with_map(plant, keep)
        yield _rebuild(inst, smaller, order)
    # drop an event
    for e in plant.alphabet.labels:
        if len(plant.alphabet) == 1:
            break
        sigma = plant.alphabet.restrict(l for l in plant.alphabet.labels if l != e)
        rows = tuple({l: y for l, y in row.items() if l != e} for row in plant.delta)
        smaller = Automaton(sigma, plant.n_states, plant.initial, plant.marked, rows)
        yield _rebuild(inst, smaller, list(range(plant.n_states)))
    # drop a transition
    for x, e, _ in plant.transitions():
        rows = list(plant.delta)
        rows[x] = {l: y for l, y in rows[x].items() if l != e}
        smaller = Automaton(plant.alphabet, plant.n_states, plant.initial, plant.marked, tuple(rows))
        yield _rebuild(inst, smaller, list(range(plant.n_states)))
    # unmark a state
    for x in sorted(plant.marked):
        smaller = plant.with_marked(plant.marked - {x})
        yield _rebuild(inst, smaller, list(range(plant.n_states)))


def _rebuild(inst: Instance, plant: Automaton, order: list[int]) -> Instance | None:
    """Re-trim a shrunk plant and carry the forbidden states across renumbering."""
    new_index = {old: new for new, old in enumerate(order)}
    forbidden = {new_index[x] for x in inst.forbidden if x in new_index}
    trimmed, kept = restrict_with_map(plant, live_states(plant))
    if trimmed.is_empty():
        return None
    back = {old: new for new, old in enumerate(kept)}
    return Instance(
        trimmed,
        frozenset(back[x] for x in forbidden if x in back),
        frozenset(e for e in inst.hidden if e in trimmed.alphabet),
        inst.seed,
    )


def shrink(inst: Instance, failing: Callable[[Instance], bool]) -> Instance:
    """Greedily delete structure from ``inst`` while ``failing`` stays true."""
    current = inst
    progress = True
    while progress:
        progress = False
        for cand in _shrink_candidates(current):
            if cand is None or cand.size() >= current.size():
                continue
            if failing(cand):
                current = cand
                progress = True
                break
    return current


@dataclass
class SeedRecord:
    seed: int
    size: tuple[int, int, int]
    outcomes: dict[str, Outcome]

    def line(self) -> str:
        n, k, m = self.size
        parts = [f"seed={self.seed}", f"states={n}", f"events={k}", f"transitions={m}"]
        for name in PROPERTIES:
            o = self.outcomes[name]
            parts.append(f"{name}={o.status}")
        for name in PROPERTIES:
            o = self.outcomes[name]
            if o.fails:
                parts.append(f"{name}.witness={_fmt(o.counterexample)}")
        return " ".join(parts)


def _fmt(x: object) -> str:
    if isinstance(x, tuple) and all(isinstance(e, str) for e in x):
        return ",".join(x) or "<empty>"
    return str(x).replace(" ", "")


def _run_seed(args: tuple[int, Limits]) -> SeedRecord:
    seed, limits = args
    inst = random_instance(seed, limits)
    return SeedRecord(seed, inst.size(), evaluate(inst))


@dataclass
class HarnessReport:
    records: list[SeedRecord]
    shrunk: dict[tuple[int, str], Instance] = field(default_factory=dict)

    def counts(self, name: str) -> dict[str, int]:
        out = {HOLDS: 0, FAILS: 0, SKIPPED: 0}
        for r in self.records:
            out[r.outcomes[name].status] += 1
        return out

    def failures(self, name: str) -> list[SeedRecord]:
        return [r for r in self.records if r.outcomes[name].fails]

    def lines(self) -> list[str]:
        out = [r.line() for r in self.records]
        for (seed, name), inst in sorted(self.shrunk.items()):
            n, k, m = inst.size()
            out.append(f"shrunk seed={seed} property={name} states={n} events={k} transitions={m}")
        for name in PROPERTIES:
            c = self.counts(name)
            out.append(
                f"summary {name}: holds={c[HOLDS]} fails={c[FAILS]} skipped={c[SKIPPED]}"
            )
        return out


def run_harness(
    seeds: Iterable[int],
    limits: Limits = Limits(),
    *,
    workers: int = 1,
    shrink_failures: bool = True,
) -> HarnessReport:
    """Evaluate every property on each seed's instance; shrink any counterexample."""
    jobs = [(s, limits) for s in seeds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_seed, jobs, chunksize=8))
    else:
        records = [_run_seed(j) for j in jobs]
    records.sort(key=lambda r: r.seed)
    report = HarnessReport(records)
    if shrink_failures:
        for r in records:
            for name in PROPERTIES:
                if r.outcomes[name].fails:
                    inst = random_instance(r.seed, limits)
                    report.shrunk[(r.seed, name)] = shrink(
                        inst, lambda i, name=name: evaluate(i)[name].fails
                    )
    return report


# -- converse of the look-alike proposition ------------------------------------------


@dataclass(frozen=True)
class ConversePair:
    """Control-consistent supervisor states that are never look-alike."""

    seed: int
    x: int
    y: int


def find_consistent_non_lookalike(seeds: Iterable[int], limits: Limits = Limits()) -> ConversePair | None:
    """Search for a relatively observable supervisor with a consistent pair outside every U(s)."""
    for seed in seeds:
        plant, spec, mask = random_instance(seed, limits)
        sup = supconrobs(plant, spec, mask)
        if sup.is_empty() or not is_relatively_observable(sup, sup.automaton, plant, mask):
            continue
        pairs = uncertainty_sets(sup, mask).pairs
        for x, y in consistency_relation(sup).pairs():
            if x != y and (x, y) not in pairs:
                return ConversePair(seed, x, y)
    return None


__all__ = [
    "ABSENT",
    "ConversePair",
    "HarnessReport",
    "Instance",
    "Limits",
    "MIXED",
    "Outcome",
    "ProjectionVerdict",
    "SELF_LOOP_ONLY",
    "SeedRecord",
    "SelfLoopReport",
    "UNIVERSAL",
    "classify_selfloops",
    "evaluate",
    "find_consistent_non_lookalike",
    "find_tolerable_projections",
    "is_lm_closed",
    "random_instance",
    "run_harness",
    "shrink",
    "verify_proposition1",
    "verify_proposition2",
    "verify_structure",
    "verify_theorem1",
]
