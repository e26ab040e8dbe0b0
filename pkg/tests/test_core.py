import random

import pytest
from hypothesis import given, settings

from conftest import automata
import oracle
from supvkit import models
from supvkit.core import (
    Alphabet,
    Automaton,
    ObservationMask,
    canonical,
    des_isomorphic,
    enumerate_strings,
    is_sublanguage,
    is_trim,
    language_equal,
    meet,
    meet_with_pairs,
    minimize,
    reachable_trim,
    sync,
    trim,
)
from supvkit.errors import AlphabetMismatch, BudgetExceeded, ConflictingAttributes

AB = Alphabet.from_pairs([("a", True), ("b", False)])
ABC = Alphabet.from_pairs([("a", True), ("b", True), ("c", False)])


def chain(sigma, labels, marked):
    return Automaton.build(sigma, len(labels) + 1, 0, marked, [(i, e, i + 1) for i, e in enumerate(labels)])


def permuted(a: Automaton, seed: int) -> Automaton:
    """Same automaton with the non-initial states shuffled."""
    rng = random.Random(seed)
    rest = list(range(1, a.n_states))
    rng.shuffle(rest)
    perm = {0: 0, **{old: new for old, new in zip(range(1, a.n_states), rest)}}
    rows = [None] * a.n_states
    for x in range(a.n_states):
        rows[perm[x]] = {e: perm[y] for e, y in a.delta[x].items()}
    return Automaton(a.alphabet, a.n_states, 0, frozenset(perm[x] for x in a.marked), tuple(rows))


# -- data model -----------------------------------------------------------------


def test_alphabet_rejects_duplicate_labels():
    with pytest.raises(ValueError):
        Alphabet.from_pairs([("a", True), ("a", False)])


def test_alphabet_split_partitions_events():
    sigma = Alphabet.odd_controllable(range(1, 9))
    assert sigma.controllable | sigma.uncontrollable == set(sigma.labels)
    assert not sigma.controllable & sigma.uncontrollable
    assert sigma.controllable == {"1", "3", "5", "7"}


def test_union_conflicting_attributes():
    other = Alphabet.from_pairs([("a", False)])
    with pytest.raises(ConflictingAttributes):
        AB.union(other)


def test_mask_rejects_unknown_events():
    with pytest.raises(ValueError):
        ObservationMask.hiding(AB, ["z"])
    with pytest.raises(ValueError):
        ObservationMask(AB, frozenset({"z"}))


def test_mask_projects_strings():
    mask = ObservationMask.hiding(ABC, ["b"])
    assert mask.project(("a", "b", "c", "b")) == ("a", "c")
    assert mask.unobservable == {"b"}


def test_nondeterminism_rejected():
    with pytest.raises(ValueError):
        Automaton.build(AB, 2, 0, [], [(0, "a", 0), (0, "a", 1)])


def test_transition_out_of_range_rejected():
    with pytest.raises(ValueError):
        Automaton.build(AB, 1, 0, [], [(0, "a", 3)])


def test_empty_automaton_form():
    e = Automaton.empty(AB)
    assert e.is_empty() and e.initial is None and not e.marked
    assert not e.generates(())


# -- trim --------------------------------------------------------------------------


def test_trim_chain_with_middle_mark():
    a = chain(AB, ["a", "b"], [1])
    t = reachable_trim(a)
    assert t.n_states == 2
    assert list(t.transitions()) == [(0, "a", 1)]
    assert t.marked == {1}


def test_trim_without_marks_is_empty():
    assert reachable_trim(chain(AB, ["a", "b"], [])).is_empty()


def test_trim_fixpoint(sup1):
    a = sup1.automaton
    assert is_trim(a)
    assert des_isomorphic(trim(a), a)


@given(automata())
def test_trim_preserves_marked_language(a):
    t = trim(a)
    labels = a.alphabet.labels
    for s in oracle.all_strings(labels, 6):
        assert oracle.marked(a, s) == oracle.marked(t, s)
        # every closed string of the trim result extends to a marked one
        if oracle.closed(t, s):
            assert oracle.can_complete(a, s)


# -- products -----------------------------------------------------------------------


def test_sync_vehicles_is_full_shuffle():
    g = sync(models.vehicle(1), models.vehicle(2))
    assert g.n_states == 36
    assert g.n_transitions() == 2 * 6 * 5


def test_sync_private_events_interleave():
    a = Automaton.build(Alphabet.from_pairs([("a", True), ("c", True)]), 2, 0, [1], [(0, "a", 1), (1, "c", 1)])
    b = Automaton.build(Alphabet.from_pairs([("b", True), ("c", True)]), 2, 0, [1], [(0, "b", 1), (1, "c", 1)])
    p = sync(a, b)
    assert p.accepts(("a", "b")) and p.accepts(("b", "a", "c"))
    assert not p.generates(("c",))
    assert not p.accepts(("a",))


@given(automata(max_states=3, labels="ab"), automata(max_states=3, labels="bc"))
def test_sync_matches_string_oracle(a, b):
    try:
        p = sync(a, b)
    except ConflictingAttributes:
        return
    la, lb = set(a.alphabet.labels), set(b.alphabet.labels)
    for s in oracle.all_strings(p.alphabet.labels, 4):
        sa = tuple(e for e in s if e in la)
        sb = tuple(e for e in s if e in lb)
        assert oracle.closed(p, s) == (oracle.closed(a, sa) and oracle.closed(b, sb))
        assert oracle.marked(p, s) == (oracle.marked(a, sa) and oracle.marked(b, sb))


def test_sync_idempotent(sup1):
    a = sup1.automaton
    assert des_isomorphic(sync(a, a), a)


def test_sync_with_empty():
    assert sync(models.m1(), Automaton.empty(models.m1().alphabet)).is_empty()


def test_meet_identities(sup1):
    a = sup1.automaton
    assert des_isomorphic(meet(a, a), a)
    assert des_isomorphic(meet(a, Automaton.universal(a.alphabet)), a)


def test_meet_requires_same_alphabet():
    with pytest.raises(AlphabetMismatch):
        meet(models.m1(), models.m2())


def test_meet_pairs_are_provenance(tl):
    product, pairs = meet_with_pairs(tl.plant, tl.spec)
    for x, e, y in product.transitions():
        g, s = pairs[x]
        assert pairs[y] == (tl.plant.delta[g][e], tl.spec.delta[s][e])


@given(automata(max_states=3), automata(max_states=3))
def test_products_commute(a, b):
    if set(a.alphabet.labels) != set(b.alphabet.labels):
        return
    b = b.with_alphabet(a.alphabet) if a.alphabet.controllable == b.alphabet.controllable else None
    if b is None:
        return
    assert language_equal(meet(a, b), meet(b, a))
    assert des_isomorphic(canonical(meet(a, b)), canonical(sync(a, b)))


@settings(max_examples=30)
@given(automata(max_states=3), automata(max_states=3), automata(max_states=3))
def test_sync_associative(a, b, c):
    try:
        left = sync(sync(a, b), c)
        right = sync(a, sync(b, c))
    except ConflictingAttributes:
        return
    assert language_equal(left, right)


# -- isomorphism and equality ----------------------------------------------------------


def test_isomorphic_under_permutation(sup1):
    a = sup1.automaton
    for seed in range(5):
        v = des_isomorphic(a, permuted(a, seed))
        assert v.holds
        assert sorted(v.info.values()) == list(range(a.n_states))


def test_different_languages_not_isomorphic():
    one = Automaton.build(AB, 1, 0, [0], [(0, "a", 0)])
    two = chain(AB, ["a"], [0, 1])
    v = des_isomorphic(one, two)
    assert not v
    assert not language_equal(one, two)
    w = language_equal(one, two).witness
    assert oracle.closed(one, w) != oracle.closed(two, w) or oracle.marked(one, w) != oracle.marked(two, w)


def test_language_equal_chains_witness():
    ab = chain(ABC, ["a", "b"], [2])
    ac = chain(ABC, ["a", "c"], [2])
    v = language_equal(ab, ac)
    assert not v
    # oracle: the shortest strings on which the two disagree
    table = {s: (oracle.closed(ab, s), oracle.closed(ac, s)) for s in oracle.all_strings("abc", 2)}
    disagree = {s for s, (x, y) in table.items() if x != y}
    assert disagree == {("a", "b"), ("a", "c")}
    assert v.witness in disagree


@given(automata(max_states=3, labels="ab"), automata(max_states=3, labels="ab"))
def test_language_equal_matches_enumeration(a, b):
    if a.alphabet != b.alphabet:
        b = b.with_alphabet(a.alphabet) if set(a.alphabet.labels) == set(b.alphabet.labels) else None
    if b is None:
        return
    bound = a.n_states * b.n_states + 1
    same = all(
        oracle.closed(a, s) == oracle.closed(b, s) and oracle.marked(a, s) == oracle.marked(b, s)
        for s in oracle.all_strings(a.alphabet.labels, bound)
    )
    assert language_equal(a, b).holds == same


@given(automata(max_states=4))
def test_isomorphism_implies_equality(a):
    a = trim(a)
    for seed in range(2):
        b = permuted(a, seed) if a.n_states else a
        assert des_isomorphic(a, b)
        assert language_equal(a, b)


@given(automata(max_states=4))
def test_minimize_preserves_language(a):
    m = minimize(a)
    assert language_equal(m, a)
    assert m.n_states <= a.n_states
    assert minimize(m).n_states == m.n_states


def test_sublanguage(sup1, tl):
    assert is_sublanguage(sup1.automaton, tl.plant, marked=True)
    v = is_sublanguage(tl.plant, sup1.automaton)
    assert not v and tl.plant.generates(v.witness) and not sup1.automaton.generates(v.witness)


# -- enumeration ----------------------------------------------------------------------


def test_enumerate_length_zero():
    a = chain(AB, ["a"], [0])
    assert enumerate_strings(a, 0) == {(): (True, True)}


def test_enumerate_named_strings(sup1, sup3):
    s = tuple("11,13,10,15,21,12,23,20,25,22".split(","))
    assert enumerate_strings(sup3.automaton, 0) == {(): (True, False)}
    assert sup3.automaton.accepts(s)
    table = enumerate_strings(sup1.automaton, 7)
    assert table[tuple("1234513")] == (False, False)


def test_enumerate_budget(monkeypatch, sup1):
    with pytest.raises(BudgetExceeded):
        enumerate_strings(sup1.automaton, 8, cap=100)
    monkeypatch.setenv("SUPVKIT_BUDGET", "10")
    with pytest.raises(BudgetExceeded):
        enumerate_strings(sup1.automaton, 3)


@given(automata(max_states=4))
def test_enumerate_agrees_with_walk(a):
    table = enumerate_strings(a, 4)
    walked = oracle.strings_of(a, 4)
    assert {s for s, (c, _) in table.items() if c} == walked
    for s, (c, m) in table.items():
        assert m == oracle.marked(a, s)
