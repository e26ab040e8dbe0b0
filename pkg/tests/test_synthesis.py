from itertools import combinations

import pytest
from hypothesis import given, settings

from conftest import automata
import oracle
from supvkit.analysis import random_instance
from supvkit.core import (
    Alphabet,
    Automaton,
    ObservationMask,
    language_equal,
    meet,
    meet_with_pairs,
    subautomaton,
    trim,
)
from supvkit.errors import AlphabetMismatch, NotSubbehavior
from supvkit.observation import supconrobs
from supvkit.synthesis import (
    compute_flags,
    control_equivalent,
    forbid_states,
    is_controllable,
    make_supervisor,
    projected_control_equivalent,
    supcon,
)


def controllable_by_walk(k: Automaton, g: Automaton, max_len: int) -> bool:
    uc = g.alphabet.uncontrollable
    for s in oracle.strings_of(k, max_len):
        for e in uc:
            if oracle.closed(g, s + (e,)) and not oracle.closed(k, s + (e,)):
                return False
    return True


def tl_string(text: str) -> tuple[str, ...]:
    return tuple(text.split(","))


# -- supcon -----------------------------------------------------------------------


def test_supcon_all_controllable_is_trim_plant():
    sigma = Alphabet.from_pairs([("a", True), ("b", True)])
    g = Automaton.build(sigma, 3, 0, [0, 1], [(0, "a", 1), (1, "b", 0), (0, "b", 2)])
    sup = supcon(g, g)
    assert language_equal(sup.automaton, trim(g))


def test_supcon_forbidden_uncontrollable_step_empties():
    sigma = Alphabet.from_pairs([("a", False)])
    g = Automaton.build(sigma, 2, 0, [0, 1], [(0, "a", 1)])
    e = Automaton.build(sigma, 1, 0, [0], [])
    sup = supcon(g, e)
    assert sup.is_empty() and sup.n_states == 0


def test_supcon_transfer_line(tl, sup1):
    assert sup1.n_states == 28
    assert sup1.automaton.n_transitions() == 65
    assert sup1.automaton.generates(tl_string("1,2,3,4,5,1,8,3"))
    assert not sup1.automaton.generates(tl_string("1,2,3,4,5,1,3"))
    assert is_controllable(sup1.automaton, tl.plant)


def test_supcon_requires_same_alphabet(tl):
    with pytest.raises(AlphabetMismatch):
        supcon(tl.plant, tl.components["b1"])


def test_supcon_idempotent(tl, sup1):
    again = supcon(tl.plant, sup1.automaton)
    assert language_equal(again.automaton, sup1.automaton)


@pytest.mark.parametrize("seed", range(40))
def test_supcon_oracles(seed):
    plant, spec, _ = random_instance(seed)
    sup = supcon(plant, spec)
    k = sup.automaton
    assert controllable_by_walk(k, plant, 7)
    for s in oracle.strings_of(k, 6):
        assert oracle.can_complete(k, s)
        if oracle.marked(k, s):
            assert oracle.marked(plant, s) and oracle.marked(spec, s)


@pytest.mark.parametrize("seed", range(60))
def test_supcon_is_supremal_among_state_subsets(seed):
    # every controllable language carved out of the product by deleting
    # states is contained in the synthesized one
    plant, spec, _ = random_instance(seed)
    product, _ = meet_with_pairs(plant, spec)
    if product.n_states > 9:
        pytest.skip("product too large for subset enumeration")
    sup = supcon(plant, spec).automaton
    states = range(product.n_states)
    for r in range(1, product.n_states + 1):
        for keep in combinations(states, r):
            if product.initial not in keep:
                continue
            cand = trim(subautomaton(product, keep))
            if cand.is_empty() or not controllable_by_walk(cand, plant, 6):
                continue
            for s in oracle.strings_of(cand, 6):
                assert oracle.closed(sup, s)
                if oracle.marked(cand, s):
                    assert oracle.marked(sup, s)


# -- flags ---------------------------------------------------------------------------


def test_flags_of_plant_itself(tl):
    g = trim(tl.plant)
    f = compute_flags(g, g)
    assert all(not d for d in f.disabled)
    assert f.marked_in_sup == f.marked_in_plant == tuple(x in g.marked for x in range(g.n_states))


def test_flags_transfer_line_disablement(sup1):
    k = sup1.automaton
    before = k.run(tl_string("1,2,3,4,5,1"))
    after_reject = k.run(tl_string("1,2,3,4,5,1,8"))
    assert "3" in sup1.flags.disabled[before]
    assert "3" in sup1.flags.enabled[after_reject]


def test_flags_invariants(sup1, sup3):
    for sup in (sup1, sup3):
        f = sup.flags
        for x in range(sup.n_states):
            assert not f.enabled[x] & f.disabled[x]
            assert f.marked_in_sup[x] == (x in sup.automaton.marked)
            assert len(f.plant_states[x]) == 1  # synthesized supervisors are plant products


@pytest.mark.parametrize("seed", range(30))
def test_flags_agree_with_string_oracle(seed):
    plant, spec, _ = random_instance(seed)
    sup = supcon(plant, spec)
    k = sup.automaton
    disabled = [set() for _ in range(k.n_states)]
    t = [False] * k.n_states
    for s in oracle.strings_of(k, 8):
        x = oracle.run(k, s)
        t[x] = t[x] or oracle.marked(plant, s)
        for e in plant.alphabet.labels:
            if oracle.closed(plant, s + (e,)) and not oracle.closed(k, s + (e,)):
                disabled[x].add(e)
    assert [set(d) for d in sup.flags.disabled] == disabled
    assert list(sup.flags.marked_in_plant) == t


def test_flags_reject_non_subbehavior(tl):
    with pytest.raises(NotSubbehavior, match="string 2 is not"):
        compute_flags(Automaton.universal(tl.plant.alphabet), tl.plant)


def test_flags_existential_over_pairings():
    # a one-state supervisor paired with two plant states
    sigma = Alphabet.from_pairs([("a", True), ("b", True)])
    g = Automaton.build(sigma, 2, 0, [1], [(0, "a", 1), (1, "a", 0), (1, "b", 1)])
    k = Automaton.build(sigma, 1, 0, [0], [(0, "a", 0)])
    sup = make_supervisor(k, g)
    assert sup.plant_pairing[0] == {0, 1}
    assert sup.flags.disabled[0] == {"b"}
    assert sup.flags.marked_in_plant[0]


# -- control equivalence --------------------------------------------------------------


def test_control_equivalent_to_itself(sup1, tl):
    assert control_equivalent(sup1.automaton, sup1, tl.plant)


def test_control_equivalence_detects_lost_transition(sup1, tl):
    k = sup1.automaton
    x, e, _ = next((x, e, y) for x, e, y in k.transitions() if x == k.run(tl_string("1,2")) and e == "3")
    rows = list(k.delta)
    rows[x] = {l: y for l, y in rows[x].items() if l != e}
    cand = Automaton(k.alphabet, k.n_states, k.initial, k.marked, tuple(rows))
    v = control_equivalent(cand, sup1, tl.plant)
    assert not v
    s = v.witness
    assert oracle.closed(k, s) != oracle.closed(meet(tl.plant, cand), s) or oracle.marked(
        k, s
    ) != oracle.marked(meet(tl.plant, cand), s)


def test_control_equivalence_alphabet_mismatch(sup1, tl):
    with pytest.raises(AlphabetMismatch):
        control_equivalent(tl.components["m1"], sup1, tl.plant)


def test_projected_control_equivalence(sup1, sup3, rsup3, gw, tl):
    assert projected_control_equivalent(sup1.automaton, sup1, tl.plant, ObservationMask.full(tl.plant.alphabet))
    assert projected_control_equivalent(rsup3.automaton, sup3, gw.plant, gw.mask(["13", "23"]))
    empty = Automaton.empty(tl.plant.alphabet)
    assert not projected_control_equivalent(empty, sup1, tl.plant, tl.mask([]))


# -- forbid_states -------------------------------------------------------------------


def test_forbid_nothing_is_trim(gw):
    assert language_equal(forbid_states(gw.plant, lambda x: False), trim(gw.plant))


def test_forbid_everything_is_empty(gw):
    assert forbid_states(gw.plant, lambda x: True).is_empty()


def test_guideway_spec_excludes_collisions(gw):
    e = gw.spec
    collide = tuple("11,21".split(","))  # both vehicles in section 1
    assert gw.plant.generates(collide) and not e.generates(collide)
    assert e.accepts(tuple("11,13,10,15,21,12,23,20,25,22".split(",")))
    assert e.n_states == 36 - 4


@settings(max_examples=40)
@given(automata(max_states=4, labels="ab"))
def test_supconrobs_full_mask_is_supcon(g):
    g = trim(g)
    if g.is_empty():
        return
    spec = forbid_states(g, lambda x: x == g.n_states - 1 and x != 0)
    full = ObservationMask.full(g.alphabet)
    assert language_equal(supconrobs(g, spec, full).automaton, supcon(g, spec).automaton)
