"""The seven acceptance criteria, one test each, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they
are also collected into an "acceptance criteria" section of the summary.
"""

import pytest

import oracle
from supvkit import models
from supvkit.analysis import PROPERTIES, classify_selfloops, random_instance, run_harness
from supvkit.core import des_isomorphic, language_equal, meet
from supvkit.observation import (
    inverse_project,
    is_normal,
    is_observable,
    is_relatively_observable,
    project,
    supconrobs,
)
from supvkit.reduction import check_rsup_normality, supreduce
from supvkit.synthesis import control_equivalent, projected_control_equivalent, supcon

N_SEEDS = 500
MIN_NON_SKIPPED = 50


def seq(text: str) -> tuple[str, ...]:
    return tuple(text.split(","))


@pytest.fixture(scope="module")
def harness():
    return run_harness(range(N_SEEDS))


def test_criterion_1_transfer_line_pipeline(acceptance, tl, sup1):
    robs = supconrobs(tl.plant, tl.spec, tl.mask(["1", "3"]))
    same = language_equal(robs.automaton, sup1.automaton)
    ok = not sup1.is_empty() and bool(same)
    acceptance(1, ok, f"SUP1 has {sup1.n_states} states; supconrobs with 1,3 hidden is language-equal: {same.holds}")
    assert ok


def test_criterion_2_rsup1_structure(acceptance, tl, sup1, rsup1):
    report = classify_selfloops(rsup1.automaton)
    loops_ok = {"1", "3"} <= report.self_loop_only and "8" not in report.self_loop_only
    mask = tl.mask(["8"])
    obs = is_observable(sup1, tl.plant, mask)
    w = obs.witness
    k = sup1.automaton
    replay = (
        w is not None
        and mask.project(w.s) == mask.project(w.s_prime)
        and oracle.closed(k, w.s + (w.event,))
        and oracle.closed(tl.plant, w.s_prime + (w.event,))
        and not oracle.closed(k, w.s_prime + (w.event,))
    )
    member = oracle.closed(k, seq("1,2,3,4,5,1,8,3")) and not oracle.closed(k, seq("1,2,3,4,5,1,3"))
    ok = loops_ok and not obs and replay and member
    acceptance(
        2,
        ok,
        f"RSUP1 {rsup1.n_states} states, 1 and 3 loop-only, 8 {report.classes['8']}; "
        f"hiding 8 breaks observability ({w}); membership facts {member}",
    )
    assert ok


def test_criterion_3_transfer_line_hiding_1_3_5(acceptance, tl, sup2):
    report = classify_selfloops(supreduce(sup2).automaton)
    loops_ok = {"1", "3", "5"} <= report.self_loop_only
    member = oracle.closed(sup2.automaton, seq("1,2,3,1,4")) and not oracle.marked(tl.plant, seq("1,2,3,4,5,1,6"))
    ok = not sup2.is_empty() and loops_ok and member
    acceptance(3, ok, f"SUP2 has {sup2.n_states} states; 1,3,5 loop-only {loops_ok}; membership facts {member}")
    assert ok


def guideway_items(gw, sup3, rsup3):
    """Every sub-claim of the guideway criterion, evaluated independently."""
    report = classify_selfloops(rsup3.automaton)
    mask = gw.mask(["13", "23"])
    ambient = models.guideway_ambient(sup3)
    return {
        "nonempty": not sup3.is_empty(),
        "rel_obs": is_relatively_observable(sup3, ambient, gw.plant, mask).holds,
        "13,23 loop-only": {"13", "23"} <= report.self_loop_only,
        "15,25 universal": {"15", "25"} <= report.universal,
        "normal hiding 15,25": is_normal(sup3, gw.plant, gw.mask(["15", "25"])).holds,
        "P0(RSUP3) iso P0(SUP3)": des_isomorphic(project(rsup3.automaton, mask), project(sup3, mask)).holds,
        "projected control equivalence": projected_control_equivalent(rsup3.automaton, sup3, gw.plant, mask).holds,
    }


UNATTAINABLE = ("15,25 universal", "normal hiding 15,25", "P0(RSUP3) iso P0(SUP3)")


@pytest.mark.xfail(
    strict=True,
    reason=(
        "the controllable and observable guideway supervisor must disable 15 while vehicle 2 "
        "occupies section 4, so 15 cannot be an unconditional self-loop; with 15 and 25 hidden the "
        "blocked string 11,13,10,21,23 looks like the legal 11,13,10,15,21,23, and the projected "
        "reduced supervisor accepts strings the plant never generates, so the two observers differ"
    ),
)
def test_criterion_4_guideway(acceptance, gw, sup3, rsup3):
    items = guideway_items(gw, sup3, rsup3)
    failed = [name for name, ok in items.items() if not ok]
    ok = not failed
    acceptance(4, ok, "all guideway items hold" if ok else f"unattainable items: {'; '.join(failed)}")
    assert ok


def test_criterion_4_attainable_items(gw, sup3, rsup3):
    items = guideway_items(gw, sup3, rsup3)
    for name, ok in items.items():
        assert ok == (name not in UNATTAINABLE), name
    # the projections agree once the reduced supervisor is run against the plant
    mask = gw.mask(["13", "23"])
    assert des_isomorphic(project(meet(gw.plant, rsup3.automaton), mask), project(sup3, mask))


def test_criterion_5_structure(acceptance, tl, gw, sup1, sup2, sup3, harness):
    bundled = [sup1, sup2, sup3, supcon(gw.plant, gw.spec)]
    bundled_ok = True
    for sup in bundled:
        r = supreduce(sup, verify=False).automaton
        bundled_ok &= control_equivalent(r, sup, sup.plant).holds and check_rsup_normality(r, sup).holds
    counts = harness.counts("structure")
    ok = bundled_ok and counts["fails"] == 0
    acceptance(
        5,
        ok,
        f"bundled instances {'pass' if bundled_ok else 'fail'}; {N_SEEDS} seeds: "
        f"{counts['holds']} hold, {counts['fails']} fail, {counts['skipped']} empty",
    )
    assert ok


def test_criterion_6_propositions_and_theorem(acceptance, harness):
    parts, ok = [], True
    for name in PROPERTIES[1:]:
        c = harness.counts(name)
        ok &= c["fails"] == 0 and c["holds"] >= MIN_NON_SKIPPED
        parts.append(f"{name} {c['holds']}/{c['holds'] + c['fails']} (skipped {c['skipped']})")
    acceptance(6, ok, "; ".join(parts))
    assert ok


def test_criterion_7_oracles(acceptance):
    problems = []
    for seed in range(100):
        plant, spec, mask = random_instance(seed)
        k = supcon(plant, spec).automaton
        for s in oracle.strings_of(k, 8):
            if not oracle.can_complete(k, s):
                problems.append((seed, "blocking", s))
            for e in plant.alphabet.uncontrollable:
                if oracle.closed(plant, s + (e,)) and not oracle.closed(k, s + (e,)):
                    problems.append((seed, "uncontrollable", s + (e,)))
        p = project(plant, mask)
        back = project(inverse_project(p, plant.alphabet), mask)
        for t in oracle.all_strings(p.alphabet.labels, 6):
            if (oracle.closed(back, t), oracle.marked(back, t)) != (oracle.closed(p, t), oracle.marked(p, t)):
                problems.append((seed, "P(Pinv(L)) != L", t))
        up = inverse_project(p, plant.alphabet)
        for s in oracle.strings_of(plant, 6):
            if not oracle.closed(up, s) or (oracle.marked(plant, s) and not oracle.marked(up, s)):
                problems.append((seed, "L not in Pinv(P(L))", s))
    ok = not problems
    acceptance(7, ok, f"100 instances, {len(problems)} oracle disagreements" + (f", first {problems[0]}" if problems else ""))
    assert ok
