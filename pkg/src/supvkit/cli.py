"""Command-line front end: ``supvkit <command> ...``.

Inputs are JSON automaton documents, a ``bundle:<name>`` reference, or ``-``
for standard input.  Automaton outputs go to ``-o FILE`` or standard output.

Exit codes: 0 success or property holds, 1 property fails (witness printed),
2 usage or validation error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from supvkit import analysis, bundle
from supvkit.core import (
    Automaton,
    ObservationMask,
    des_isomorphic,
    meet,
    sync,
    trim,
)
from supvkit.errors import SupvkitError
from supvkit.io import AutomatonDocument, dot_export, parse, serialize
from supvkit.observation import (
    ObservationWitness,
    inverse_project,
    is_normal,
    is_observable,
    is_relatively_observable,
    project,
    supconrobs,
)
from supvkit.reduction import supreduce
from supvkit.synthesis import Supervisor, make_supervisor, supcon


class UsageError(Exception):
    pass


def _load(ref: str) -> AutomatonDocument:
    if ref.startswith(bundle.PREFIX):
        try:
            return bundle.load_bundled(ref[len(bundle.PREFIX):])
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
    if ref == "-":
        return parse(sys.stdin.read())
    try:
        with open(ref) as fh:
            return parse(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {ref}: {exc.strerror}") from None


def _emit(args: argparse.Namespace, doc: AutomatonDocument) -> None:
    text = serialize(doc)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _labels(raw: str) -> list[str]:
    return [x.strip() for x in raw.split(",") if x.strip()]


def _mask(args: argparse.Namespace, a: Automaton) -> ObservationMask:
    sigma = a.alphabet
    if args.unobservable is not None:
        hidden = _labels(args.unobservable)
    elif args.observable is not None:
        seen = set(_labels(args.observable))
        unknown = seen - set(sigma.labels)
        if unknown:
            raise UsageError(f"observable events not in alphabet: {sorted(unknown)}")
        hidden = [e for e in sigma.labels if e not in seen]
    else:
        hidden = []
    try:
        return ObservationMask.hiding(sigma, hidden)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _lift_spec(spec: Automaton, plant: Automaton) -> Automaton:
    """Self-loop plant events missing from ``spec`` and adopt the plant's event order."""
    full = plant.alphabet.union(spec.alphabet)
    if len(full) != len(plant.alphabet):
        extra = sorted(set(spec.alphabet.labels) - set(plant.alphabet.labels))
        raise UsageError(f"specification events not in the plant: {extra}")
    return inverse_project(spec, plant.alphabet)


def _flags(sup: Supervisor) -> dict:
    f = sup.flags
    order = sup.plant.alphabet.sort
    return {
        "disabled": [order(d) for d in f.disabled],
        "marked_in_plant": list(f.marked_in_plant),
    }


def _print_witness(w: object) -> None:
    if isinstance(w, ObservationWitness):
        print(f"s={','.join(w.s)}")
        print(f"s'={','.join(w.s_prime)}")
        if w.event is not None:
            print(f"event={w.event}")
        print(f"condition={w.condition}")
    elif isinstance(w, tuple):
        print(f"witness={','.join(w)}")
    elif w is not None:
        print(f"witness={w}")


def _verdict(v) -> int:
    print("holds" if v else "fails")
    if not v:
        _print_witness(v.witness)
    return 0 if v else 1


# -- commands -----------------------------------------------------------------


def cmd_sync(args):
    docs = [_load(r) for r in args.inputs]
    _emit(args, AutomatonDocument("sync", sync(*[d.automaton for d in docs])))
    return 0


def cmd_meet(args):
    a, b = _load(args.a).automaton, _load(args.b).automaton
    if set(a.alphabet.labels) != set(b.alphabet.labels):
        raise UsageError("meet needs operands over the same events")
    _emit(args, AutomatonDocument("meet", meet(a, b.with_alphabet(a.alphabet))))
    return 0


def cmd_trim(args):
    doc = _load(args.input)
    _emit(args, AutomatonDocument(doc.name, trim(doc.automaton)))
    return 0


def cmd_supcon(args):
    plant = _load(args.plant).automaton
    spec = _lift_spec(_load(args.spec).automaton, plant)
    sup = supcon(plant, spec)
    _emit(args, AutomatonDocument("sup", sup.automaton, {"flags": _flags(sup)}))
    return 0


def cmd_supconrobs(args):
    plant = _load(args.plant).automaton
    spec = _lift_spec(_load(args.spec).automaton, plant)
    sup = supconrobs(plant, spec, _mask(args, plant), ambient=args.ambient)
    _emit(args, AutomatonDocument("sup", sup.automaton, {"flags": _flags(sup)}))
    return 0


def cmd_supreduce(args):
    plant = _load(args.plant).automaton
    sup = make_supervisor(_load(args.sup).automaton, plant)
    r = supreduce(sup, prefer=_labels(args.prefer or ""))
    cell_of = [r.cell_of.get(x) for x in range(sup.n_states)]
    _emit(args, AutomatonDocument("rsup", r.automaton, {"cell_of": cell_of}))
    return 0


def cmd_project(args):
    doc = _load(args.input)
    p = project(doc.automaton, _mask(args, doc.automaton), minimal=args.minimal)
    _emit(args, AutomatonDocument(f"P({doc.name})", p))
    return 0


def cmd_check_obs(args):
    sup, plant = _load(args.sup).automaton, _load(args.plant).automaton
    return _verdict(is_observable(sup, plant, _mask(args, plant)))


def cmd_check_robs(args):
    sup = _load(args.sup).automaton
    ambient = _load(args.ambient).automaton
    plant = _load(args.plant).automaton
    return _verdict(is_relatively_observable(sup, ambient, plant, _mask(args, plant)))


def cmd_check_normal(args):
    sup, plant = _load(args.sup).automaton, _load(args.plant).automaton
    return _verdict(is_normal(sup, plant, _mask(args, plant)))


def cmd_classify(args):
    report = analysis.classify_selfloops(_load(args.input).automaton)
    for e, cls in report.classes.items():
        print(f"{e} {cls}")
    return 0


def cmd_find_projections(args):
    plant = _load(args.plant).automaton
    sup = make_supervisor(_load(args.sup).automaton, plant)
    ambient = _load(args.ambient).automaton
    verdicts = analysis.find_tolerable_projections(
        sup,
        plant,
        ambient,
        exhaustive=args.exhaustive,
        also_try=[_labels(x) for x in args.also or []],
    )
    for v in verdicts:
        hidden = ",".join(v.hidden) or "-"
        print(f"hidden={hidden} rel_obs={str(v.rel_obs).lower()} normal={str(v.normal).lower()}")
    return 0


def cmd_iso(args):
    a, b = _load(args.a).automaton, _load(args.b).automaton
    v = des_isomorphic(a, b)
    print("holds" if v else "fails")
    if v:
        for x, y in v.info.items():
            print(f"{x} -> {y}")
    else:
        _print_witness(v.witness)
        print(f"reason={v.info}")
    return 0 if v else 1


def cmd_dot(args):
    doc = _load(args.input)
    text = dot_export(doc.automaton, doc.name)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_harness(args):
    limits = analysis.Limits(args.max_states, args.max_events)
    seeds = range(args.start, args.start + args.seeds)
    report = analysis.run_harness(
        seeds, limits, workers=args.workers, shrink_failures=not args.no_shrink
    )
    for line in report.lines():
        print(line)
    failed = any(report.failures(name) for name in analysis.PROPERTIES)
    return 1 if failed else 0


# -- parser ----------------------------------------------------------------------


def _add_mask(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--unobservable", metavar="LABELS", help="comma-separated hidden events")
    g.add_argument("--observable", metavar="LABELS", help="comma-separated observed events")


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("-o", "--output", help="write the result here instead of standard output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="supvkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sync", help="synchronous product")
    p.add_argument("inputs", nargs="+")
    _add_output(p)
    p.set_defaults(func=cmd_sync)

    p = sub.add_parser("meet", help="product over a shared alphabet")
    p.add_argument("a")
    p.add_argument("b")
    _add_output(p)
    p.set_defaults(func=cmd_meet)

    p = sub.add_parser("trim", help="reachable and coreachable part")
    p.add_argument("input")
    _add_output(p)
    p.set_defaults(func=cmd_trim)

    p = sub.add_parser("supcon", help="supremal controllable sublanguage")
    p.add_argument("plant")
    p.add_argument("spec")
    _add_output(p)
    p.set_defaults(func=cmd_supcon)

    p = sub.add_parser("supconrobs", help="controllable and relatively observable supervisor")
    p.add_argument("plant")
    p.add_argument("spec")
    p.add_argument("--ambient", choices=("moving", "fixed"), default="moving")
    _add_mask(p)
    _add_output(p)
    p.set_defaults(func=cmd_supconrobs)

    p = sub.add_parser("supreduce", help="reduced supervisor")
    p.add_argument("sup")
    p.add_argument("plant")
    p.add_argument("--prefer", metavar="LABELS", help="events to self-loop first")
    _add_output(p)
    p.set_defaults(func=cmd_supreduce)

    p = sub.add_parser("project", help="natural projection")
    p.add_argument("input")
    p.add_argument("--minimal", action="store_true", help="minimize the observer")
    _add_mask(p)
    _add_output(p)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("check-obs", help="observability")
    p.add_argument("sup")
    p.add_argument("plant")
    _add_mask(p)
    p.set_defaults(func=cmd_check_obs)

    p = sub.add_parser("check-robs", help="relative observability")
    p.add_argument("sup")
    p.add_argument("ambient")
    p.add_argument("plant")
    _add_mask(p)
    p.set_defaults(func=cmd_check_robs)

    p = sub.add_parser("check-normal", help="normality")
    p.add_argument("sup")
    p.add_argument("plant")
    _add_mask(p)
    p.set_defaults(func=cmd_check_normal)

    p = sub.add_parser("classify-selfloops", help="per-event self-loop classes")
    p.add_argument("input")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("find-projections", help="tolerable observation masks")
    p.add_argument("sup")
    p.add_argument("plant")
    p.add_argument("ambient")
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--also", action="append", metavar="LABELS", help="extra hidden set to check")
    p.set_defaults(func=cmd_find_projections)

    p = sub.add_parser("iso", help="DES-isomorphism")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("dot", help="Graphviz rendering")
    p.add_argument("input")
    _add_output(p)
    p.set_defaults(func=cmd_dot)

    p = sub.add_parser("harness", help="randomized property harness")
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-states", type=int, default=6)
    p.add_argument("--max-events", type=int, default=4)
    p.add_argument("--no-shrink", action="store_true")
    p.set_defaults(func=cmd_harness)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, SupvkitError, ValueError) as exc:
        print(f"supvkit: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
