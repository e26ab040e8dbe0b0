"""JSON automaton documents and DOT rendering.

A document looks like::

    {
      "name": "m1",
      "events": [{"label": "1", "controllable": true}, {"label": "2", "controllable": false}],
      "states": 2,
      "initial": 0,
      "marked": [0],
      "transitions": [[0, "1", 1], [1, "2", 0]]
    }

with an optional ``annotations`` object on tool outputs.  Parsing is strict:
unknown fields, wrong types, unknown labels and duplicate transitions are
all rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from supvkit.core import Alphabet, Automaton, Event
from supvkit.errors import ParseError, ValidationError

REQUIRED = ("name", "events", "states", "initial", "marked", "transitions")
OPTIONAL = ("annotations",)


@dataclass(eq=False)
class AutomatonDocument:
    name: str
    automaton: Automaton
    annotations: dict[str, Any] = field(default_factory=dict)


def _expect(cond: bool, where: str, msg: str) -> None:
    if not cond:
        raise ParseError(f"{where}: {msg}")


def _is_int(x: object) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def from_dict(data: object) -> AutomatonDocument:
    """Validate a decoded JSON object and build its automaton."""
    _expect(isinstance(data, dict), "document", "expected a JSON object")
    unknown = sorted(set(data) - set(REQUIRED) - set(OPTIONAL))
    _expect(not unknown, "document", f"unknown fields {unknown}")
    missing = [k for k in REQUIRED if k not in data]
    _expect(not missing, "document", f"missing fields {missing}")

    name = data["name"]
    _expect(isinstance(name, str), "name", "expected a string")

    events = data["events"]
    _expect(isinstance(events, list), "events", "expected a list")
    parsed_events = []
    for i, ev in enumerate(events):
        where = f"events[{i}]"
        _expect(isinstance(ev, dict), where, "expected an object")
        _expect(set(ev) == {"label", "controllable"}, where, "expected exactly label and controllable")
        _expect(isinstance(ev["label"], str) and ev["label"], where, "label must be a nonempty string")
        _expect(isinstance(ev["controllable"], bool), where, "controllable must be a boolean")
        parsed_events.append(Event(ev["label"], ev["controllable"]))
    labels = [e.label for e in parsed_events]
    if len(set(labels)) != len(labels):
        raise ValidationError("events: duplicate event label")
    alphabet = Alphabet(tuple(parsed_events))

    n = data["states"]
    _expect(_is_int(n) and n >= 0, "states", "expected a non-negative integer")
    initial = data["initial"]
    if n == 0:
        _expect(initial is None, "initial", "must be null for an automaton without states")
    else:
        _expect(_is_int(initial), "initial", "expected an integer")
        if not 0 <= initial < n:
            raise ValidationError(f"initial: state {initial} out of range")

    marked = data["marked"]
    _expect(isinstance(marked, list) and all(_is_int(x) for x in marked), "marked", "expected a list of integers")
    for x in marked:
        if not 0 <= x < n:
            raise ValidationError(f"marked: state {x} out of range")
    if len(set(marked)) != len(marked):
        raise ValidationError("marked: duplicate state")

    transitions = data["transitions"]
    _expect(isinstance(transitions, list), "transitions", "expected a list")
    rows: list[dict[str, int]] = [dict() for _ in range(n)]
    for i, t in enumerate(transitions):
        where = f"transitions[{i}]"
        _expect(
            isinstance(t, list) and len(t) == 3 and _is_int(t[0]) and isinstance(t[1], str) and _is_int(t[2]),
            where,
            "expected [source, label, target]",
        )
        src, label, dst = t
        if label not in alphabet:
            raise ValidationError(f"{where}: unknown label {label!r}")
        if not (0 <= src < n and 0 <= dst < n):
            raise ValidationError(f"{where}: state out of range")
        if label in rows[src]:
            raise ValidationError(f"{where}: duplicate transition from {src} on {label!r}")
        rows[src][label] = dst

    annotations = data.get("annotations", {})
    _expect(isinstance(annotations, dict), "annotations", "expected an object")
    automaton = Automaton(alphabet, n, initial, frozenset(marked), tuple(rows))
    return AutomatonDocument(name, automaton, dict(annotations))


def to_dict(doc: AutomatonDocument) -> dict[str, Any]:
    """Canonical JSON-ready form: events in alphabet order, transitions by (source, event)."""
    a = doc.automaton
    out: dict[str, Any] = {
        "name": doc.name,
        "events": [{"label": e.label, "controllable": e.controllable} for e in a.alphabet.events],
        "states": a.n_states,
        "initial": a.initial,
        "marked": sorted(a.marked),
        "transitions": [[x, label, y] for x, label, y in a.transitions()],
    }
    if doc.annotations:
        out["annotations"] = doc.annotations
    return out


def parse(text: str) -> AutomatonDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return from_dict(data)


def serialize(doc: AutomatonDocument) -> str:
    """Deterministic text: one transition per line keeps diffs readable."""
    data = to_dict(doc)
    lines = ["{"]
    items = list(data.items())
    for i, (key, value) in enumerate(items):
        comma = "," if i < len(items) - 1 else ""
        if key in ("events", "transitions") and value:
            inner = ",\n".join("    " + json.dumps(v) for v in value)
            lines.append(f'  "{key}": [\n{inner}\n  ]{comma}')
        else:
            lines.append(f'  "{key}": {json.dumps(value, sort_keys=True)}{comma}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def load(path: str | Path) -> AutomatonDocument:
    return parse(Path(path).read_text())


def dump(doc: AutomatonDocument, path: str | Path) -> None:
    Path(path).write_text(serialize(doc))


def document(a: Automaton, name: str, **annotations: Any) -> AutomatonDocument:
    return AutomatonDocument(name, a, {k: v for k, v in annotations.items() if v is not None})


# -- DOT ----------------------------------------------------------------------


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def dot_export(a: Automaton, name: str = "G") -> str:
    """Graphviz digraph: marked states double-circled, an arrow into the
    initial state, uncontrollable events drawn dashed.  Parallel edges
    between the same two states are merged into one comma-labelled edge.
    """
    lines = [f"digraph {_quote(name)} {{"]
    if not a.is_empty():
        lines += ["  rankdir=LR;", "  node [shape=circle];", "  __start [shape=point];"]
        for x in range(a.n_states):
            shape = "doublecircle" if x in a.marked else "circle"
            lines.append(f"  {x} [shape={shape}];")
        lines.append(f"  __start -> {a.initial};")
        grouped: dict[tuple[int, int, bool], list[str]] = {}
        for x, label, y in a.transitions():
            grouped.setdefault((x, y, a.alphabet.is_controllable(label)), []).append(label)
        for (x, y, ctrl), labels in grouped.items():
            style = "" if ctrl else ", style=dashed"
            lines.append(f"  {x} -> {y} [label={_quote(','.join(labels))}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


__all__ = [
    "AutomatonDocument",
    "document",
    "dot_export",
    "dump",
    "from_dict",
    "load",
    "parse",
    "serialize",
    "to_dict",
]
