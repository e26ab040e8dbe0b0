"""Bundled example documents, addressable as ``bundle:<name>`` from the command line.

The JSON files under ``supvkit/data`` are rendered from :mod:`supvkit.models`;
``python -m supvkit.bundle <dir>`` regenerates them and the test suite checks
that regeneration is byte-identical.
"""

from __future__ import annotations

import sys
from importlib import resources
from pathlib import Path
from typing import Callable

from supvkit import models
from supvkit.core import Automaton
from supvkit.io import AutomatonDocument, parse, serialize

PREFIX = "bundle:"

BUILDERS: dict[str, Callable[[], Automaton]] = {
    "m1": models.m1,
    "m2": models.m2,
    "tu": models.test_unit,
    "b1": models.buffer1,
    "b2": models.buffer2,
    "transfer_line_plant": models.transfer_line_plant,
    "transfer_line_spec": models.transfer_line_spec,
    "transfer_line_ambient": models.transfer_line_ambient,
    "v1": lambda: models.vehicle(1),
    "v2": lambda: models.vehicle(2),
    "guideway_plant": models.guideway_plant,
    "guideway_spec": models.guideway_spec,
    "guideway_ambient": models.guideway_ambient,
}


def names() -> list[str]:
    return list(BUILDERS)


def render(name: str) -> str:
    return serialize(AutomatonDocument(name, BUILDERS[name]()))


def load_bundled(name: str) -> AutomatonDocument:
    if name not in BUILDERS:
        raise KeyError(f"no bundled document {name!r}; available: {', '.join(BUILDERS)}")
    text = resources.files("supvkit").joinpath("data", f"{name}.json").read_text()
    return parse(text)


def write_all(directory: str | Path) -> list[Path]:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name in BUILDERS:
        path = out / f"{name}.json"
        path.write_text(render(name))
        written.append(path)
    return written


if __name__ == "__main__":  # pragma: no cover
    target = sys.argv[1] if len(sys.argv) > 1 else str(Path(__file__).with_name("data"))
    for p in write_all(target):
        print(p)
