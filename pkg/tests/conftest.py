from __future__ import annotations

import pytest
from hypothesis import settings, strategies as st

from supvkit import models
from supvkit.core import Alphabet, Automaton
from supvkit.observation import supconrobs
from supvkit.reduction import supreduce
from supvkit.synthesis import supcon

settings.register_profile("default", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("default")

ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = {}


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, text = results[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {text}")


@pytest.fixture
def acceptance(request):
    """Record one acceptance line: ``acceptance(n, ok, text)``."""

    def record(n: int, ok: bool, text: str) -> None:
        request.config.stash[ACCEPTANCE][n] = (ok, text)
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {text}")

    return record


@st.composite
def automata(draw, max_states: int = 4, labels: str = "abc", min_states: int = 1):
    """Small deterministic automata, possibly with unreachable or blocking states."""
    n = draw(st.integers(min_states, max_states))
    k = draw(st.integers(1, len(labels)))
    ctrl = draw(st.lists(st.booleans(), min_size=k, max_size=k))
    sigma = Alphabet.from_pairs(zip(labels[:k], ctrl))
    rows = []
    for _ in range(n):
        row = {}
        for e in sigma.labels:
            if draw(st.booleans()):
                row[e] = draw(st.integers(0, n - 1))
        rows.append(row)
    marked = draw(st.frozensets(st.integers(0, n - 1)))
    return Automaton(sigma, n, 0, marked, tuple(rows))


@pytest.fixture(scope="session")
def tl():
    return models.transfer_line()


@pytest.fixture(scope="session")
def gw():
    return models.guideway()


@pytest.fixture(scope="session")
def sup1(tl):
    return supcon(tl.plant, tl.spec)


@pytest.fixture(scope="session")
def rsup1(sup1):
    return supreduce(sup1)


@pytest.fixture(scope="session")
def sup2(tl):
    return supconrobs(tl.plant, tl.spec, tl.mask(["1", "3", "5"]))


@pytest.fixture(scope="session")
def sup3(gw):
    return supconrobs(gw.plant, gw.spec, gw.mask(["13", "23"]))


@pytest.fixture(scope="session")
def rsup3(sup3):
    return supreduce(sup3)
