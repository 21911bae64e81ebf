from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ecumene.corpus import load_corpus
from ecumene.formula import (BOT, And, Box, ClAtom, DiaC, DiaI, ImpC, ImpI, IntAtom, Neg, OrC, OrI)

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

CORPUS_DIR = Path(__file__).resolve().parents[1] / "src" / "ecumene" / "corpus"

ATOMS = [IntAtom("a"), IntAtom("b"), ClAtom("a"), ClAtom("b"), BOT]
IK_ATOMS = [IntAtom("a"), IntAtom("b"), BOT]
UNARY = [Neg, Box, DiaI, DiaC]
BINARY = [And, OrI, OrC, ImpI, ImpC]


def modal_formulas(max_leaves: int = 12, ik_only: bool = False):
    """Hypothesis strategy for modal-fragment formulas."""
    atoms = st.sampled_from(IK_ATOMS if ik_only else ATOMS)
    unary = [Neg, Box, DiaI] if ik_only else UNARY
    binary = [And, OrI, ImpI] if ik_only else BINARY

    def extend(children):
        return st.one_of(
            st.builds(lambda c, f: c(f), st.sampled_from(unary), children),
            st.builds(lambda c, l, r: c(l, r), st.sampled_from(binary), children, children),
        )

    return st.recursive(atoms, extend, max_leaves=max_leaves)


def random_formula(rng, depth: int, ik_only: bool = False):
    """Formula of depth at most ``depth`` drawn from ``rng``."""
    atoms = IK_ATOMS if ik_only else ATOMS
    if depth == 0 or rng.random() < 0.2:
        return rng.choice(atoms)
    c = rng.choice(([Neg, Box, DiaI] if ik_only else UNARY) + ([And, OrI, ImpI] if ik_only else BINARY))
    if c in UNARY:
        return c(random_formula(rng, depth - 1, ik_only))
    return c(random_formula(rng, depth - 1, ik_only), random_formula(rng, depth - 1, ik_only))


@pytest.fixture(scope="session")
def corpus():
    return load_corpus(CORPUS_DIR)


# -- acceptance reporting ----------------------------------------------------

_CRITERIA: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion checked by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    n, text = mark.args
    slot = _CRITERIA.setdefault(n, [text, True])
    slot[1] = slot[1] and rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        text, ok = _CRITERIA[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {text}")
