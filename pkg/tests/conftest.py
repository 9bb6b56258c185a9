import re
import warnings

import pytest

from twistlab.abelian_group import FiniteAbelianGroup, canonical_z22_cocycle, pairing_cocycle, trivial_cocycle
from twistlab.lattice import Lattice
from twistlab.model_builder import build


@pytest.fixture(scope="session")
def z22():
    return FiniteAbelianGroup((2, 2))


@pytest.fixture(scope="session")
def alpha():
    return canonical_z22_cocycle()


@pytest.fixture(scope="session")
def trivial(z22):
    return trivial_cocycle(z22)


@pytest.fixture(scope="session")
def z2z4():
    G = FiniteAbelianGroup((2, 4))
    return G, pairing_cocycle(G, [[0, 2], [0, 0]])


@pytest.fixture(scope="session")
def torus_models():
    """Cached torus models keyed by (variant, px, py)."""
    cache = {}

    def get(variant, px, py, **kw):
        key = (variant, px, py, tuple(sorted(kw.items())))
        if key not in cache:
            cache[key] = build(variant, Lattice.torus(px, py), **kw)
        return cache[key]

    return get


@pytest.fixture(autouse=True)
def _quiet_parity():
    from twistlab.analysis import ParityWarning
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ParityWarning)
        yield


# one summary line per acceptance criterion

_CRITERION = re.compile(r"test_criterion_(\d+)")
_outcomes = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    failed = report.failed
    if report.when == "call" or failed:
        _outcomes[n] = _outcomes.get(n, True) and not failed


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if _outcomes[n] else 'FAIL'}")
