from pathlib import Path

import numpy as np
import pytest

from selinv import factor_graph as fg
from selinv.pattern import PrimaryOrder

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


def loop6_system(order=None, seed=0):
    """Six-variable loop fixture: ``(graph, factors, A, b, order)``."""
    n, factors = fg.generate("loop6", seed=seed)
    graph = fg.topology_of(n, factors)
    order = PrimaryOrder.identity(n) if order is None else order
    a, b = fg.assemble_system(graph, factors, order)
    return graph, factors, a, b, order


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in sorted(mod.RESULTS):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
