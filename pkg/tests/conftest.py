import os
from importlib import resources

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from gramkit import formats
from gramkit.frames import FrameSystem

settings.register_profile(
    "gramkit",
    max_examples=int(os.environ.get("GRAMKIT_HYPOTHESIS_EXAMPLES", "60")),
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("gramkit")


def fixture_path(name):
    return resources.files("gramkit") / "fixtures" / name


def e(k, n):
    v = np.zeros(n, dtype=complex)
    v[k] = 1.0
    return v


def family(*vectors):
    return FrameSystem(np.column_stack(vectors).astype(complex))


@pytest.fixture
def onb2():
    return FrameSystem(np.eye(2, dtype=complex))


@pytest.fixture
def redundant():
    """{e1, e1, e2} in C^2."""
    return family(e(0, 2), e(0, 2), e(1, 2))


@pytest.fixture
def example5():
    """Operator, families, the two duals of the left family and the expected U^+."""
    load = lambda name: formats.read_matrix(fixture_path(name))
    frame = lambda name: formats.read_frame(fixture_path(name))
    return {
        "op": load("example5_op.json"),
        "op_pinv": load("example5_op_pinv.json"),
        "phi": frame("example5_phi.json"),
        "psi": frame("example5_psi.json"),
        "phi_a": frame("example5_phi_a.json"),
        "phi_b": frame("example5_phi_b.json"),
    }


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    acceptance = sys.modules.get("tests.test_acceptance")
    if acceptance is not None and acceptance.LINES:
        terminalreporter.section("acceptance criteria")
        for text in acceptance.LINES:
            terminalreporter.write_line(text)
