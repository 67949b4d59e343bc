from pathlib import Path

import numpy as np
import pytest

FACES = Path(__file__).resolve().parents[1] / "src" / "cvxhallu" / "data" / "faces"


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def face_paths():
    return sorted(FACES.glob("*.png"))


@pytest.fixture(scope="session")
def faces_dir():
    return FACES


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "ACCEPTANCE_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
