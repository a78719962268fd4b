import os
import tempfile

import numpy as np
import pytest
from hypothesis import settings

# keep the user's cache untouched; every session starts cold
os.environ.setdefault("GPENTROPY_CACHE_DIR", tempfile.mkdtemp(prefix="gpentropy-cache-"))

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


FIG1 = [7, 4, 3, 5, 2, 1, 6]


@pytest.fixture
def fig1():
    return np.array(FIG1, dtype=float)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
