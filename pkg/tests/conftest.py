import os
import sys
from pathlib import Path

import numpy as np
import pytest

DATA_DIR = Path(__file__).parent / "data"
FIXTURE_CSV = DATA_DIR / "ccpp_fixture.csv"
CCPP_ENV = "IGKIT_CCPP_CSV"


@pytest.fixture
def fixture_csv():
    return FIXTURE_CSV


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def ccpp_csv():
    path = os.environ.get(CCPP_ENV)
    if not path or not Path(path).is_file():
        pytest.skip(f"full CCPP CSV not available; set {CCPP_ENV}")
    return Path(path)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    lines = getattr(acceptance, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
