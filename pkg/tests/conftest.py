from pathlib import Path

import pytest
from hypothesis import settings

from schottky_spectral.schottky import load_schottky

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def gamma_ex():
    return load_schottky("gamma_ex")


@pytest.fixture(scope="session")
def thick_ex():
    return load_schottky("thick_ex")


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    module = next((m for name, m in list(__import__("sys").modules.items())
                   if name.endswith("test_acceptance") and hasattr(m, "RESULTS")), None)
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.summary_lines():
        terminalreporter.write_line(line)
