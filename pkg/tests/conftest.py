import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from frics_sim.config import AppConfig, build_filter  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def default_cfg():
    return AppConfig()


@pytest.fixture(scope="session")
def stack_a(default_cfg):
    return build_filter(default_cfg, "A")[0]


@pytest.fixture(scope="session")
def stack_b(default_cfg):
    return build_filter(default_cfg, "B")[0]


@pytest.fixture(scope="session")
def acceptance_report():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
