import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("repo", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture
def inner_points():
    """A fixed spread of interior points with |z| <= 0.7."""
    rng = np.random.default_rng(1234)
    r = 0.7 * np.sqrt(rng.random(24))
    pts = r * np.exp(2j * np.pi * rng.random(24))
    return np.concatenate([[0j, 0.7, -0.7j, 0.35 + 0.35j], pts])


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record one acceptance outcome; the summary prints a line per criterion."""

    def record(number: int, passed: bool, detail: str) -> bool:
        ACCEPTANCE[number] = (bool(passed), detail)
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
