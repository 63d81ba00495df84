import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("deterministic", derandomize=True, deadline=None)
settings.load_profile("deterministic")

_ACCEPTANCE_RESULTS = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    _ACCEPTANCE_RESULTS[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name in sorted(_ACCEPTANCE_RESULTS):
        outcome = _ACCEPTANCE_RESULTS[name]
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{mark}  {name}")


@pytest.fixture(scope="session")
def sphere_profile():
    from weyllab import validate_profile
    return validate_profile({"preset": "sphere"})


@pytest.fixture(scope="session")
def spheroid_profile():
    from weyllab import validate_profile
    return validate_profile({"preset": "spheroid", "a": 1.0, "c": 2.0})


@pytest.fixture(scope="session")
def bump_profile():
    from weyllab import validate_profile
    return validate_profile({"preset": "spheroid_bump", "a": 1.0, "c": 2.0,
                             "eps": 0.02})
