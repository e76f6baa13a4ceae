import json
import os
import time
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from paramexcl.certificate import certify
from paramexcl.config import DEFAULT

GOLDEN = Path(__file__).parent / "golden"

settings.register_profile("default", deadline=None, max_examples=50,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=500,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# (criterion, passed, detail) lines collected by the acceptance tests
ACCEPTANCE = []


def load_golden(name):
    return json.loads((GOLDEN / name).read_text())


@pytest.fixture(scope="session")
def golden():
    return load_golden


@pytest.fixture(scope="session")
def headline_certification():
    """certify() on the headline configuration, run once; (Certification, seconds)."""
    t0 = time.perf_counter()
    cert = certify(DEFAULT)
    return cert, time.perf_counter() - t0


@pytest.fixture
def criterion():
    def record(label, passed, detail=""):
        ACCEPTANCE.append((label, bool(passed), detail))
        print(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")
