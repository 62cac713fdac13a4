import json
import shutil
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from didself.keys import KeyPair

DATA = Path(__file__).parent / "data"

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

_acceptance: dict[str, str] = {}


@pytest.fixture
def controller() -> KeyPair:
    return KeyPair.generate("ES256")


@pytest.fixture
def holder() -> KeyPair:
    return KeyPair.generate("EdDSA")


@pytest.fixture(scope="session")
def golden_key() -> KeyPair:
    return KeyPair.from_private_dict(json.loads((DATA / "golden_p256.jwk.json").read_text()))


@pytest.fixture(scope="session")
def openssl() -> str:
    path = shutil.which("openssl")
    if path is None:
        pytest.skip("openssl command line tool not installed")
    return path


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and (report.when == "call" or report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        _acceptance[name] = report.outcome.upper()


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance.items():
        terminalreporter.write_line(f"{outcome:7s} {name}")
