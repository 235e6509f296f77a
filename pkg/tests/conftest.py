import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from causekit.cli import data_dir
from causekit.engine import Engine, Situation
from causekit.syntax import load_domain, load_narrative, parse_action, parse_formula


@pytest.fixture(scope="session")
def drone():
    return load_domain(data_dir() / "drone.ck")


@pytest.fixture(scope="session")
def engine(drone):
    return Engine(drone)


@pytest.fixture(scope="session")
def small_engine(drone):
    """The fixture cut down to a horizon the brute-force oracle can handle."""
    return Engine(drone, 3)


@pytest.fixture(scope="session")
def F(drone):
    return lambda text: parse_formula(text, drone.tables)


@pytest.fixture(scope="session")
def act(drone):
    return lambda text: parse_action(text, drone.tables)


@pytest.fixture(scope="session")
def sigma(drone):
    return Situation("W0", tuple(load_narrative(data_dir() / "sigma.nr", drone.tables).actions))


@pytest.fixture(scope="session")
def sigma1(drone):
    return Situation("W0", tuple(load_narrative(data_dir() / "sigma1.nr", drone.tables).actions))


@pytest.fixture(scope="session")
def s3(sigma):
    return sigma.prefix(3)


@pytest.fixture(scope="session")
def s0():
    return Situation("W0")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        title, ok = results[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {title}")
