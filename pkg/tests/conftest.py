import copy

import pytest

from ccnprio.sim.scenario import from_dict, read_raw

_DEFAULT = read_raw("default")


def raw_default() -> dict:
    return copy.deepcopy(_DEFAULT)


def scenario_with(interests=None, router=None, **top):
    """Default scenario with an explicit workload and/or router overrides."""
    raw = raw_default()
    if interests is not None:
        raw["workload"]["interests"] = [{"time": t, "face": f, "name": n} for t, f, n in interests]
    raw["router"].update(router or {})
    raw.update(top)
    return from_dict(raw)


@pytest.fixture
def default_raw():
    return raw_default()


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
