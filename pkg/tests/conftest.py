import pathlib
import re

import pytest

import dramcheck as dc

_ACCEPTANCE_RESULTS = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)",
                  report.nodeid)
    if m:
        num, name = int(m.group(1)), m.group(2).replace("_", " ")
        _ACCEPTANCE_RESULTS[num] = (name, report.outcome.upper(),
                                    report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE_RESULTS):
        name, outcome, duration = _ACCEPTANCE_RESULTS[num]
        terminalreporter.write_line(
            f"criterion {num} ({name}): "
            f"{'PASS' if outcome == 'PASSED' else 'FAIL'} [{duration:.2f}s]")

DATA = pathlib.Path(__file__).parent / "data"
GOLDEN = pathlib.Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def toy_spec():
    return dc.load_model(DATA / "toy.dramml")


@pytest.fixture(scope="session")
def toy_net(toy_spec):
    return dc.elaborate(toy_spec, dc.load_config(DATA / "toy.cfg"))


@pytest.fixture(scope="session")
def ddr4_spec():
    return dc.load_model("ddr4")


@pytest.fixture(scope="session")
def ddr4_net(ddr4_spec):
    return dc.elaborate(ddr4_spec, dc.load_config("ddr4-16bank-example"))


@pytest.fixture(scope="session")
def ddr4_props(ddr4_net):
    return dc.derive(ddr4_net)


@pytest.fixture(scope="session")
def ddr5_props():
    spec = dc.load_model("ddr5-delta")
    return dc.derive(dc.elaborate(spec, dc.load_config("ddr5-delta-example")))
