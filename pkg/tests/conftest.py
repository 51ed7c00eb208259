import numpy as np
import pytest


class ConstantRng:
    """Stand-in generator: every uniform draw is ``value``; integer draws replay a script."""

    def __init__(self, value=0.5, integers=()):
        self.value = value
        self._ints = list(integers)

    def random(self, size=None):
        return np.full(size, self.value) if size is not None else self.value

    def uniform(self, low, high, size=None):
        return low + (np.asarray(high) - low) * self.random(size)

    def integers(self, low, high, size=None):
        count = int(np.prod(size))
        out, self._ints = self._ints[:count], self._ints[count:]
        return np.array(out).reshape(size)


@pytest.fixture
def const_rng():
    return ConstantRng


# -- acceptance criteria report -----------------------------------------------------

_CRITERIA: dict = {}


def pytest_runtest_setup(item):
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        item.user_properties.append(("criterion", mark.args))


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or report.outcome != "passed":
        key, text = props["criterion"]
        ok = report.passed and _CRITERIA.get(key, (True, text))[0]
        _CRITERIA[key] = (ok, text)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA):
        ok, text = _CRITERIA[key]
        terminalreporter.write_line(f"criterion {key:<3} {'PASS' if ok else 'FAIL'}  {text}")
