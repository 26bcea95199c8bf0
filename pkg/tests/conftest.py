import numpy as np
import pytest

from cgsik.iksolver.template import SolverTemplate
from cgsik.kinematics import RobotGeometry


@pytest.fixture(scope="session")
def geom():
    return RobotGeometry.builtin("testbot")


@pytest.fixture(scope="session")
def template(geom):
    tpl = SolverTemplate.bundled(geom)
    assert tpl is not None, "the testbot template should ship with the package"
    return tpl.warm()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, repeated at the end of the run
ACCEPTANCE_LINES: list = []


@pytest.fixture
def criterion():
    def report(number: int, passed: bool, detail: str) -> bool:
        ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
        print(ACCEPTANCE_LINES[-1])
        return passed

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
