import pytest

from kinfty.hpo import build_N_plus
from kinfty.tower import Tower, TowerConfig

ACCEPTANCE: dict[str, str] = {}


def record(criterion: str, passed: bool, detail: str = "") -> None:
    line = f"{criterion}: {'PASS' if passed else 'FAIL'}" + (f" ({detail})" if detail else "")
    ACCEPTANCE[criterion] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k.split()[1])):
        terminalreporter.write_line(ACCEPTANCE[key])


@pytest.fixture(scope="session")
def nplus1():
    return build_N_plus(1)


@pytest.fixture(scope="session")
def tower(nplus1):
    return Tower(TowerConfig(K0=nplus1, N=3))


@pytest.fixture(scope="session")
def tower41(nplus1):
    return Tower(TowerConfig(K0=nplus1, N=3, rep="example41"))
