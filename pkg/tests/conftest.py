import pytest

from biphoton_waveform import ThermalEnsemble, preset_params, simulate

import _report



@pytest.fixture(scope="session")
def params_6d():
    return preset_params("Cs-6D5/2")


@pytest.fixture(scope="session")
def params_8s():
    return preset_params("Cs-8S1/2")


@pytest.fixture(scope="session")
def ensemble():
    return ThermalEnsemble()


@pytest.fixture(scope="session")
def run_6d(params_6d, ensemble):
    """Default full pipeline for the 6D5/2 channel, computed once per session."""
    return simulate(params_6d, ensemble)


@pytest.fixture(scope="session")
def run_8s(params_8s, ensemble):
    return simulate(params_8s, ensemble)


def pytest_terminal_summary(terminalreporter):
    if _report.LINES:
        terminalreporter.section("acceptance criteria")
        for line in _report.LINES:
            terminalreporter.write_line(line)
