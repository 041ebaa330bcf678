"""Shared fixtures and the acceptance-criterion reporting hook."""

import json
from importlib import resources

import pytest

import levicav as lc

# criterion number -> (passed, one-line detail); filled by the acceptance tests
ACCEPTANCE_RESULTS = {}


@pytest.fixture
def record_criterion():
    """Record one acceptance criterion outcome and assert it."""

    def _record(number: int, ok: bool, detail: str) -> None:
        ACCEPTANCE_RESULTS[number] = (bool(ok), detail)
        line = f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        print(line)
        assert ok, line

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for number in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(
            f"  criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")


def config_path(name: str) -> str:
    return str(resources.files("levicav").joinpath(f"configs/{name}.json"))


def load_system(name: str) -> lc.SystemSpec:
    with open(config_path(name)) as fh:
        return lc.system_from_dict(json.load(fh)["system"])


@pytest.fixture(scope="session")
def benchmark_system() -> lc.SystemSpec:
    return load_system("benchmark")


@pytest.fixture(scope="session")
def bound_system() -> lc.SystemSpec:
    return load_system("lambda-1e-12")


@pytest.fixture(scope="session")
def toy_model() -> lc.LinearModel:
    system = load_system("toy")
    derived = lc.resolve(system)
    return lc.build_model(derived, lc.diffusion_budget(system, derived))


def make_model(kappa: float, omega: float, Delta: float, G: float, gamma: float,
               D_mech: float) -> lc.LinearModel:
    """Independent restatement of the linearized model from raw scalars.

    Used so solver tests do not have to trust build_model for the structure
    they are checking.
    """
    import math

    import numpy as np

    s2G = math.sqrt(2.0) * G
    A = np.array([
        [0.0, omega, 0.0, 0.0],
        [-omega, -gamma, -s2G, 0.0],
        [0.0, 0.0, -kappa, Delta],
        [-s2G, 0.0, -Delta, -kappa],
    ])
    D = np.diag([0.0, D_mech, kappa, kappa])
    return lc.LinearModel(A=A, D=D, omega=omega, gamma=gamma, kappa=kappa,
                          Delta=Delta, G=G)
