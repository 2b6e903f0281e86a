import math
import sys

import pytest

from cavity_hardy._kernels import _fallback
from cavity_hardy.protocols import ExperimentConfig, idealized_transits, reference_transits, run_all
from cavity_hardy.pulse_model import Amplitudes

try:
    from cavity_hardy._kernels import _ckernels
except ImportError:
    _ckernels = None

KERNEL_BACKENDS = [pytest.param(_fallback, id="numpy")]
if _ckernels is not None:
    KERNEL_BACKENDS.append(pytest.param(_ckernels, id="cython"))


@pytest.fixture(params=KERNEL_BACKENDS)
def kernels(request):
    return request.param


@pytest.fixture(scope="session")
def reference_records():
    return run_all(ExperimentConfig(transits=reference_transits()))


@pytest.fixture(scope="session")
def exact_records():
    return run_all(ExperimentConfig(mode="exact", transits=reference_transits()))


@pytest.fixture(scope="session")
def ideal_records():
    return run_all(ExperimentConfig(transits=idealized_transits()))


def amps_of(theta):
    return Amplitudes.from_theta(theta)


def unit(angle):
    return (math.cos(angle), math.sin(angle))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is not None and module.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in module.RESULTS:
            terminalreporter.write_line(line)
