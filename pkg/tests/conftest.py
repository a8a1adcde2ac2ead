import numpy as np
import pytest

from pfcm import DataSet, Parameters, load_builtin
from pfcm import _kernels

KERNEL_NAMES = ("squared_distances", "fuzzy_memberships", "typicality_scales",
                "possibilistic_memberships", "centroid_weights", "weighted_means",
                "ocs_fill", "nps_fill", "pick_missing")


def kernel_backends():
    backends = {"numpy": {name: getattr(_kernels, name + "_np") for name in KERNEL_NAMES}}
    if _kernels.USE_NUMBA:
        backends["numba"] = {name: getattr(_kernels, name + "_nb") for name in KERNEL_NAMES}
    return backends


@pytest.fixture(params=sorted(kernel_backends()))
def kernels(request):
    return kernel_backends()[request.param]


@pytest.fixture(scope="session")
def iris():
    return load_builtin("iris").data


@pytest.fixture(scope="session")
def wine():
    return load_builtin("wine").data


@pytest.fixture
def params():
    return Parameters()


@pytest.fixture
def two_blobs():
    """Two tight groups of 20 points around (0, 0) and (10, 10)."""
    rng = np.random.default_rng(7)
    a = rng.normal(0.0, 0.01, size=(20, 2))
    b = rng.normal(10.0, 0.01, size=(20, 2))
    return DataSet.complete(np.vstack([a, b])), a.mean(axis=0), b.mean(axis=0)


# acceptance verdicts, echoed again at the end of the session
_VERDICTS = []


@pytest.fixture
def verdict(request):
    def record(number, ok, detail):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        _VERDICTS.append(line)
        with request.config.pluginmanager.get_plugin("capturemanager").global_and_fixture_disabled():
            print("\n" + line, flush=True)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_VERDICTS):
            terminalreporter.write_line(line)
