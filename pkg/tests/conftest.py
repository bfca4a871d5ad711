import numpy as np
import pytest

from uwb_vptl import _kernels_py
from uwb_vptl.geometry import AnchorLayout


@pytest.fixture
def layout():
    return AnchorLayout()


@pytest.fixture
def rng():
    return np.random.default_rng(20190521)


def _backends():
    out = [pytest.param(_kernels_py, id="python")]
    try:
        from uwb_vptl import _kernels
    except ImportError:
        out.append(pytest.param(None, id="cython", marks=pytest.mark.skip("extension not built")))
    else:
        out.append(pytest.param(_kernels, id="cython"))
    return out


@pytest.fixture(params=_backends())
def backend(request):
    return request.param


# Acceptance criteria report -------------------------------------------------

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record the outcome of one acceptance criterion for the summary."""

    def record(number: int, ok: bool, detail: str) -> bool:
        ACCEPTANCE[number] = (bool(ok), detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
