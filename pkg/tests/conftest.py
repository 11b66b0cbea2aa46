import numpy as np
import pytest

from fourier_bilateral import gaussian_range_samples


def _skimage_gray(name, step):
    data = pytest.importorskip("skimage.data")
    return getattr(data, name)()[::step, ::step].astype(np.float64)


@pytest.fixture(scope="session")
def camera():
    """Cameraman, 256x256, 8-bit values."""
    return _skimage_gray("camera", 2)


@pytest.fixture(scope="session")
def moon():
    return _skimage_gray("moon", 2)


@pytest.fixture(scope="session")
def camera_small():
    return _skimage_gray("camera", 4)


@pytest.fixture(scope="session")
def gauss50():
    return gaussian_range_samples(50)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_ACCEPTANCE_LINES = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
