import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fourier_bilateral import (RangeKernelSpec, ValidationError, build_spatial_kernel,
                               sample_range_kernel)
from fourier_bilateral.exceptions import ParseError
from fourier_bilateral.kernels import load_tabulated_kernel, save_tabulated_kernel


def test_gaussian_center_is_one():
    b = sample_range_kernel(RangeKernelSpec.gaussian(50, 255))
    assert len(b) == 511
    assert b.values[255] == 1.0


def test_gaussian_at_one_sigma():
    b = sample_range_kernel(RangeKernelSpec.gaussian(50, 255))
    assert b.values[255 + 50] == pytest.approx(math.exp(-0.5), abs=1e-15)
    assert b(50) == pytest.approx(0.60653, abs=1e-5)


def test_tabulated_boxcar_passthrough():
    t = np.arange(-255, 256)
    box = (np.abs(t) <= 10).astype(float)
    b = sample_range_kernel(RangeKernelSpec.tabulated(box))
    assert b.R == 255 and len(b) == 511
    np.testing.assert_array_equal(b.values, box)


@pytest.mark.parametrize("samples", [
    np.ones(10),                           # even length
    np.r_[np.ones(5), 2.0, np.zeros(5)],   # asymmetric
    np.r_[np.ones(5), 0.5, np.ones(5)],    # center not the maximum
])
def test_tabulated_rejects_bad_input(samples):
    with pytest.raises(ValidationError):
        RangeKernelSpec.tabulated(samples)


def test_tabulated_wrong_length_for_R():
    with pytest.raises(ValidationError):
        RangeKernelSpec("tabulated", 255, samples=np.ones(11))


@pytest.mark.parametrize("kind", ["gaussian", "exponential", "cauchy"])
def test_parametric_kinds_need_positive_sigma(kind):
    with pytest.raises(ValidationError):
        RangeKernelSpec(kind, 255, 0.0)
    with pytest.raises(ValidationError):
        RangeKernelSpec(kind, 255, None)


def test_non_gaussian_profiles():
    e = sample_range_kernel(RangeKernelSpec.exponential(10, 20))
    c = sample_range_kernel(RangeKernelSpec.cauchy(10, 20))
    assert e(10) == pytest.approx(math.exp(-1))
    assert c(10) == pytest.approx(0.5)
    assert e(-7) == e(7) and c(-7) == c(7)


@settings(max_examples=40, deadline=None)
@given(kind=st.sampled_from(["gaussian", "exponential", "cauchy"]),
       sigma=st.floats(0.1, 500), R=st.integers(1, 300))
def test_range_samples_exactly_symmetric(kind, sigma, R):
    b = sample_range_kernel(RangeKernelSpec(kind, R, sigma))
    np.testing.assert_array_equal(b.values, b.values[::-1])
    assert b.values.argmax() == R and b.center == 1.0


def test_tabulated_file_round_trip(tmp_path):
    b = sample_range_kernel(RangeKernelSpec.cauchy(7.5, 12))
    path = tmp_path / "k.txt"
    save_tabulated_kernel(path, b)
    spec = load_tabulated_kernel(path)
    assert spec.R == 12
    np.testing.assert_array_equal(sample_range_kernel(spec).values, b.values)


def test_tabulated_file_bad_line(tmp_path):
    path = tmp_path / "k.txt"
    path.write_text("0.5\nabc\n0.5\n")
    with pytest.raises(ParseError, match="line 2"):
        load_tabulated_kernel(path)


def test_spatial_theta5():
    k = build_spatial_kernel(5)
    assert k.radius == 15 and k.taps.size == 31 and k.center == 1.0
    assert k.taps[15 + 5] == pytest.approx(math.exp(-0.5), abs=1e-15)


def test_spatial_theta_third():
    k = build_spatial_kernel(1 / 3)
    assert k.radius == 1 and k.taps.size == 3


@pytest.mark.parametrize("theta", [0, -1.0, float("nan")])
def test_spatial_rejects_bad_theta(theta):
    with pytest.raises(ValidationError):
        build_spatial_kernel(theta)


@settings(max_examples=30, deadline=None)
@given(theta=st.floats(0.2, 12))
def test_spatial_taps_positive_and_decreasing(theta):
    k = build_spatial_kernel(theta)
    half = k.taps[k.radius:]
    assert np.all(k.taps > 0)
    assert np.all(np.diff(half) < 0)
    np.testing.assert_array_equal(k.taps, k.taps[::-1])


@pytest.mark.parametrize("theta", [0.7, 2.0, 5.0])
def test_outer_product_matches_direct_2d(theta):
    k = build_spatial_kernel(theta)
    j = np.arange(-k.radius, k.radius + 1)
    direct = np.exp(-(j[:, None] ** 2 + j[None, :] ** 2) / (2 * theta * theta))
    np.testing.assert_allclose(k.weights_2d(), direct, rtol=0, atol=1e-12)
