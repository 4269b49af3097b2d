import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from mrslmr.errors import ConfigError
from mrslmr.modal import (KernelSpec, estimate_sigma, gaussian_kernel, hq_weight,
                          modal_loss)

# reference values from math.exp / math.pi evaluated by hand
K0 = 0.3989422804014327
K2 = 0.05399096651318806

sigmas = st.floats(1e-2, 1e2)
reals = st.floats(-1e3, 1e3)


def test_kernel_values():
    assert gaussian_kernel(0.0, 1.0) == pytest.approx(K0, abs=1e-7)
    assert gaussian_kernel(2.0, 1.0) == pytest.approx(K2, abs=1e-7)


@given(reals, sigmas)
def test_kernel_even(u, s):
    assert gaussian_kernel(u, s) == gaussian_kernel(-u, s)


@pytest.mark.parametrize("bad", [0.0, -1.0, np.nan])
def test_bad_sigma(bad):
    with pytest.raises(ConfigError):
        gaussian_kernel(0.0, bad)
    with pytest.raises(ConfigError):
        hq_weight(0.0, bad)


def test_hq_weight_values():
    assert hq_weight(0.0, 1.0) == pytest.approx(K0, abs=1e-7)
    assert hq_weight(2.0, 1.0) == pytest.approx(K2, abs=1e-7)
    far = hq_weight(100.0, 1.0)
    assert 0.0 <= far < 1e-300 and np.isfinite(far)


def test_hq_weight_matches_derivative_branches():
    s = 0.8
    # u != 0: -k'(u)/u by central differences
    for u in [0.3, -1.1, 2.5]:
        h = 1e-6
        dk = (gaussian_kernel(u + h, s) - gaussian_kernel(u - h, s)) / (2 * h)
        assert hq_weight(u, s) == pytest.approx(-dk / u, rel=1e-6)
    # u == 0: -k''(0)
    h = 1e-4
    d2k = (gaussian_kernel(h, s) - 2 * gaussian_kernel(0.0, s) + gaussian_kernel(-h, s)) / h**2
    assert hq_weight(0.0, s) == pytest.approx(-d2k, rel=1e-5)


@given(reals, sigmas)
def test_hq_weight_nonnegative(u, s):
    assert hq_weight(u, s) >= 0.0


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.1, 3))
def test_hq_surrogate_majorizes_loss(u0, u, s):
    # the quadratic built from tau(u0) touches 1 - k at u0 and lies above it elsewhere
    phi = lambda x: 1.0 - gaussian_kernel(x, s)
    q = phi(u0) + 0.5 * hq_weight(u0, s) * (u * u - u0 * u0)
    assert q >= phi(u) - 1e-12


def test_modal_loss_examples():
    assert modal_loss(np.zeros((2, 3)), 1.0) == pytest.approx(3.606346317591404, abs=1e-4)
    assert modal_loss(np.zeros((4, 5)), 1 / np.sqrt(2 * np.pi)) == pytest.approx(0.0, abs=1e-12)


@given(arrays(np.float64, (3, 4), elements=st.floats(-10, 10)), sigmas)
def test_modal_loss_even_and_bounded(E, s):
    assert modal_loss(E, s) == pytest.approx(modal_loss(-E, s), abs=1e-9)
    floor = E.size * (1 - gaussian_kernel(0.0, s))
    assert modal_loss(E, s) >= floor - 1e-9
    if np.any(np.abs(E) > 1e-3 * s):
        assert modal_loss(E, s) > floor


def test_estimate_sigma_examples():
    assert estimate_sigma(np.ones((2, 3)), 1e-6) == pytest.approx(0.7071067811865476, abs=1e-5)
    assert estimate_sigma(np.zeros((2, 3)), 1e-6) == 1e-6


@given(arrays(np.float64, (3, 4), elements=st.floats(-10, 10)), st.floats(-5, 5))
def test_estimate_sigma_floor_and_homogeneity(E, c):
    assert estimate_sigma(E, 1e-6) >= 1e-6
    base = estimate_sigma(E, 1e-12)
    scaled = estimate_sigma(c * E, 1e-12)
    if base > 1e-9 and scaled > 1e-9:
        assert scaled == pytest.approx(abs(c) * base, rel=1e-12)


def test_kernel_spec_validation():
    KernelSpec(sigma=0.5)
    with pytest.raises(ConfigError):
        KernelSpec(kind="epanechnikov")
    with pytest.raises(ConfigError):
        KernelSpec(sigma=1e-9, sigma_min=1e-6)
