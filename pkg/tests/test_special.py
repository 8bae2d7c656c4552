import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dunklhp.special import (
    Z_SWITCH,
    DomainError,
    DunklParam,
    bessel_j_norm,
    dunkl_constant,
    dunkl_kernel,
    gamma,
)


@pytest.mark.parametrize("x, expected", [(1.0, 1.0), (0.5, math.sqrt(math.pi)), (5.0, 24.0)])
def test_gamma_known_values(x, expected):
    assert gamma(x) == pytest.approx(expected, rel=1e-14)


def test_gamma_relative_error_on_range():
    xs = np.linspace(0.1, 50.0, 397)
    worst = max(abs(gamma(x) / float(mpmath.gamma(x)) - 1.0) for x in xs)
    assert worst <= 1e-13


@pytest.mark.parametrize("x", [0.0, -1.0, float("nan"), float("inf")])
def test_gamma_rejects_bad_argument(x):
    with pytest.raises(DomainError):
        gamma(x)


@pytest.mark.parametrize("lam, expected", [
    (0.5, 0.5),
    (1.0, 1.0 / (2.0**1.5 * math.sqrt(math.pi) / 2.0)),
])
def test_dunkl_constant(lam, expected):
    assert dunkl_constant(lam) == pytest.approx(expected, rel=1e-14)


def test_dunkl_constant_zero_is_classical():
    assert dunkl_constant(0.0) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), rel=1e-14)
    with pytest.raises(DomainError):
        dunkl_constant(-0.1)


def test_param_validation():
    with pytest.raises(DomainError):
        DunklParam(-1.0)
    with pytest.raises(DomainError):
        DunklParam(0.0)
    p = DunklParam(0.0, test_mode=True)
    assert p.c_lambda == pytest.approx(dunkl_constant(0.0))
    with pytest.raises(DomainError):
        p.require_positive()


def test_bessel_examples():
    assert bessel_j_norm(-0.5, 2.0) == pytest.approx(math.cos(2.0), rel=1e-14)
    assert abs(bessel_j_norm(0.5, math.pi)) < 1e-15
    for a in (-0.5, 0.0, 0.7, 3.0):
        assert bessel_j_norm(a, 0.0) == 1.0
    with pytest.raises(DomainError):
        bessel_j_norm(-0.6, 1.0)


def _closed(alpha, z):
    if alpha == -0.5:
        return np.cos(z)
    if alpha == 0.5:
        return np.sin(z) / z
    return 3.0 * (np.sin(z) - z * np.cos(z)) / z**3


@pytest.mark.parametrize("alpha", [-0.5, 0.5, 1.5])
def test_bessel_half_integer_closed_forms(alpha):
    z = np.linspace(0.1, 20.0, 400)
    ref = _closed(alpha, z)
    got = bessel_j_norm(alpha, z)
    assert np.all(np.abs(got - ref) <= 1e-12 * np.abs(ref) + 1e-15)


@pytest.mark.parametrize("alpha", [0.0, 0.3, 1.0, 2.25, 6.5])
def test_bessel_against_mpmath(alpha):
    z = np.concatenate([np.linspace(0.05, 30.0, 120), [Z_SWITCH, Z_SWITCH * (1 + 1e-12)]])
    got = bessel_j_norm(alpha, z)
    pre = mpmath.gamma(alpha + 1) * 2**alpha
    ref = np.array([float(pre * mpmath.besselj(alpha, zz) / mpmath.mpf(zz) ** alpha) for zz in z])
    assert np.all(np.abs(got - ref) <= 1e-12 * np.abs(ref) + 1e-15)


@settings(max_examples=60, deadline=None)
@given(alpha=st.floats(-0.5, 8.0), z=st.floats(0.0, 30.0))
def test_bessel_is_even(alpha, z):
    assert bessel_j_norm(alpha, -z) == bessel_j_norm(alpha, z)


def test_series_termination_is_converged():
    # one more term at the cutoff changes nothing at double precision
    alpha, z = 1.3, 4.9
    q = -(0.5 * z) ** 2
    term, total, n = 1.0, 1.0, 0
    while True:
        n += 1
        term *= q / (n * (n + alpha))
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
    nxt = term * q / ((n + 1) * (n + 1 + alpha))
    assert abs(nxt) < 1e-15 * abs(total)
    assert bessel_j_norm(alpha, z) == pytest.approx(total, rel=1e-15)


def test_dunkl_kernel_examples():
    p0 = DunklParam(0.0, test_mode=True)
    assert dunkl_kernel(p0, 1.0) == pytest.approx(cmath.exp(1j), abs=1e-15)
    s, c = math.sin(1.0), math.cos(1.0)
    assert dunkl_kernel(DunklParam(1.0), 1.0) == pytest.approx(complex(s, s - c), abs=1e-15)
    assert dunkl_kernel(DunklParam(2.0), 0.0) == 1.0 + 0.0j


def test_dunkl_kernel_small_lambda_limit():
    z = np.linspace(-10.0, 10.0, 401)
    got = dunkl_kernel(DunklParam(1e-8), z)
    assert np.max(np.abs(got - np.exp(1j * z))) < 1e-6


@settings(max_examples=60, deadline=None)
@given(lam=st.floats(0.05, 6.0), z=st.floats(-40.0, 40.0))
def test_dunkl_kernel_conjugate_symmetry(lam, z):
    p = DunklParam(lam)
    assert dunkl_kernel(p, -z) == pytest.approx(dunkl_kernel(p, z).conjugate(), abs=1e-14)
