import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dunklhp.atoms import AtomicRepresentation, Interval, make_atom
from dunklhp.kernels import (
    HalfPlanePoint,
    SingularityError,
    cauchy_riemann_residual,
    conj_poisson_integral,
    conj_poisson_kernel,
    dunkl_derivative,
    half_plane_integrals,
    hilbert_kernel,
    hilbert_transform,
    kernel_frame,
    kernel_prefactor,
    poisson_integral,
    poisson_kernel,
)
from dunklhp.quadrature import weighted_interval_rule
from dunklhp.special import DomainError, DunklParam
from dunklhp.transform import GridFunction


def _theta_kernel(lam, x, y, t, numer):
    """Poisson-type kernel straight from the theta integral, with sgn(0) = 0."""
    sg = 0 if x * t == 0 else math.copysign(1, x * t)
    with mpmath.workdps(30):
        f = lambda th: ((1 + sg * mpmath.cos(th)) * mpmath.sin(th) ** (2 * lam - 1)
                        / (y * y + x * x + t * t - 2 * abs(x * t) * mpmath.cos(th)) ** (lam + 1))
        J = mpmath.quad(f, [0, mpmath.pi / 2, mpmath.pi])
        return float(kernel_prefactor(lam) * numer * J)


def test_hilbert_kernel_brute_force_oracle():
    lam, x, t = 1.0, 2.0, 1.0
    with mpmath.workdps(30):
        J = mpmath.quad(lambda s: (1 + s) / (x * x + t * t - 2 * x * t * s) ** 2, [-1, 1])
    ref = kernel_prefactor(lam) * (x - t) * float(J)
    assert hilbert_kernel(DunklParam(lam), x, t) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("lam", [0.3, 1.0, 2.5])
@pytest.mark.parametrize("x, t", [(2.0, 1.0), (-1.5, 0.4), (0.7, -3.0), (0.0, 1.2)])
def test_hilbert_kernel_matches_theta_form(lam, x, t):
    got = hilbert_kernel(DunklParam(lam), x, t)
    assert got == pytest.approx(_theta_kernel(lam, x, 0.0, t, x - t), rel=1e-10)


def test_hilbert_kernel_sign_and_antisymmetry():
    p = DunklParam(1.0)
    assert hilbert_kernel(p, 2.0, 1.0) == pytest.approx(-hilbert_kernel(p, 1.0, 2.0), rel=1e-14)
    assert hilbert_kernel(p, 2.0, 1.0) > 0.0


@settings(max_examples=50, deadline=None)
@given(lam=st.floats(0.1, 4.0), x=st.floats(-5, 5), t=st.floats(-5, 5))
def test_hilbert_kernel_antisymmetric(lam, x, t):
    if abs(x - t) < 1e-3 or abs(x + t) < 1e-3:
        return
    p = DunklParam(lam)
    assert hilbert_kernel(p, x, t) == pytest.approx(-hilbert_kernel(p, t, x), rel=1e-11)


@pytest.mark.parametrize("x, t", [(1.0, 1.0), (0.0, 0.0), (1.0, 1.0 + 1e-12)])
def test_hilbert_kernel_singular(x, t):
    with pytest.raises(SingularityError):
        hilbert_kernel(DunklParam(1.0), x, t)


def test_poisson_kernel_x_zero_closed_form():
    p = DunklParam(1.0)
    for y, t in ((1.0, 0.5), (0.3, -2.0), (2.0, 3.0)):
        ref = 2.0 * math.sqrt(2.0 / math.pi) * y / (y * y + t * t) ** 2
        assert poisson_kernel(p, 0.0, y, t) == pytest.approx(ref, rel=1e-13)


@pytest.mark.parametrize("lam", [0.4, 1.5])
@pytest.mark.parametrize("x, y, t", [(1.0, 0.5, -2.0), (0.3, 2.0, 0.9), (-2.0, 0.1, -1.9)])
def test_poisson_kernels_match_theta_form(lam, x, y, t):
    p = DunklParam(lam)
    assert poisson_kernel(p, x, y, t) == pytest.approx(_theta_kernel(lam, x, y, t, y), rel=1e-10)
    assert conj_poisson_kernel(p, x, y, t) == pytest.approx(_theta_kernel(lam, x, y, t, x - t), rel=1e-10)


def test_poisson_kernel_positivity_and_domain():
    p = DunklParam(1.5)
    assert poisson_kernel(p, 1.0, 0.5, -2.0) > 0.0
    for y in (0.0, -1.0):
        with pytest.raises(DomainError):
            poisson_kernel(p, 1.0, y, 0.5)


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("x", [-1.0, 0.0, 1.5])
@pytest.mark.parametrize("y", [0.3, 1.0, 3.0])
def test_poisson_normalization(lam, x, y):
    p = DunklParam(lam)
    a = HalfPlanePoint(x, y)
    # graded pieces out to |t| ~ 1e9 keep the missing tail mass far below 1e-6
    total = p.c_lambda * sum(
        weighted_interval_rule(p, lo, hi, 64).integrate(lambda t: poisson_kernel(p, a.x, a.y, t))
        for lo, hi in _pieces(x, y))
    assert total == pytest.approx(1.0, abs=1e-6)


def _pieces(x, y):
    edges = sorted({0.0, x, -x} | {c + s * y * 2.0**k for c in (x, -x) for s in (-1, 1) for k in range(-4, 30)})
    edges = [e for e in edges if abs(e) < 1e9]
    return list(zip(edges[:-1], edges[1:]))


def test_poisson_normalization_analytic():
    # c_1 * 2 sqrt(2/pi) * 2 int_0^inf t^2 / (1 + t^2)^2 dt = 1 since the integral is pi/4
    c1 = DunklParam(1.0).c_lambda
    assert c1 * 2.0 * math.sqrt(2.0 / math.pi) * 2.0 * (math.pi / 4.0) == pytest.approx(1.0, rel=1e-15)


@settings(max_examples=40, deadline=None)
@given(lam=st.floats(0.1, 3.0), x=st.floats(-4, 4), y=st.floats(0.05, 4), t=st.floats(-4, 4),
       c=st.floats(0.2, 5.0))
def test_poisson_symmetry_and_scaling(lam, x, y, t, c):
    p = DunklParam(lam)
    v = poisson_kernel(p, x, y, t)
    assert poisson_kernel(p, -x, y, -t) == pytest.approx(v, rel=1e-12)
    assert poisson_kernel(p, c * x, c * y, c * t) == pytest.approx(c ** (-(2 * lam + 1)) * v, rel=1e-10)


def test_conj_poisson_examples():
    p = DunklParam(1.0)
    assert conj_poisson_kernel(p, 2.0, 1e-6, 1.0) == pytest.approx(hilbert_kernel(p, 2.0, 1.0), rel=1e-5)
    assert conj_poisson_kernel(p, 2.0, 0.0, 1.0) == pytest.approx(hilbert_kernel(p, 2.0, 1.0), rel=1e-14)
    assert conj_poisson_kernel(p, 2.0, 0.5, 1.0) > 0.0
    assert conj_poisson_kernel(p, 1.3, 0.5, 1.3) == 0.0
    with pytest.raises(SingularityError):
        conj_poisson_kernel(p, 1.0, 0.0, 1.0)


def test_kernel_frame_invariants():
    rng = np.random.default_rng(7)
    x0, d0 = 2.0, 0.4
    x = rng.uniform(-12, 12, 4000)
    keep = (np.abs(x - x0) >= 4 * d0) & (np.abs(x + x0) >= 4 * d0)
    x = x[keep]
    t = rng.uniform(x0 - d0, x0 + d0, x.size)
    s = rng.uniform(-1, 1, x.size)
    y = rng.uniform(0, 3, x.size)
    fr = kernel_frame(x, t, s, x0, y)
    assert np.all(fr.s_form >= (1 - s**2) * np.minimum(x**2, t**2) - 1e-12)
    assert np.all(fr.ys_form >= fr.s_form)
    ref = kernel_frame(x, x0, s, x0)
    assert np.allclose(fr.delta1, fr.s_form - ref.s_form, atol=1e-12)
    assert np.all(np.abs(fr.delta1) <= 3 * np.abs(t - x0) * np.sqrt(ref.s_form) + 1e-12)
    assert np.all(np.abs(x0 + t - 2 * x * s) <= 3 * np.sqrt(ref.s_form) + 1e-12)


def test_dunkl_derivative_examples():
    assert dunkl_derivative(lambda x: x**2, 1.0, 1e-4, DunklParam(1.0)) == pytest.approx(2.0, abs=1e-7)
    assert dunkl_derivative(lambda x: x, 2.0, 1e-4, DunklParam(1.0)) == pytest.approx(3.0, abs=1e-10)
    assert dunkl_derivative(lambda x: x**3, 1.0, 1e-4, DunklParam(2.0)) == pytest.approx(7.0, abs=1e-7)
    with pytest.raises(DomainError):
        dunkl_derivative(np.sin, 0.0, 1e-3, DunklParam(1.0))


def test_cauchy_riemann_trivial_field():
    zero = lambda x, y: 0.0
    assert cauchy_riemann_residual(zero, zero, HalfPlanePoint(1.0, 1.0), 0.1, DunklParam(1.0)) == (0.0, 0.0)
    with pytest.raises(DomainError):
        cauchy_riemann_residual(zero, zero, HalfPlanePoint(1.0, 1.0), 0.3, DunklParam(1.0))


@pytest.fixture(scope="module")
def atom():
    return make_atom(DunklParam(1.0), 1.0, Interval(2.0, 0.5), 0)


def test_poisson_integrals_basic(atom):
    p = DunklParam(1.0)
    zero = GridFunction((1.0, 2.0), np.zeros_like)
    assert poisson_integral(zero, p, HalfPlanePoint(0.5, 1.0)) == 0.0
    assert conj_poisson_integral(zero, p, HalfPlanePoint(0.5, 1.0)) == 0.0
    bump = GridFunction((1.0, 2.0), lambda t: (t - 1.0) * (2.0 - t))
    assert all(poisson_integral(bump, p, HalfPlanePoint(x, 0.2)) > 0 for x in (-3.0, 0.0, 1.5, 4.0))
    far = [abs(poisson_integral(atom, p, HalfPlanePoint(1.0, y))) for y in (10.0, 100.0, 1000.0)]
    assert far[0] > far[1] > far[2] and far[2] < 1e-9


def test_poisson_integral_against_direct_quadrature(atom):
    p = DunklParam(1.0)
    x, y = 1.3, 0.7
    r = weighted_interval_rule(p, atom.interval.lo, atom.interval.hi, 200)
    P_ref = p.c_lambda * r.integrate(lambda t: atom(t) * poisson_kernel(p, x, y, t))
    Q_ref = p.c_lambda * r.integrate(lambda t: atom(t) * conj_poisson_kernel(p, x, y, t))
    P, Q = half_plane_integrals(atom, p, x, y)
    assert float(P) == pytest.approx(P_ref, rel=1e-10)
    assert float(Q) == pytest.approx(Q_ref, rel=1e-10)


def test_classical_hilbert_transform_of_indicator():
    p0 = DunklParam(0.0, test_mode=True)
    f = GridFunction((1.0, 3.0), np.ones_like)
    for x in (-2.0, 0.5, 1.7, 2.0, 2.9, 5.0):
        ref = math.log(abs((x - 1.0) / (x - 3.0))) / math.pi
        assert hilbert_transform(f, p0, x) == pytest.approx(ref, abs=1e-12)


def test_classical_hilbert_transform_of_bump():
    p0 = DunklParam(0.0, test_mode=True)
    f = GridFunction((-1.0, 1.0), lambda t: 1.0 - t * t)
    # (1/pi) PV int (1 - t^2)/(x - t) dt in closed form
    def ref(x):
        return ((1 - x * x) * math.log(abs((x + 1) / (x - 1))) + 2 * x) / math.pi
    for x in (-3.0, -0.4, 0.3, 0.95, 2.0):
        assert hilbert_transform(f, p0, x) == pytest.approx(ref(x), abs=1e-4)


def test_conjugate_poisson_tends_to_hilbert(atom):
    p = DunklParam(1.0)
    for x in (1.8, 0.5, -2.0):
        h = hilbert_transform(atom, p, x)
        q = [conj_poisson_integral(atom, p, HalfPlanePoint(x, y)) for y in (1e-3, 1e-4)]
        assert abs(q[1] - h) < abs(q[0] - h) + 1e-9
        assert q[1] == pytest.approx(h, abs=2e-3 * max(1.0, abs(h)))


def test_hilbert_far_field_decay(atom):
    p = DunklParam(1.0)
    x0 = 2.0
    x = np.concatenate([np.geomspace(4.5, 200, 12), -np.geomspace(4.5, 200, 12)])
    H = hilbert_transform(atom, p, x)
    scaled = np.abs(H) * np.abs(np.abs(x) - x0) ** 2 * (np.abs(x) + x0) ** 2
    assert np.all(np.isfinite(scaled)) and scaled.max() / scaled[np.abs(x) > 50].min() < 10


def test_hilbert_transform_outside_support_is_plain_integral(atom):
    p = DunklParam(1.0)
    x = 5.0
    r = weighted_interval_rule(p, atom.interval.lo, atom.interval.hi, 200)
    ref = p.c_lambda * r.integrate(lambda t: atom(t) * hilbert_kernel(p, x, t))
    assert hilbert_transform(atom, p, x) == pytest.approx(ref, rel=1e-11)


def test_hilbert_transform_representation_matches_sum(atom):
    p = DunklParam(1.0)
    b = make_atom(p, 1.0, Interval(-3.0, 0.5), 0)
    rep = AtomicRepresentation(((1.0, atom), (0.5, b)))
    x = np.array([1.9, -2.8, 0.3, 6.0])
    assert np.allclose(hilbert_transform(rep, p, x),
                       hilbert_transform(atom, p, x) + 0.5 * hilbert_transform(b, p, x), rtol=1e-8, atol=1e-12)
