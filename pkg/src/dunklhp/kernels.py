"""Hilbert, Poisson and conjugate Poisson kernels of the Dunkl setting.

After s = cos(theta) every kernel is a pencil integral

    prefactor * numerator * int (1 + sigma s)(1-s^2)^{lam-1} (A - B s)^{-lam-1} ds

with prefactor = lam Gamma(lam+1/2) 2^{lam+1/2} / pi, so that
c_lambda * prefactor = lam / pi.  Test mode (lam = 0) uses the limit of
lam times the s-integral, which gives the classical Poisson and Hilbert kernels.  The s-integral is evaluated by
``quadrature.s_integral``, which resolves the peak at s = +-1 that appears
when (x, t) approach the diagonal or y -> 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .quadrature import focused_rule, principal_value, s_integral
from .special import DomainError, DunklParam, gamma

__all__ = [
    "SingularityError",
    "KernelFrame",
    "HalfPlanePoint",
    "kernel_prefactor",
    "kernel_frame",
    "hilbert_kernel",
    "poisson_kernel",
    "conj_poisson_kernel",
    "poisson_integral",
    "conj_poisson_integral",
    "half_plane_integrals",
    "hilbert_transform",
    "dunkl_derivative",
    "cauchy_riemann_residual",
    "NEAR_DIAGONAL",
]

NEAR_DIAGONAL = 1e-8
T_NODES = 16
BATCH_NODES = 1 << 15


class SingularityError(ArithmeticError):
    """Kernel evaluated on (or numerically on) its singular set."""


@dataclass(frozen=True)
class HalfPlanePoint:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not self.y > 0.0:
            raise DomainError(f"half-plane point needs y > 0, got {self.y}")


@dataclass(frozen=True)
class KernelFrame:
    """Quadratic forms shared by the kernels.

    s_form = <x,t>_s = x^2 + t^2 - 2xts,  ys_form = y^2 + s_form,
    delta1 = <x,t>_s - <x,x0>_s = (t - x0)(t + x0 - 2xs).
    """

    s_form: np.ndarray
    ys_form: np.ndarray
    delta1: np.ndarray


def kernel_frame(x, t, s, x0, y=0.0) -> KernelFrame:
    x, t, s, x0, y = (np.asarray(v, dtype=float) for v in (x, t, s, x0, y))
    s_form = x**2 + t**2 - 2.0 * x * t * s
    return KernelFrame(s_form, y**2 + s_form, (t - x0) * (t + x0 - 2.0 * x * s))


def kernel_prefactor(lam: float) -> float:
    return lam * gamma(lam + 0.5) * 2.0 ** (lam + 0.5) / math.pi


def _lam_pencil(lam, A, B, gap, sigma):
    """lam * int (1 + sigma s)(1-s^2)^{lam-1} (A - B s)^{-lam-1} ds.

    At lam = 0 the measure lam (1-s^2)^{lam-1} ds collapses onto s = +-1 with
    mass 1/2 each, which yields the classical kernels.
    """
    if lam == 0.0:
        sig = np.sign(B) * sigma
        # gap == A - |B|, formed without cancellation by the caller
        return (1.0 + sig) / (2.0 * gap) + (1.0 - sig) / (2.0 * (A + np.abs(B)))
    return lam * s_integral(lam, A, B, gap, sigma)


def _check_diagonal(x, t):
    d = np.abs(x - t)
    if np.any(d == 0.0):
        raise SingularityError("kernel is singular on the diagonal x = t")
    if np.any(d < NEAR_DIAGONAL * (np.abs(x) + np.abs(t))):
        raise SingularityError(
            f"|x - t| below {NEAR_DIAGONAL:g} (|x|+|t|): refusing a near-diagonal evaluation")


def hilbert_kernel(p: DunklParam, x, t):
    """h(x, t) = pref (x - t) int (1+s)(1-s^2)^{lam-1} (x^2+t^2-2xts)^{-lam-1} ds."""
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    _check_diagonal(x, t)
    A = x**2 + t**2
    LJ = _lam_pencil(p.lam, A, 2.0 * x * t, (np.abs(x) - np.abs(t)) ** 2 + 0.0 * A, 1.0)
    val = (x - t) * LJ / (math.pi * p.c_lambda)
    return float(val) if val.ndim == 0 else val


def _pq_pencil(p: DunklParam, x, y, t):
    x, y, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, t)))
    if np.any(y < 0.0):
        raise DomainError("y must be non-negative")
    gap = y**2 + (np.abs(x) - np.abs(t)) ** 2
    if np.any(gap == 0.0):
        raise SingularityError("kernel is singular at y = 0, |x| = |t|")
    A = y**2 + x**2 + t**2
    LJ = _lam_pencil(p.lam, A, 2.0 * np.abs(x * t), gap, np.sign(x * t))
    return x, y, t, LJ / (math.pi * p.c_lambda)


def poisson_kernel(p: DunklParam, x, y, t):
    """(tau_x P_y)(-t), with sgn(0) := 0."""
    if np.any(np.asarray(y) <= 0.0):
        raise DomainError("Poisson kernel requires y > 0")
    x, y, t, PJ = _pq_pencil(p, x, y, t)
    val = y * PJ
    return float(val) if val.ndim == 0 else val


def conj_poisson_kernel(p: DunklParam, x, y, t):
    """(tau_x Q_y)(-t); at y = 0 this is the Hilbert kernel h(x, t)."""
    x_, y_, t_ = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, t)))
    if np.any((y_ == 0.0) & (x_ == t_)):
        raise SingularityError("conjugate kernel is singular at y = 0, x = t")
    if np.any(y_ == 0.0):
        _check_diagonal(x_[y_ == 0.0], t_[y_ == 0.0])
    x, y, t, PJ = _pq_pencil(p, x_, y_, t_)
    val = (x - t) * PJ
    return float(val) if val.ndim == 0 else val


# --------------------------------------------------------------------------
# transforms of compactly supported functions


def _support(f):
    lo, hi = f.support
    return float(lo), float(hi)


def _inner_foci(f, lo: float, hi: float, h: float) -> list:
    # jumps of f inside its support hull (atom edges of a representation)
    pts = f.breakpoints() if hasattr(f, "breakpoints") else getattr(f, "breaks", ())
    return [(b, h) for b in pts if lo < b < hi]


def _scale(f) -> float:
    interval = getattr(f, "interval", None)
    if interval is not None:
        return float(interval.delta0)
    lo, hi = _support(f)
    return 0.5 * (hi - lo)


def half_plane_integrals(f, p: DunklParam, x, y: float, n: int = T_NODES):
    """(Pf(x, y), Qf(x, y)) for each x, with y > 0.

    The t-rule is graded toward t = x (width y) and its reflection t = -x.
    """
    if not y > 0.0:
        raise DomainError("half-plane integrals need y > 0")
    lo, hi = _support(f)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    inner = _inner_foci(f, lo, hi, hi - lo)
    P = np.empty(xs.size)
    Q = np.empty(xs.size)
    for i, xi in enumerate(xs):
        foci = [(xi, 0.25 * y), (-xi, 0.25 * y)] + inner
        t, w = focused_rule(lo, hi, foci, n, p.lam)
        gap = y**2 + (abs(xi) - np.abs(t)) ** 2
        LJ = _lam_pencil(p.lam, y**2 + xi**2 + t**2, 2.0 * np.abs(xi * t), gap, np.sign(xi * t))
        fw = w * f(t) * LJ / math.pi
        P[i] = y * fw.sum()
        Q[i] = np.dot(fw, xi - t)
    if np.ndim(x) == 0:
        return float(P[0]), float(Q[0])
    return P, Q


def poisson_integral(f, p: DunklParam, pt: HalfPlanePoint) -> float:
    return half_plane_integrals(f, p, pt.x, pt.y)[0]


def conj_poisson_integral(f, p: DunklParam, pt: HalfPlanePoint) -> float:
    return half_plane_integrals(f, p, pt.x, pt.y)[1]


def _hilbert_integrand(f, p: DunklParam, x: float) -> Callable:
    def g(t):
        t = np.asarray(t, dtype=float)
        LJ = _lam_pencil(p.lam, x**2 + t**2, 2.0 * x * t, (abs(x) - np.abs(t)) ** 2, 1.0)
        return f(t) * np.abs(t) ** (2.0 * p.lam) * (x - t) * LJ / math.pi

    return g


def hilbert_transform(f, p: DunklParam, x, n: int = T_NODES, return_error: bool = False):
    """H_lambda f(x): plain quadrature off the support, principal value on it.

    Inside the support the singular window has radius
    min(distance to the nearest edge or jump, 0.1 * delta0).
    """
    lo, hi = _support(f)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(xs.size)
    errs = np.zeros(xs.size)
    d0 = _scale(f)
    # h(x, t) has an integrable log singularity at the mirror point t = -x
    mirror_h = 1e-10 * (hi - lo)
    inner = _inner_foci(f, lo, hi, hi - lo)
    jumps = np.array([lo, hi] + [b for b, _ in inner])
    batch = []  # off-support points share one pencil evaluation
    for i, xi in enumerate(xs):
        if lo < xi < hi:
            r = min(float(np.abs(jumps - xi).min()), 0.1 * d0)
            if r < NEAR_DIAGONAL * abs(xi):
                raise SingularityError("point too close to a support edge or jump of f")
            g = _hilbert_integrand(f, p, xi)
            pv = principal_value(g, xi, r, r * 0.5 ** np.arange(1, 7), n)
            ts, ws = [], []
            for a, b in ((lo, xi - r), (xi + r, hi)):
                if b - a > 0.0:
                    t, w = focused_rule(a, b, [(xi, r), (-xi, mirror_h)] + inner, n)
                    ts.append(t)
                    ws.append(w)
            total = pv.value
            if ts:
                total += np.dot(np.concatenate(ws), g(np.concatenate(ts)))
            out[i], errs[i] = total, pv.error
        else:
            dist = lo - xi if xi <= lo else xi - hi
            if dist < NEAR_DIAGONAL * (abs(xi) + max(abs(lo), abs(hi))):
                raise SingularityError("point too close to the support of f")
            t, w = focused_rule(lo, hi, [(xi, dist), (-xi, mirror_h)] + inner, n, p.lam)
            batch.append((i, t, w))
    start = 0
    while start < len(batch):
        stop, count = start, 0
        while stop < len(batch) and (count == 0 or count + batch[stop][1].size <= BATCH_NODES):
            count += batch[stop][1].size
            stop += 1
        part = batch[start:stop]
        sizes = [t.size for _, t, _ in part]
        idx = [i for i, _, _ in part]
        X = np.repeat(xs[idx], sizes)
        T = np.concatenate([t for _, t, _ in part])
        W = np.concatenate([w for _, _, w in part])
        LJ = _lam_pencil(p.lam, X**2 + T**2, 2.0 * X * T, (np.abs(X) - np.abs(T)) ** 2, 1.0)
        contrib = W * f(T) * LJ * (X - T) / math.pi
        out[idx] = np.add.reduceat(contrib, np.cumsum([0] + sizes[:-1]))
        start = stop
    if np.ndim(x) == 0:
        return (float(out[0]), float(errs[0])) if return_error else float(out[0])
    return (out, errs) if return_error else out


# --------------------------------------------------------------------------
# Dunkl derivative and the lambda-Cauchy-Riemann system


def dunkl_derivative(f: Callable, x: float, h: float, p: DunklParam) -> float:
    """D_x f = f'(x) + (lam/x)(f(x) - f(-x)), f' by central differences."""
    if x == 0.0:
        raise DomainError("the Dunkl derivative is not evaluated at x = 0")
    if not h > 0.0:
        raise DomainError("step h must be positive")
    deriv = (f(x + h) - f(x - h)) / (2.0 * h)
    return deriv + p.lam / x * (f(x) - f(-x))


def cauchy_riemann_residual(u: Callable, v: Callable, pt: HalfPlanePoint, h: float,
                            p: DunklParam) -> tuple[float, float]:
    """(D_x u - d_y v, d_y u + D_x v) at pt by central differences.

    ``u`` and ``v`` are called as field(x, y).
    """
    if pt.x == 0.0:
        raise DomainError("residual needs x != 0")
    if not 0.0 < h < pt.y / 4.0:
        raise DomainError("step must satisfy 0 < h < y/4")
    x, y = pt.x, pt.y

    def dx(field):
        return dunkl_derivative(lambda s: field(s, y), x, h, p)

    def dy(field):
        return (field(x, y + h) - field(x, y - h)) / (2.0 * h)

    return dx(u) - dy(v), dy(u) + dx(v)
