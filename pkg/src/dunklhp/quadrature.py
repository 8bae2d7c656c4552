"""Quadrature rules for the measures used throughout the package.

* Gauss-Jacobi rules built by Golub-Welsch from the Jacobi three-term
  recurrence (symmetric/Gegenbauer case ``jacobi_rule`` for (1-s^2)^e ds).
* Rules for |x|^{2 lambda} dx on bounded intervals, split at 0.
* Composite, geometrically graded panel rules for near-singular integrands.
* The pencil integral  int_{-1}^{1} N(s) (1-s^2)^{lambda-1} (A - B s)^{-m} ds,
  which every half-plane kernel reduces to after s = cos(theta).
* Principal values by folding + Richardson extrapolation, and tail cutoffs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .special import DomainError, DunklParam

__all__ = [
    "QuadRule",
    "PVResult",
    "PVConvergenceError",
    "gauss_jacobi",
    "gauss_legendre",
    "jacobi_rule",
    "default_rule_size",
    "weighted_interval_rule",
    "geometric_edges",
    "panel_rule",
    "graded_rule",
    "focused_rule",
    "tail_rule",
    "s_integral",
    "principal_value",
    "tail_cutoff",
]


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class QuadRule:
    """Immutable node/weight set; ``weights`` already contain the measure."""

    nodes: np.ndarray
    weights: np.ndarray
    weight_kind: str = "legendre"
    domain: tuple = (-1.0, 1.0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", _frozen(self.nodes))
        object.__setattr__(self, "weights", _frozen(self.weights))

    def __len__(self) -> int:
        return self.nodes.size

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]):
        return np.dot(self.weights, f(self.nodes))


def default_rule_size(lam: float) -> int:
    return max(64, math.ceil(10.0 * lam) + 32)


@lru_cache(maxsize=256)
def _gauss_jacobi_cached(alpha: float, beta: float, n: int):
    k = np.arange(n, dtype=float)
    ab = alpha + beta
    two_k = 2.0 * k + ab
    with np.errstate(divide="ignore", invalid="ignore"):
        diag = (beta**2 - alpha**2) / (two_k * (two_k + 2.0))
        diag[0] = (beta - alpha) / (ab + 2.0)
        kk = np.arange(1, n, dtype=float)
        t = 2.0 * kk + ab
        off2 = 4.0 * kk * (kk + alpha) * (kk + beta) * (kk + ab) / (t**2 * (t + 1.0) * (t - 1.0))
    if n > 1 and abs(ab + 1.0) < 1e-14:
        # removable 0/0 at k=1 when alpha + beta = -1
        off2[0] = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) ** 2 * (3.0 + ab))
    beta_off = np.sqrt(off2)
    nodes = eigh_tridiagonal(diag, beta_off, eigvals_only=True)
    mu0 = math.exp(
        (ab + 1.0) * math.log(2.0)
        + math.lgamma(alpha + 1.0)
        + math.lgamma(beta + 1.0)
        - math.lgamma(ab + 2.0)
    )
    # Christoffel numbers from the orthonormal recurrence; more accurate than
    # squared eigenvector components for the small end weights
    p_prev = np.zeros(n)
    p_cur = np.full(n, 1.0 / math.sqrt(mu0))
    ssq = p_cur**2
    for k in range(n - 1):
        p_next = ((nodes - diag[k]) * p_cur - (beta_off[k - 1] if k > 0 else 0.0) * p_prev) / beta_off[k]
        p_prev, p_cur = p_cur, p_next
        ssq += p_cur**2
    weights = 1.0 / ssq
    return _frozen(nodes), _frozen(weights)


def gauss_jacobi(alpha: float, beta: float, n: int) -> QuadRule:
    """Gauss rule for (1-x)^alpha (1+x)^beta dx on [-1, 1]."""
    if n < 1 or int(n) != n:
        raise DomainError(f"rule size must be a positive integer, got {n!r}")
    if alpha <= -1.0 or beta <= -1.0:
        raise DomainError(f"Jacobi exponents must exceed -1, got ({alpha}, {beta})")
    x, w = _gauss_jacobi_cached(float(alpha), float(beta), int(n))
    return QuadRule(x, w, f"jacobi({alpha:g},{beta:g})", (-1.0, 1.0))


def gauss_legendre(n: int) -> QuadRule:
    return gauss_jacobi(0.0, 0.0, n)


def jacobi_rule(exponent: float, n: int) -> QuadRule:
    """Gauss rule for (1-s^2)^exponent ds on [-1, 1]."""
    if exponent <= -1.0:
        raise DomainError(f"exponent must exceed -1, got {exponent}")
    r = gauss_jacobi(exponent, exponent, n)
    return QuadRule(r.nodes, r.weights, f"jacobi({exponent:g})", (-1.0, 1.0))


def _half_power_rule(lam: float, a: float, b: float, n: int):
    """Nodes/weights for |x|^{2 lam} dx on [a, b] where one end is 0."""
    e = 2.0 * lam
    if e == 0.0:
        g = gauss_legendre(n)
        half = 0.5 * (b - a)
        return a + half * (g.nodes + 1.0), half * g.weights
    g = gauss_jacobi(0.0, e, n)  # (1+u)^e: singular end at u=-1
    if a == 0.0:
        length = b
        x = 0.5 * length * (1.0 + g.nodes)
    else:
        length = -a
        x = -0.5 * length * (1.0 + g.nodes)
    w = (0.5 * length) ** (e + 1.0) * g.weights
    if a != 0.0:
        x, w = x[::-1], w[::-1]
    return x, w


def weighted_interval_rule(p: DunklParam, lo: float, hi: float, n: int | None = None) -> QuadRule:
    """Rule for f -> int_lo^hi f(x) |x|^{2 lambda} dx.

    Intervals containing 0 are split there and each half gets a Gauss-Jacobi
    rule that absorbs the algebraic endpoint behaviour exactly.
    """
    lo, hi = float(lo), float(hi)
    if not lo < hi:
        raise DomainError(f"need lo < hi, got [{lo}, {hi}]")
    if n is None:
        n = default_rule_size(p.lam)
    lam = p.lam
    if lo < 0.0 < hi:
        x1, w1 = _half_power_rule(lam, lo, 0.0, n)
        x2, w2 = _half_power_rule(lam, 0.0, hi, n)
        x, w = np.concatenate([x1, x2]), np.concatenate([w1, w2])
    elif lo == 0.0 or hi == 0.0:
        x, w = _half_power_rule(lam, lo, hi, n)
    else:
        g = gauss_legendre(n)
        half = 0.5 * (hi - lo)
        x = lo + half * (g.nodes + 1.0)
        w = half * g.weights * np.abs(x) ** (2.0 * lam)
    return QuadRule(x, w, f"power({2.0 * lam:g})", (lo, hi))


def geometric_edges(a: float, b: float, h0: float, ratio: float = 2.0) -> np.ndarray:
    """Panel edges from ``a`` to ``b`` whose widths grow geometrically from ``h0``.

    ``a`` may lie on either side of ``b``; the fine end is always ``a``.
    """
    length = abs(b - a)
    if length == 0.0:
        return np.array([a])
    if h0 <= 0.0 or h0 >= length:
        return np.array([a, b])
    sgn = 1.0 if b > a else -1.0
    edges = [0.0, h0]
    while edges[-1] < length:
        nxt = edges[-1] * ratio
        if nxt >= length or (length - nxt) < 0.5 * (nxt - edges[-1]):
            edges.append(length)
            break
        edges.append(nxt)
    edges = np.array(edges)
    edges[-1] = length
    return a + sgn * edges


def panel_rule(edges: Sequence[float], n: int = 16, lam: float | None = None):
    """Composite Gauss rule over consecutive panels.

    With ``lam`` the weights include |x|^{2 lam}; panels touching 0 use the
    Jacobi rule for that endpoint.  Returns (nodes, weights).
    """
    edges = np.asarray(edges, dtype=float)
    if edges.size < 2:
        return np.empty(0), np.empty(0)
    a, b = edges[:-1], edges[1:]
    keep = b != a
    a, b = a[keep], b[keep]
    g = gauss_legendre(n)
    half = 0.5 * (b - a)
    x = (a + half)[:, None] + half[:, None] * g.nodes[None, :]
    w = half[:, None] * g.weights[None, :]
    if lam is not None and lam != 0.0:
        w = w * np.abs(x) ** (2.0 * lam)
        zero_end = (a == 0.0) | (b == 0.0)
        for i in np.flatnonzero(zero_end):
            xi, wi = _half_power_rule(lam, a[i], b[i], n)
            x[i], w[i] = xi, wi
    return x.ravel(), w.ravel()


def graded_rule(lo: float, hi: float, focus: float, h0: float, n: int = 16,
                lam: float | None = None, ratio: float = 2.0, breaks: Sequence[float] = ()):
    """Composite rule on [lo, hi] refined geometrically toward ``focus``.

    ``focus`` may sit inside or outside the interval; ``h0`` is the width of
    the finest panel (normally the distance to the nearby singularity).
    Extra ``breaks`` (e.g. 0 for the |x|^{2 lam} weight) are inserted.
    """
    if focus <= lo:
        edges = geometric_edges(lo, hi, h0, ratio)
    elif focus >= hi:
        edges = geometric_edges(hi, lo, h0, ratio)[::-1]
    else:
        left = geometric_edges(focus, lo, h0, ratio)[::-1]
        right = geometric_edges(focus, hi, h0, ratio)
        edges = np.concatenate([left, right[1:]])
    extra = [c for c in breaks if lo < c < hi]
    if extra:
        edges = np.unique(np.concatenate([edges, extra]))
    return panel_rule(edges, n, lam)


def focused_rule(lo: float, hi: float, foci: Sequence[tuple], n: int = 16,
                 lam: float | None = None, ratio: float = 2.0):
    """Composite rule on [lo, hi] graded toward several (point, width) foci.

    A focus outside the interval grades the nearest end with its width
    increased by the distance.  0 becomes a break when ``lam`` is given so
    the |x|^{2 lam} weight is absorbed by a Jacobi panel.
    """
    if not lo < hi:
        raise DomainError(f"need lo < hi, got [{lo}, {hi}]")
    pts = {lo: hi - lo, hi: hi - lo}
    for c, h in foci:
        if c <= lo:
            c, h = lo, h + (lo - c)
        elif c >= hi:
            c, h = hi, h + (c - hi)
        pts[c] = min(pts.get(c, np.inf), max(h, 1e-300))
    if lam is not None and lo < 0.0 < hi:
        pts.setdefault(0.0, hi - lo)
    keys = sorted(pts)
    edges = [keys[0]]
    for a, b in zip(keys[:-1], keys[1:]):
        mid = 0.5 * (a + b)
        left = geometric_edges(a, mid, pts[a], ratio)
        right = geometric_edges(b, mid, pts[b], ratio)[::-1]
        edges.extend(left[1:])
        edges.extend(right[1:])
    return panel_rule(np.array(edges), n, lam)


def tail_rule(R: float, n: int = 24):
    """Rule for int_R^inf f(t) dt via t = R/u (smooth for f ~ t^-2)."""
    g = gauss_legendre(n)
    u = 0.5 * (g.nodes + 1.0)
    return R / u, 0.5 * g.weights * R / u**2


# --------------------------------------------------------------------------
# pencil integral over the (1-s^2)^{lam-1} measure

_PEAK_RATIO = 4.0
_SINGLE_PANEL_WIDTH = 0.25


def _half_jacobi(lam: float, n: int):
    """Gauss rule for v^{lam-1} dv on [0, 1]."""
    g = gauss_jacobi(0.0, lam - 1.0, n)
    return 0.5 * (g.nodes + 1.0), g.weights * 0.5**lam


def s_integral(lam: float, A, B, gap, sigma=1.0, numer: Callable | None = None,
               m: float | None = None, n: int = 24, n_panel: int = 16) -> np.ndarray:
    """Vectorized  int_{-1}^{1} N(s) (1-s^2)^{lam-1} (A - B s)^{-m} ds.

    ``gap`` must equal A - |B| > 0 and is passed separately so that nearly
    degenerate pencils (A ~ |B|) keep full relative accuracy.  By default
    N(s) = 1 + sigma*s with sigma in {-1, 0, 1} (broadcast with A).  A custom
    ``numer`` is called as ``numer(s, one_minus_s, one_plus_s)``; the last two
    are computed without cancellation.  ``m`` defaults to lam + 1.
    """
    if lam <= 0.0:
        raise DomainError("the (1-s^2)^{lambda-1} measure requires lambda > 0")
    if m is None:
        m = lam + 1.0
    A, B, gap, sigma = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (A, B, gap, sigma)))
    shape = A.shape
    A, B, gap, sigma = A.ravel(), B.ravel(), gap.ravel(), sigma.ravel()
    if np.any(gap <= 0.0):
        raise DomainError("degenerate pencil: A - |B| must be positive")
    out = np.zeros(A.size)
    sig = np.where(B < 0.0, -1.0, 1.0)
    Bab = np.abs(B)

    def call(u, idx, side):
        # side=+1: u measured from the peak end s = sig; side=-1: from s = -sig
        extra = (None,) * (u.ndim - 1)
        toward = (sig[idx] * side)[(slice(None),) + extra]
        s = toward * (1.0 - u)
        near, far = u, 2.0 - u
        om = np.where(toward > 0, near, far)
        op = np.where(toward > 0, far, near)
        if numer is not None:
            return numer(s, om, op)
        sg = sigma[idx][(slice(None),) + extra]
        return np.where(sg > 0, op, np.where(sg < 0, om, 1.0))

    # far half: D = A + |B| (1 - v), smooth
    v, wv = _half_jacobi(lam, n)
    V = v[None, :]
    D = A[:, None] + Bab[:, None] * (1.0 - V)
    vals = call(V, slice(None), -1.0) * (2.0 - V) ** (lam - 1.0) * D ** (-m)
    out += vals @ wv

    # peak half: D = gap + |B| u, peaked at u = 0 with width w = gap/|B|
    with np.errstate(divide="ignore", over="ignore"):
        w = np.where(Bab > 0.0, gap / np.where(Bab > 0.0, Bab, 1.0), np.inf)
    npan = np.where(w >= _SINGLE_PANEL_WIDTH, 0,
                    np.ceil(np.log(1.0 / np.minimum(w, 1.0)) / math.log(_PEAK_RATIO))).astype(int)
    u_single, w_single = _half_jacobi(lam, n)
    for L in np.unique(npan):
        idx = np.flatnonzero(npan == L)
        g_, b_ = gap[idx], Bab[idx]
        if L == 0:
            U = u_single[None, :]
            D = g_[:, None] + b_[:, None] * U
            vals = call(U, idx, 1.0) * (2.0 - U) ** (lam - 1.0) * D ** (-m)
            out[idx] += vals @ w_single
            continue
        wi = w[idx]
        # first panel [0, w] with the u^{lam-1} weight absorbed
        uj, wj = _half_jacobi(lam, n_panel)
        U = wi[:, None] * uj[None, :]
        WU = wi[:, None] ** lam * wj[None, :]
        D = g_[:, None] + b_[:, None] * U
        acc = np.sum(WU * call(U, idx, 1.0) * (2.0 - U) ** (lam - 1.0) * D ** (-m), axis=1)
        # geometric Legendre panels [w 4^k, w 4^{k+1}] clipped to 1
        k = np.arange(L)
        lo_e = np.minimum(wi[:, None] * _PEAK_RATIO**k[None, :], 1.0)
        hi_e = np.minimum(wi[:, None] * _PEAK_RATIO ** (k[None, :] + 1), 1.0)
        hi_e[:, -1] = 1.0
        gl = gauss_legendre(n_panel)
        half = 0.5 * (hi_e - lo_e)
        U = (lo_e + half)[:, :, None] + half[:, :, None] * gl.nodes[None, None, :]
        WU = half[:, :, None] * gl.weights[None, None, :]
        D = g_[:, None, None] + b_[:, None, None] * U
        vals = (call(U, idx, 1.0) * (U * (2.0 - U)) ** (lam - 1.0)
                * D ** (-m) * WU)
        acc += vals.sum(axis=(1, 2))
        out[idx] += acc
    return out.reshape(shape)


# --------------------------------------------------------------------------
# principal values


class PVConvergenceError(ArithmeticError):
    """Symmetric-exclusion integrals failed to settle."""

    def __init__(self, message: str, partials):
        super().__init__(message)
        self.partials = list(partials)


@dataclass(frozen=True)
class PVResult:
    value: float
    error: float
    partials: tuple = field(default=())

    def __float__(self) -> float:
        return self.value


def _pv_basis(k: int, e: np.ndarray) -> np.ndarray:
    # e, e^3, e^3 log e, e^5, e^5 log e, ...
    power = 2 * (k // 2) + 1
    return e**power * (np.log(e) if k >= 2 and k % 2 == 0 else 1.0)


def principal_value(f: Callable, x: float, radius: float,
                    eps_sequence: Sequence[float] | None = None, n: int = 16) -> PVResult:
    """PV of int_{x-radius}^{x+radius} f(t) dt.

    Each symmetric-exclusion integral int_{eps<|t-x|<radius} f is computed
    from the folded integrand f(x+tau) + f(x-tau), then the sequence is
    extrapolated to eps -> 0 (Richardson in odd powers of eps, with
    eps^{2k+1} log eps companions).
    ``f`` must accept numpy arrays.
    """
    if radius <= 0.0:
        raise DomainError("radius must be positive")
    if eps_sequence is None:
        eps_sequence = radius * 0.5 ** np.arange(1, 8)
    eps = np.asarray(eps_sequence, dtype=float)
    if eps.size < 3:
        raise DomainError("need at least 3 exclusion radii")
    if np.any(np.diff(eps) >= 0) or eps[-1] <= 0 or eps[0] >= radius:
        raise DomainError("eps_sequence must be positive, decreasing and below radius")

    # all exclusion rings share one call of f
    x_f, w_f = panel_rule(geometric_edges(eps[0], radius, eps[0], 2.0), n)
    gl = gauss_legendre(n)
    half = 0.5 * (eps[:-1] - eps[1:])
    tau_r = eps[1:, None] + half[:, None] * (gl.nodes[None, :] + 1.0)
    taus = np.concatenate([x_f, tau_r.ravel()])
    vals = np.asarray(f(np.concatenate([x + taus, x - taus])), dtype=float)
    g = vals[: taus.size] + vals[taus.size:]
    partial = [float(np.dot(w_f, g[: x_f.size]))]
    rings = (g[x_f.size:].reshape(tau_r.shape) * gl.weights[None, :]) @ np.ones(n) * half
    partial = np.array(partial + list(partial[0] + np.cumsum(rings)))

    # The folded integrand is even in tau, up to tau^{2k} log tau terms that
    # Dunkl kernels carry near the diagonal, so the excluded piece expands in
    # eps, eps^3, eps^3 log eps, eps^5, ...; entry m fits m of them to the last m+1 partials.
    diag = [partial[-1]]
    for m in range(1, eps.size):
        e = eps[-(m + 1):] / eps[-1]
        V = np.column_stack([np.ones_like(e)] + [_pv_basis(k, e) for k in range(1, m + 1)])
        diag.append(np.linalg.solve(V, partial[-(m + 1):])[0])
    diag = np.array(diag)
    # the highest orders amplify rounding; keep the best-settled entry
    diffs = np.abs(np.diff(diag))
    j = int(np.argmin(diffs[: max(1, min(4, diffs.size))])) + 1
    value = float(diag[j])
    err = max(float(diffs[j - 1]), 4.0 * np.finfo(float).eps * float(np.max(np.abs(partial))))
    steps = np.abs(np.diff(partial))
    if not np.all(np.isfinite(partial)) or (steps.size >= 3 and steps[-1] > 2.0 * steps[-3] + 1e-300
                                            and steps[-1] > 1e-10 * max(1.0, np.max(np.abs(partial)))):
        raise PVConvergenceError("symmetric-exclusion integrals diverge", partial)
    return PVResult(value, err, tuple(float(v) for v in partial))


def tail_cutoff(decay_order: float, tol: float, scale: float = 1.0) -> float:
    """Smallest R with int_R^inf (scale/r)^decay_order dr <= tol."""
    q = float(decay_order)
    if q <= 1.0:
        raise DomainError(f"tail with decay order {q} <= 1 is not integrable")
    if tol <= 0.0 or scale <= 0.0:
        raise DomainError("tol and scale must be positive")
    return (scale**q / ((q - 1.0) * tol)) ** (1.0 / (q - 1.0))
