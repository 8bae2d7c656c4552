"""p_lambda-atoms: polynomial times the indicator of an interval I(x0, delta0).

Coefficients are stored in the local variable tau = (t - x0) / delta0, lowest
degree first.  Working in tau keeps the construction well conditioned for
any (x0, delta0) and makes dilation and reflection exact operations.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .quadrature import weighted_interval_rule
from .special import DomainError, DunklParam

__all__ = [
    "AtomConstructionError",
    "Interval",
    "Atom",
    "AtomicRepresentation",
    "interval_measure",
    "min_vanishing_order",
    "make_atom",
    "atom_eval",
    "quasinorm_upper",
    "atom_to_json",
    "atom_from_json",
    "MOMENT_TOL",
    "GRAM_COND_MAX",
]

MOMENT_TOL = 1e-10
SUP_TOL = 1e-12
GRAM_COND_MAX = 1e12
SUP_SAMPLES = 4096


class AtomConstructionError(ArithmeticError):
    """Moment system too ill-conditioned to build the requested atom."""


@dataclass(frozen=True)
class Interval:
    x0: float
    delta0: float

    def __post_init__(self) -> None:
        x0, d0 = float(self.x0), float(self.delta0)
        if not (math.isfinite(x0) and math.isfinite(d0)):
            raise DomainError("interval parameters must be finite")
        if x0 == 0.0:
            raise DomainError("interval center must be nonzero")
        if not d0 > 0.0:
            raise DomainError(f"delta0 must be positive, got {d0}")
        if not d0 < abs(x0) / 2.0:
            raise DomainError(f"need delta0 < |x0|/2, got delta0={d0}, x0={x0}")
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "delta0", d0)

    @property
    def lo(self) -> float:
        return self.x0 - self.delta0

    @property
    def hi(self) -> float:
        return self.x0 + self.delta0

    def dilate(self, c: float) -> "Interval":
        return Interval(c * self.x0, c * self.delta0)

    def reflect(self) -> "Interval":
        return Interval(-self.x0, self.delta0)


def interval_measure(p: DunklParam, I: Interval) -> float:
    """c_lambda * int_I |x|^{2 lambda} dx (I never contains 0)."""
    e = 2.0 * p.lam + 1.0
    a, b = sorted((abs(I.lo), abs(I.hi)))
    return p.c_lambda * (b**e - a**e) / e


def _check_exponent(lam: float, p_exp: float) -> None:
    lo = 2.0 * lam / (2.0 * lam + 1.0)
    if not (lo < p_exp <= 1.0):
        raise DomainError(f"p must lie in ({lo:.6g}, 1] for lambda={lam}, got {p_exp}")


def min_vanishing_order(lam: float, p: float) -> int:
    """Smallest admissible kappa = 2 floor((2 lam + 1)(1 - p) / p)."""
    _check_exponent(lam, p)
    # guard against 1.9999999 style rounding at exact integers
    q = (2.0 * lam + 1.0) * (1.0 - p) / p
    return 2 * int(math.floor(q + 1e-12))


def _moments(lam: float, I: Interval, coeffs: np.ndarray, kmax: int):
    """(signed, absolute) weighted moments c int t^k a |t|^{2lam} dt, k = 0..kmax."""
    p = DunklParam(lam)
    rule = weighted_interval_rule(p, I.lo, I.hi, max(64, len(coeffs) + kmax + 8))
    t = rule.nodes
    a = P.polyval((t - I.x0) / I.delta0, coeffs)
    tk = t[None, :] ** np.arange(kmax + 1)[:, None]
    w = p.c_lambda * rule.weights
    return tk * a @ w, np.abs(tk * a) @ w


def _sup_abs(coeffs: np.ndarray) -> float:
    """max |poly(tau)| on [-1, 1]: dense samples plus critical points."""
    tau = np.linspace(-1.0, 1.0, SUP_SAMPLES)
    cand = [np.abs(P.polyval(tau, coeffs)).max()]
    d = P.polyder(coeffs)
    if d.size and np.any(d != 0.0):
        r = P.polyroots(d) if d.size > 1 else np.array([])
        r = r[np.abs(r.imag) < 1e-9].real
        r = r[(r >= -1.0) & (r <= 1.0)]
        if r.size:
            cand.append(np.abs(P.polyval(r, coeffs)).max())
    return float(max(cand))


@dataclass(frozen=True)
class Atom:
    """a(t) = sum coeffs[k] ((t - x0)/delta0)^k on I(x0, delta0), zero elsewhere.

    Construction validates support size, the sup bound, the vanishing
    moments up to kappa and the admissibility of (lam, p, kappa).
    """

    lam: float
    interval: Interval
    p: float
    kappa: int
    coeffs: tuple
    sup_bound: float
    moment_residual: float = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        lam, p_exp, kappa = float(self.lam), float(self.p), self.kappa
        if lam <= 0.0:
            raise DomainError("atoms need lambda > 0")
        _check_exponent(lam, p_exp)
        if int(kappa) != kappa or kappa < 0 or kappa % 2:
            raise DomainError(f"kappa must be an even nonnegative integer, got {kappa}")
        kappa = int(kappa)
        kmin = min_vanishing_order(lam, p_exp)
        if kappa < kmin:
            raise DomainError(f"kappa={kappa} below the minimum {kmin} for lambda={lam}, p={p_exp}")
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0 or not np.all(np.isfinite(c)):
            raise DomainError("coefficients must be a nonempty finite sequence")
        if not np.any(c != 0.0):
            raise DomainError("the zero function is not an atom")
        if c.size > kappa + 2:
            raise DomainError(f"degree {c.size - 1} exceeds kappa + 1 = {kappa + 1}")
        for name, v in (("lam", lam), ("p", p_exp), ("kappa", kappa),
                        ("coeffs", tuple(float(v) for v in c)), ("sup_bound", float(self.sup_bound))):
            object.__setattr__(self, name, v)

        bound = interval_measure(DunklParam(lam), self.interval) ** (-1.0 / p_exp)
        if self.sup_bound > bound * (1.0 + SUP_TOL):
            raise DomainError(f"sup_bound {self.sup_bound} exceeds |I|^(-1/p) = {bound}")
        if _sup_abs(c) > self.sup_bound * (1.0 + SUP_TOL):
            raise DomainError("polynomial exceeds its sup_bound on the interval")
        signed, absolute = _moments(lam, self.interval, c, kappa)
        rel = np.abs(signed) / absolute
        worst = float(rel.max()) if rel.size else 0.0
        if worst >= MOMENT_TOL:
            raise DomainError(f"moment condition violated: relative residual {worst:.3g}")
        object.__setattr__(self, "moment_residual", worst)

    @property
    def param(self) -> DunklParam:
        return DunklParam(self.lam)

    @property
    def support(self) -> tuple[float, float]:
        return self.interval.lo, self.interval.hi

    def __call__(self, t):
        return atom_eval(self, t)

    def dilate(self, c: float) -> "Atom":
        """Atom on I(c x0, c delta0); amplitude rescaled by c^{-(2 lam + 1)/p}."""
        if not c > 0.0:
            raise DomainError("dilation factor must be positive")
        s = c ** (-(2.0 * self.lam + 1.0) / self.p)
        return Atom(self.lam, self.interval.dilate(c), self.p, self.kappa,
                    tuple(s * v for v in self.coeffs), s * self.sup_bound)

    def reflect(self) -> "Atom":
        """t -> a(-t), supported on I(-x0, delta0)."""
        coeffs = tuple(v * (-1.0) ** k for k, v in enumerate(self.coeffs))
        return Atom(self.lam, self.interval.reflect(), self.p, self.kappa, coeffs, self.sup_bound)


def atom_eval(a: Atom, t):
    t = np.asarray(t, dtype=float)
    I = a.interval
    inside = np.abs(t - I.x0) <= I.delta0
    val = np.where(inside, P.polyval((t - I.x0) / I.delta0, np.asarray(a.coeffs)), 0.0)
    return float(val) if val.ndim == 0 else val


def make_atom(p: DunklParam, exponent_p: float, I: Interval, kappa: int | str = "auto") -> Atom:
    """Degree kappa+1 polynomial orthogonal to 1, tau, ..., tau^kappa under |t|^{2lam} on I.

    Spanning 1..tau^kappa is the same as spanning 1..t^kappa, so the moment
    conditions hold in t as well.  The result is scaled to sup |a| = |I|^{-1/p}.
    """
    p.require_positive()
    _check_exponent(p.lam, exponent_p)
    if kappa == "auto":
        kappa = min_vanishing_order(p.lam, exponent_p)
    kappa = int(kappa)
    deg = kappa + 1
    rule = weighted_interval_rule(p, I.lo, I.hi, max(64, 2 * deg + 8))
    tau = (rule.nodes - I.x0) / I.delta0
    w = rule.weights / I.delta0  # measure in tau; overall scale is irrelevant

    V = tau[None, :] ** np.arange(deg + 1)[:, None]
    gram = (V * w) @ V.T
    cond = np.linalg.cond(gram)
    if not cond < GRAM_COND_MAX:
        raise AtomConstructionError(
            f"moment Gram matrix condition {cond:.3g} exceeds {GRAM_COND_MAX:g}; "
            "use a smaller kappa or higher precision")

    # modified Gram-Schmidt with one reorthogonalization pass
    basis = []  # (coefficient vector, values at nodes), orthonormal
    for k in range(deg + 1):
        c = np.zeros(deg + 1)
        c[k] = 1.0
        v = V[k].copy()
        for _ in range(2):
            for bc, bv in basis:
                proj = np.dot(w * v, bv)
                c -= proj * bc
                v -= proj * bv
        nv = math.sqrt(np.dot(w * v, v))
        c, v = c / nv, v / nv
        basis.append((c, v))
    coeffs = basis[-1][0]

    target = interval_measure(p, I) ** (-1.0 / exponent_p)
    coeffs = coeffs * (target / _sup_abs(coeffs))
    # the sup check is relative; nudge down by rounding so it never exceeds target
    coeffs = coeffs * min(1.0, target / _sup_abs(coeffs))
    return Atom(p.lam, I, exponent_p, kappa, tuple(coeffs), target)


@dataclass(frozen=True)
class AtomicRepresentation:
    """Finite sum f = sum coef_k a_k."""

    terms: tuple = ()

    def __post_init__(self) -> None:
        terms = tuple((complex(c) if isinstance(c, complex) else float(c), a) for c, a in self.terms)
        lams = {a.lam for _, a in terms}
        if len(lams) > 1:
            raise DomainError("all atoms of a representation must share lambda")
        object.__setattr__(self, "terms", terms)

    @property
    def support(self) -> tuple[float, float]:
        if not self.terms:
            return (0.0, 0.0)
        return (min(a.support[0] for _, a in self.terms), max(a.support[1] for _, a in self.terms))

    @property
    def lam(self) -> float | None:
        return self.terms[0][1].lam if self.terms else None

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex if any(isinstance(c, complex) for c, _ in self.terms) else float)
        for c, a in self.terms:
            out = out + c * atom_eval(a, t)
        return out if out.ndim else out[()]

    def breakpoints(self) -> list[float]:
        pts = set()
        for _, a in self.terms:
            pts.update(a.support)
        return sorted(pts)


def quasinorm_upper(r: AtomicRepresentation | Sequence, p: float) -> float:
    """(sum |coef_k|^p)^{1/p} of the given representation."""
    if not 0.0 < p <= 1.0:
        raise DomainError(f"p must lie in (0, 1], got {p}")
    terms = r.terms if isinstance(r, AtomicRepresentation) else tuple(r)
    coefs = [abs(t[0] if isinstance(t, tuple) else t) for t in terms]
    return float(sum(c**p for c in coefs) ** (1.0 / p))


def atom_to_json(a: Atom) -> str:
    doc = {
        "lambda": a.lam,
        "p": a.p,
        "x0": a.interval.x0,
        "delta0": a.interval.delta0,
        "kappa": a.kappa,
        "coeffs": list(a.coeffs),
        "sup_bound": a.sup_bound,
    }
    return json.dumps(doc)


def atom_from_json(text: str) -> Atom:
    d = json.loads(text)
    return Atom(d["lambda"], Interval(d["x0"], d["delta0"]), d["p"], d["kappa"],
                tuple(d["coeffs"]), d["sup_bound"])
