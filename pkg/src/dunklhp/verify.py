"""Numerical verification harness.

Every check returns an immutable VerificationReport.  The bounds being tested
assert the existence of constants without giving values, so most reports are
stability checks: ``computed`` is the value at the reference configuration,
``envelope`` the sweep mean, and ``ratio`` = 1 + the largest relative deviation
across the sweep.  Where an explicit bound is available the envelope is that
bound.  In every case pass <=> ratio <= 1 + params["tolerance"] and the
truncation error is below 5% of |computed|.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .atoms import Atom, AtomicRepresentation, quasinorm_upper
from .kernels import half_plane_integrals, hilbert_transform
from .quadrature import focused_rule, s_integral
from .special import DomainError, DunklParam
from .transform import dunkl_transform

__all__ = [
    "VerificationReport",
    "FarFieldRegion",
    "Operator",
    "TailDivergenceError",
    "check_estimate_b",
    "check_estimate_abc_d",
    "weighted_p_integral",
    "weighted_Lp_seminorm",
    "atom_bound_report",
    "atom_bound_sweep",
    "atom_report",
    "decay_envelope",
    "decay_envelope_check",
    "far_field_grid",
    "sup_decay_exponent",
    "y_derivative_bound",
    "paley_weight_exponent",
    "paley_functional",
    "hp_sum_bound",
    "reports_to_jsonl",
    "TRUNCATION_SHARE",
]

TRUNCATION_SHARE = 0.05
DILATIONS = (0.5, 1.0, 2.0, 4.0)
GROWTH_SLOPE = 0.05


class TailDivergenceError(ArithmeticError):
    """A tail integral does not converge for the fitted decay."""


# --------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class VerificationReport:
    name: str
    computed: float
    envelope: float
    ratio: float
    truncation_error: float
    passed: bool
    params: dict = field(default_factory=dict)

    @classmethod
    def build(cls, name: str, computed: float, envelope: float, ratio: float,
              truncation_error: float, tolerance: float, params: dict | None = None,
              extra_ok: bool = True) -> "VerificationReport":
        params = dict(params or {})
        params["tolerance"] = tolerance
        finite = all(math.isfinite(v) for v in (computed, envelope, ratio, truncation_error))
        trunc_ok = truncation_error < TRUNCATION_SHARE * abs(computed) or truncation_error == 0.0
        ok = bool(finite and extra_ok and ratio <= 1.0 + tolerance and trunc_ok)
        return cls(name, float(computed), float(envelope), float(ratio),
                   float(truncation_error), ok, params)

    def to_json(self) -> str:
        return _dump({
            "name": self.name,
            "computed": self.computed,
            "envelope": self.envelope,
            "ratio": self.ratio,
            "truncation_error": self.truncation_error,
            "pass": self.passed,
            "params": self.params,
        })


def _num(v: float) -> str:
    v = float(v)
    if not math.isfinite(v):
        # callers route non-finite values to failing reports; keep the JSON valid
        return json.dumps(None)
    return format(v, ".15e")


def _dump(obj) -> str:
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_dump(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_dump(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def reports_to_jsonl(reports: Sequence[VerificationReport]) -> str:
    return "".join(r.to_json() + "\n" for r in reports)


def _stability(values: Sequence[float]) -> tuple[float, float]:
    v = np.asarray(values, dtype=float)
    mean = float(v.mean())
    if mean == 0.0:
        return mean, 1.0 if np.all(v == 0.0) else math.inf
    return mean, 1.0 + float(np.max(np.abs(v / mean - 1.0)))


# --------------------------------------------------------------------------
# regions and operators


@dataclass(frozen=True)
class FarFieldRegion:
    """Complement of I(x0, 4 delta0) and I(-x0, 4 delta0)."""

    x0: float
    delta0: float

    def __post_init__(self) -> None:
        if not self.delta0 > 0.0:
            raise DomainError("delta0 must be positive")

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        r = 4.0 * self.delta0
        return (np.abs(x - self.x0) >= r) & (np.abs(x + self.x0) >= r)

    def breakpoints(self) -> list[float]:
        r = 4.0 * self.delta0
        a = abs(self.x0)
        return sorted({a - r, a + r, -a - r, -a + r})

    @classmethod
    def of(cls, a: Atom) -> "FarFieldRegion":
        return cls(a.interval.x0, a.interval.delta0)


@dataclass(frozen=True)
class Operator:
    """hilbert, poisson(y), conj_poisson(y) or analytic(y) = P + iQ."""

    kind: str
    y: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("hilbert", "poisson", "conj_poisson", "analytic"):
            raise DomainError(f"unknown operator {self.kind!r}")
        if self.kind == "hilbert":
            if self.y is not None:
                raise DomainError("the Hilbert transform takes no y")
        elif self.y is None or not self.y > 0.0:
            raise DomainError(f"{self.kind} needs y > 0")

    @classmethod
    def parse(cls, text: str) -> "Operator":
        text = text.strip()
        if "(" in text:
            kind, rest = text.split("(", 1)
            return cls(kind.strip(), float(rest.rstrip(")")))
        return cls(text)

    def label(self) -> str:
        return self.kind if self.y is None else f"{self.kind}({self.y:g})"

    def dilate(self, c: float) -> "Operator":
        return self if self.y is None else Operator(self.kind, c * self.y)

    def apply(self, f, p: DunklParam, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if self.kind == "hilbert":
            return hilbert_transform(f, p, x)
        P, Q = half_plane_integrals(f, p, x, self.y)
        if self.kind == "poisson":
            return P
        if self.kind == "conj_poisson":
            return Q
        return P + 1j * Q


def _as_operator(op) -> Operator:
    return op if isinstance(op, Operator) else Operator.parse(str(op))


def _param_of(f) -> DunklParam:
    lam = f.lam
    if lam is None:
        raise DomainError("empty representation has no lambda")
    return DunklParam(lam)


# --------------------------------------------------------------------------
# Prop-type elementary estimates


def check_estimate_b(k: float, region: FarFieldRegion, R: float | None = None,
                     sweep: Sequence[float] = (1.0, 0.5, 0.25, 0.125)) -> VerificationReport:
    """int over the far-field region of ||x| - |x0||^{-k} dx against C delta0^{1-k}.

    The region sits inside { ||x| - |x0|| >= 4 delta0 }, four half-lines in
    r = ||x| - |x0||, so C = 4 * 4^{1-k} / (k - 1) is an explicit admissible
    constant.  The integral is computed on [-R, R] and the tail added in
    closed form; C is also fitted over a delta0 sweep at fixed x0.
    """
    if not k > 1.0:
        raise DomainError(f"estimate needs k > 1, got {k}")
    x0 = abs(region.x0)

    def integral(d0: float, n: int) -> tuple[float, float]:
        Rr = R if R is not None else x0 + 64.0 * 4.0 * d0
        total = 0.0
        # x > 0 part, doubled by symmetry of the region and integrand
        pieces = []
        left_lo, left_hi = max(0.0, 4.0 * d0 - x0), x0 - 4.0 * d0
        if left_hi > left_lo:
            pieces.append((left_lo, left_hi, left_hi))
        pieces.append((x0 + 4.0 * d0, Rr, x0 + 4.0 * d0))
        for lo, hi, focus in pieces:
            t, w = focused_rule(lo, hi, [(focus, 0.25 * d0)], n)
            total += np.dot(w, np.abs(t - x0) ** (-k))
        tail = (Rr - x0) ** (1.0 - k) / (k - 1.0)
        return 2.0 * (total + tail), 2.0 * tail

    d_ref = region.delta0
    vals, errs = [], []
    for s in sweep:
        v1, _ = integral(d_ref * s, 16)
        v2, _ = integral(d_ref * s, 32)
        vals.append(v2)
        errs.append(abs(v2 - v1))
    C_explicit = 4.0 * 4.0 ** (1.0 - k) / (k - 1.0)
    fitted = [v * (d_ref * s) ** (k - 1.0) for v, s in zip(vals, sweep)]
    computed = vals[0]
    envelope = C_explicit * d_ref ** (1.0 - k)
    ratio = max(fitted) / C_explicit
    return VerificationReport.build(
        "estimate_b", computed, envelope, ratio, errs[0], 0.0,
        {"k": k, "x0": region.x0, "delta0": d_ref, "fitted_C": max(fitted),
         "explicit_C": C_explicit, "sweep_scaled": fitted})


def _estimate_integrand(variant: str, lam: float):
    """(measure parameter, keyword arguments) for s_integral."""
    if variant == "a":
        return lam, dict(sigma=1.0)
    if variant == "c":
        return lam, dict(sigma=-1.0)
    if variant == "d":
        # (1-s^2)^{lam-1/2} is the measure of parameter lam + 1/2 with N = 1
        return lam + 0.5, dict(sigma=0.0, m=lam + 1.0)
    raise DomainError(f"variant must be a, c or d, got {variant!r}")


def estimate_integral(variant: str, lam: float, b, n: int = 24) -> np.ndarray:
    """J(b) = int N(s) (1-s^2)^{lam-1} (1 - b s)^{-lam-1} ds for variant a, c or d.

    N is 1 + s, 1 - s or (1 - s^2)^{1/2} respectively.
    """
    b = np.asarray(b, dtype=float)
    if np.any(np.abs(b) >= 1.0):
        raise DomainError("b must lie in (-1, 1)")
    mu, kw = _estimate_integrand(variant, lam)
    return s_integral(mu, np.ones_like(b), b, 1.0 - np.abs(b), n=n, **kw)


def default_b_grid(min_gap: float = 1e-4, count: int = 40) -> np.ndarray:
    gaps = np.geomspace(min_gap, 1.0, count)
    return np.unique(np.concatenate([-(1.0 - gaps), 1.0 - gaps]))


def check_estimate_abc_d(variant: str, p: DunklParam, b_grid=None,
                         factor: float = 3.0) -> VerificationReport:
    """sup_b J(b)(1 - |b|) against the reference constant.

    Reference: 1/lambda for variants a and c, 2/(2 lambda + 1) for d.
    ratio = max(C/ref, ref/C); pass needs ratio <= factor and J increasing
    in |b| on the half where the factor (1 - b s)^{-lam-1} favours the
    heavier end (b >= 0, or b <= 0 for variant c).
    """
    p.require_positive()
    b = default_b_grid() if b_grid is None else np.asarray(b_grid, dtype=float)
    if np.any(np.abs(b) >= 1.0):
        raise DomainError("b_grid must lie in (-1, 1)")
    J = estimate_integral(variant, p.lam, b)
    J2 = estimate_integral(variant, p.lam, b, n=48)
    scaled = J2 * (1.0 - np.abs(b))
    C = float(scaled.max())
    i = int(np.argmax(scaled))
    trunc = float(abs(J2[i] - J[i]) * (1.0 - abs(b[i])))
    ref = 2.0 / (2.0 * p.lam + 1.0) if variant == "d" else 1.0 / p.lam
    # variant c is variant a mirrored in b, so its monotone half is b <= 0
    side = b <= 0.0 if variant == "c" else b >= 0.0
    order = np.argsort(np.abs(b[side]))
    Js = J2[side][order]
    monotone = bool(np.all(np.diff(Js) >= -1e-12 * Js[1:]))
    ratio = max(C / ref, ref / C)
    return VerificationReport.build(
        f"estimate_{variant}", C, ref, ratio, trunc, factor - 1.0,
        {"variant": variant, "lambda": p.lam, "b_at_sup": float(b[i]),
         "min_gap": float((1.0 - np.abs(b)).min()), "monotone": monotone},
        extra_ok=monotone)


# --------------------------------------------------------------------------
# weighted p-integrals over the line


def _support_edges(f) -> list[float]:
    if hasattr(f, "breakpoints"):
        return list(f.breakpoints())
    return list(f.support)


def _line_rule(f, R: float, lam: float, h_edge: float, scale: float, n: int = 16):
    """x-rule on [-R, R] for |x|^{2 lam} dx, graded at support edges and mirrors."""
    edges = _support_edges(f)
    foci = []
    for e in edges:
        foci.append((e, h_edge))
        foci.append((-e, h_edge))
    if isinstance(f, Atom):
        for b in FarFieldRegion.of(f).breakpoints():
            foci.append((b, scale))
    return focused_rule(-R, R, foci, n, lam)


def _tail_fit(g: Callable, R: float, p_exp: float, lam: float, tail_order: float | None):
    """Both-side tail c_lambda int_{|x|>R} |g|^p |x|^{2lam}, assuming |g| ~ C |x|^{-q}."""
    xs = np.array([-2.0 * R, -R, R, 2.0 * R])
    v = np.abs(np.atleast_1d(g(xs)))
    if tail_order is None:
        with np.errstate(divide="ignore"):
            qs = [math.log(v[1] / v[0]) / math.log(2.0) if v[0] > 0 and v[1] > 0 else math.inf,
                  math.log(v[2] / v[3]) / math.log(2.0) if v[2] > 0 and v[3] > 0 else math.inf]
        q = min(qs)
    else:
        q = float(tail_order)
    expo = q * p_exp - 2.0 * lam
    if not expo > 1.0:
        raise TailDivergenceError(
            f"tail not integrable: decay order q={q:.4g} violates q*p - 2*lambda > 1 "
            f"(p={p_exp}, lambda={lam})")
    amp = max(v[1], v[2])
    return (2.0 * amp**p_exp * R ** (2.0 * lam + 1.0) / (expo - 1.0)), q


def weighted_p_integral(g: Callable, p_exp: float, dp: DunklParam, nodes, weights,
                        R: float, tail_order: float | None = None) -> tuple[float, float, float]:
    """c_lambda int |g|^p |x|^{2lam}: (value including tail, tail, fitted q).

    ``weights`` already carry |x|^{2 lam}; the tail beyond |x| = R is modelled
    as C |x|^{-q}.
    """
    vals = np.abs(np.atleast_1d(g(nodes))) ** p_exp
    core = dp.c_lambda * float(np.dot(weights, vals))
    tail, q = _tail_fit(g, R, p_exp, dp.lam, tail_order)
    tail *= dp.c_lambda
    return core + tail, tail, q


def weighted_Lp_seminorm(g: Callable, p_exp: float, dp: DunklParam, region=None,
                         R: float = 64.0, tail_order: float | None = None,
                         breaks: Sequence[float] = (), n: int = 16) -> tuple[float, float]:
    """(c_lambda int_region |g|^p |x|^{2lam} dx)^{1/p} and a bound on the tail's share.

    ``region`` is None (the line), a (lo, hi) pair, or a FarFieldRegion.
    For unbounded regions the part beyond |x| = R uses |g| ~ C|x|^{-tail_order};
    ``tail_order`` None fits it from g at R and 2R.
    """
    if not p_exp > 0.0:
        raise DomainError("p must be positive")
    pts = sorted({-R, R, *[b for b in breaks if -R < b < R]})
    if isinstance(region, tuple):
        lo, hi = (float(v) for v in region)
        t, w = focused_rule(lo, hi, [(b, (hi - lo) / 64.0) for b in breaks], n, dp.lam)
        val = dp.c_lambda * float(np.dot(w, np.abs(g(t)) ** p_exp))
        return val ** (1.0 / p_exp), 0.0
    foci = [(b, R / 256.0) for b in pts]
    mask = None
    if isinstance(region, FarFieldRegion):
        foci += [(b, region.delta0) for b in region.breakpoints()]
        mask = region.contains
    t, w = focused_rule(-R, R, foci, n, dp.lam)
    gv = np.abs(np.atleast_1d(g(t))) ** p_exp
    if mask is not None:
        gv = np.where(mask(t), gv, 0.0)
    core = dp.c_lambda * float(np.dot(w, gv))
    tail, _ = _tail_fit(g, R, p_exp, dp.lam, tail_order)
    tail *= dp.c_lambda
    total = core + tail
    return total ** (1.0 / p_exp), total ** (1.0 / p_exp) - core ** (1.0 / p_exp)


def _edge_width(f, op: Operator, scale: float) -> float:
    # log-type edge behaviour for the boundary operator, width ~y otherwise
    if op.y is None:
        return 1e-4 * scale
    return max(1e-4 * scale, min(op.y, scale) / 8.0)


def operator_p_integral(f, op: Operator, p_exp: float, R_factor: float = 64.0,
                        n: int = 16) -> tuple[float, float, float]:
    """c_lambda int |T f|^p |x|^{2lam} dx over the line: (value, tail, q)."""
    dp = _param_of(f)
    lo, hi = f.support
    reach = max(abs(lo), abs(hi))
    scale = _scale_of(f)
    R = R_factor * reach + (4.0 * op.y if op.y else 0.0)
    t, w = _line_rule(f, R, dp.lam, _edge_width(f, op, scale), scale, n)
    return weighted_p_integral(lambda x: op.apply(f, dp, x), p_exp, dp, t, w, R)


def _scale_of(f) -> float:
    if isinstance(f, Atom):
        return f.interval.delta0
    if isinstance(f, AtomicRepresentation) and f.terms:
        return min(a.interval.delta0 for _, a in f.terms)
    lo, hi = f.support
    return 0.5 * (hi - lo)


def atom_bound_report(a: Atom, operator, R: float = 64.0,
                      dilations: Sequence[float] = DILATIONS, tolerance: float = 0.10,
                      covariant_y: bool = False) -> VerificationReport:
    """Weighted p-integral of T a and its stability across dilations of the atom.

    With ``covariant_y`` the Poisson height is dilated together with the atom;
    otherwise y stays at the operator's value.  ``R`` is the cutoff in units
    of max|supp a|.
    """
    op = _as_operator(operator)
    values, tails, qs = [], [], []
    for c in dilations:
        ac = a if c == 1.0 else a.dilate(c)
        opc = op.dilate(c) if covariant_y else op
        v, tail, q = operator_p_integral(ac, opc, a.p, R)
        values.append(v)
        tails.append(tail)
        qs.append(q)
    ref = values[list(dilations).index(1.0)] if 1.0 in dilations else values[0]
    tail_ref = tails[list(dilations).index(1.0)] if 1.0 in dilations else tails[0]
    mean, ratio = _stability(values)
    return VerificationReport.build(
        f"atom_bound[{op.label()}]", ref, mean, ratio, tail_ref, tolerance,
        {"lambda": a.lam, "p": a.p, "kappa": a.kappa, "x0": a.interval.x0,
         "delta0": a.interval.delta0, "dilations": list(dilations), "values": values,
         "covariant_y": covariant_y, "tail_order": min(qs), "R_factor": R})


def atom_bound_sweep(a: Atom, kind: str, y_grid=(0.01, 0.1, 1.0, 10.0), R: float = 64.0,
                     dilations: Sequence[float] = DILATIONS,
                     tolerance: float = 0.10) -> VerificationReport:
    """Poisson-type bound checked jointly over dilations and the y grid.

    One weighted p-integral per (c, y) pair with y held fixed while the atom
    is dilated; the spread is taken over all pairs.  computed is the value
    at c = 1 and the first y.
    """
    if kind not in ("poisson", "conj_poisson"):
        raise DomainError("kind must be poisson or conj_poisson")
    ys = [float(v) for v in y_grid]
    if not ys or min(ys) <= 0.0:
        raise DomainError("y_grid must be nonempty and positive")
    table, tails = {}, []
    for c in dilations:
        ac = a if c == 1.0 else a.dilate(c)
        row = []
        for y in ys:
            v, tail, _ = operator_p_integral(ac, Operator(kind, y), a.p, R)
            row.append(v)
            tails.append(tail)
        table[f"c={c:g}"] = row
    values = [v for row in table.values() for v in row]
    ref_row = table["c=1"] if "c=1" in table else next(iter(table.values()))
    mean, ratio = _stability(values)
    return VerificationReport.build(
        f"atom_bound_sweep[{kind}]", ref_row[0], mean, ratio, max(tails), tolerance,
        {"lambda": a.lam, "p": a.p, "kappa": a.kappa, "x0": a.interval.x0,
         "delta0": a.interval.delta0, "y_grid": ys, "values": table, "R_factor": R})


def atom_report(a: Atom) -> VerificationReport:
    """Construction check: sup |a| against |I|^{-1/p} and the moment residual."""
    from .atoms import _sup_abs, interval_measure

    target = interval_measure(a.param, a.interval) ** (-1.0 / a.p)
    sup = _sup_abs(np.asarray(a.coeffs))
    ratio = max(sup / target, target / sup)
    return VerificationReport.build(
        "atom", sup, target, ratio, a.moment_residual * sup, 1e-12,
        {"lambda": a.lam, "p": a.p, "kappa": a.kappa, "x0": a.interval.x0,
         "delta0": a.interval.delta0, "moment_residual": a.moment_residual},
        extra_ok=a.moment_residual < 1e-10)


# --------------------------------------------------------------------------
# decay envelopes


def decay_envelope(a: Atom, x) -> np.ndarray:
    """|I|^{1-1/p} delta0^{n+1} / (||x|-|x0||^{n+2} (|x|+|x0|)^{2 lam}), n = kappa/2."""
    from .atoms import interval_measure

    x = np.asarray(x, dtype=float)
    n = a.kappa // 2
    I = a.interval
    m = interval_measure(a.param, I) ** (1.0 - 1.0 / a.p)
    ax = np.abs(x)
    return m * I.delta0 ** (n + 1) / (np.abs(ax - abs(I.x0)) ** (n + 2) * (ax + abs(I.x0)) ** (2.0 * a.lam))


def far_field_grid(a: Atom, count: int = 24, reach: float = 64.0) -> np.ndarray:
    """Far-field points in both proof regions: [-2|x0|, 0] and its complement.

    Geometric in the distance from the nearest 4-dilated interval, up to
    reach * |x0|.
    """
    x0, d0 = abs(a.interval.x0), a.interval.delta0
    s = math.copysign(1.0, a.interval.x0)
    pts = []
    # mirror side x in [-2 x0, 0]: -x0 + 4d0 .. 0 and -2x0 .. -x0 - 4d0
    if x0 - 4.0 * d0 > 0.0:
        pts += list(np.linspace(-(x0 - 4.0 * d0), 0.0, count // 4 + 2)[:-1])
        pts += list(np.linspace(0.0, x0 - 4.0 * d0, count // 4 + 2)[1:-1])
    if x0 - 4.0 * d0 > 0.0:
        pts += list(-x0 - 4.0 * d0 - np.geomspace(1e-3 * d0, x0 - 4.0 * d0, count // 4))
    else:
        pts += list(-(x0 + 4.0 * d0) - np.geomspace(d0 / 8.0, x0, count // 4))
    pts = [p for p in pts if p >= -2.0 * x0]
    # complement: right of x0 + 4 d0 and left of -2 x0
    pts += list(x0 + 4.0 * d0 + np.geomspace(d0 / 8.0, reach * x0, count // 2))
    pts += list(-2.0 * x0 - np.geomspace(d0 / 8.0, reach * x0, count // 4))
    pts = np.array(sorted(set(pts))) * s
    region = FarFieldRegion.of(a)
    return pts[region.contains(pts)]


def decay_envelope_check(a: Atom, operator, x_grid=None, dilations: Sequence[float] = DILATIONS,
                         spread: float = 3.0) -> VerificationReport:
    """max |T a| / envelope over far-field points, split by proof region.

    computed = max ratio over the grid (the fitted constant); ratio = the
    max/min spread of the per-region constants across both regions and the
    dilation sweep (y dilates with the atom); pass needs spread <= ``spread``
    and a local log-log slope of the ratio <= 0.05 between 2x and 4x the
    outermost grid point on each side (beyond the 1/|x| approach to the
    asymptote).
    """
    op = _as_operator(operator)
    x = far_field_grid(a) if x_grid is None else np.asarray(x_grid, dtype=float)
    region = FarFieldRegion.of(a)
    if not np.all(region.contains(x)):
        raise DomainError("x_grid must lie in the far-field region")
    x0 = abs(a.interval.x0)
    case1 = (x * math.copysign(1.0, a.interval.x0) <= 0.0) & (np.abs(x) <= 2.0 * x0)
    if not (case1.any() and (~case1).any()):
        raise DomainError("x_grid must contain points of both proof regions")
    consts, growth, detail = [], [], {}
    for c in dilations:
        ac = a if c == 1.0 else a.dilate(c)
        r = np.abs(op.dilate(c).apply(ac, ac.param, c * x)) / decay_envelope(ac, c * x)
        c1, c2 = float(r[case1].max()), float(r[~case1].max())
        consts += [c1, c2]
        # growth: local log-log slope of the ratio at the far end of each side
        far = []
        for side in (x > 0.0, x < 0.0):
            xs = x[side & ~case1]
            if xs.size:
                far.append(xs[np.argmax(np.abs(xs))])
        far = 2.0 * c * np.array(far)
        ends = np.concatenate([far, 2.0 * far])
        re = np.abs(op.dilate(c).apply(ac, ac.param, ends)) / decay_envelope(ac, ends)
        m = far.size
        growth.append(float(np.max(np.log(re[m:] / re[:m]) / math.log(2.0))))
        detail[f"c={c:g}"] = {"mirror_region": c1, "complement": c2}
    computed = max(consts)
    ratio = max(consts) / min(consts)
    no_growth = all(g <= GROWTH_SLOPE for g in growth)
    return VerificationReport.build(
        f"decay_envelope[{op.label()}]", computed, min(consts), ratio, 0.0, spread - 1.0,
        {"lambda": a.lam, "p": a.p, "kappa": a.kappa, "x0": a.interval.x0,
         "delta0": a.interval.delta0, "regions": detail, "far_slopes": growth,
         "points": int(x.size)},
        extra_ok=no_growth)


# --------------------------------------------------------------------------
# half-plane growth exponents


def _sup_abs_F(f, dp: DunklParam, y: float, n_grid: int = 161) -> float:
    lo, hi = f.support
    reach = max(abs(lo), abs(hi))
    X = 2.0 * reach + 4.0 * y
    xs = np.linspace(-X, X, n_grid)
    P, Q = half_plane_integrals(f, dp, xs, y)
    mag = np.hypot(P, Q)
    i = int(np.argmax(mag))
    h = xs[1] - xs[0]
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]

    def neg(x):
        P1, Q1 = half_plane_integrals(f, dp, x, y)
        return -math.hypot(P1, Q1)

    res = minimize_scalar(neg, bounds=(a, b), method="bounded", options={"xatol": 1e-4 * h})
    return max(float(mag[i]), -float(res.fun))


def sup_decay_exponent(f, y_grid=None, p_exp: float | None = None,
                       margin: float = 0.05) -> VerificationReport:
    """Slope of log sup_x |Pf + iQf|(x, y) against log y.

    Pass: slope <= -(1/p)(1 + 2 lam) + margin, i.e. decay at least as fast
    as the claimed rate.  ratio = claim/slope with tolerance chosen so the
    two statements coincide.
    """
    dp = _param_of(f)
    p_exp = f.p if p_exp is None and isinstance(f, Atom) else p_exp
    if p_exp is None:
        raise DomainError("p is required for representations")
    lo, hi = f.support
    diam = hi - lo
    if y_grid is None:
        y_grid = np.geomspace(10.0 * max(abs(lo), abs(hi)), 1000.0 * max(abs(lo), abs(hi)), 7)
    y = np.asarray(y_grid, dtype=float)
    if y.size < 3 or y.min() <= 0.0 or y.max() / max(y.min(), diam) < 100.0 or y.min() < diam:
        raise DomainError("y_grid must span at least two decades above diam(supp f)")
    sups = np.array([_sup_abs_F(f, dp, float(v)) for v in y])
    A = np.vstack([np.log(y), np.ones_like(y)]).T
    coef, res, *_ = np.linalg.lstsq(A, np.log(sups), rcond=None)
    slope = float(coef[0])
    resid = np.log(sups) - A @ coef
    se = float(math.sqrt(np.sum(resid**2) / max(y.size - 2, 1) / np.sum((np.log(y) - np.log(y).mean()) ** 2)))
    claim = -(1.0 / p_exp) * (1.0 + 2.0 * dp.lam)
    tol = margin / (abs(claim) - margin)
    ratio = claim / slope if slope < 0.0 else math.inf
    return VerificationReport.build(
        "sup_decay_exponent", slope, claim, ratio, se, tol,
        {"lambda": dp.lam, "p": p_exp, "y_grid": list(y), "sup_values": list(sups), "margin": margin})


def y_derivative_bound(f, y_grid=(0.5, 1.0, 2.0, 4.0), p_exp: float | None = None,
                       variant: str = "poisson", tolerance: float = 0.25,
                       step_ratio: float = 0.01, R_factor: float = 64.0) -> VerificationReport:
    """(c int |d_y T f|^p |x|^{2lam})^{1/p} * y across the y grid.

    T is the Poisson (or conjugate Poisson) integral; d_y by central
    differences with step y * step_ratio.  truncation_error combines the
    x-tail and the change under halving the step.
    """
    dp = _param_of(f)
    p_exp = f.p if p_exp is None and isinstance(f, Atom) else p_exp
    if p_exp is None:
        raise DomainError("p is required for representations")
    if variant not in ("poisson", "conj_poisson"):
        raise DomainError("variant must be poisson or conj_poisson")
    idx = 0 if variant == "poisson" else 1
    y = np.asarray(y_grid, dtype=float)
    if np.any(y <= 0.0):
        raise DomainError("y_grid must be positive")
    lo, hi = f.support
    reach = max(abs(lo), abs(hi))
    scale = _scale_of(f)

    def norm_at(yv: float, h: float) -> tuple[float, float]:
        if not (0.0 < h < yv):
            raise DomainError("finite-difference step collides with y")
        R = R_factor * reach + 4.0 * yv

        def g(x):
            up = half_plane_integrals(f, dp, x, yv + h)[idx]
            dn = half_plane_integrals(f, dp, x, yv - h)[idx]
            return (np.asarray(up) - np.asarray(dn)) / (2.0 * h)

        t, w = _line_rule(f, R, dp.lam, max(1e-4 * scale, min(yv, scale) / 8.0), scale)
        v, tail, _ = weighted_p_integral(g, p_exp, dp, t, w, R)
        return v ** (1.0 / p_exp), tail

    scaled, errs = [], []
    for yv in y:
        n1, tail = norm_at(float(yv), step_ratio * yv)
        n2, _ = norm_at(float(yv), 0.5 * step_ratio * yv)
        scaled.append(n2 * yv)
        errs.append(abs(n2 - n1) * yv + tail ** (1.0 / p_exp) * yv if tail > 0 else abs(n2 - n1) * yv)
    mean, ratio = _stability(scaled)
    return VerificationReport.build(
        f"y_derivative[{variant}]", scaled[0], mean, ratio, max(errs), tolerance,
        {"lambda": dp.lam, "p": p_exp, "y_grid": list(y), "norm_times_y": scaled,
         "step_ratio": step_ratio})


# --------------------------------------------------------------------------
# Paley functional


def paley_weight_exponent(lam: float, p: float, k: float) -> float:
    return (2.0 * lam + 1.0) * (k - 1.0 - k / p) + 2.0 * lam


def _check_paley_range(lam: float, p: float, k: float) -> None:
    lo = 2.0 * lam / (2.0 * lam + 1.0)
    if not (lo < p <= 1.0):
        raise DomainError(f"p must lie in ({lo:.6g}, 1] for lambda={lam}, got {p}")
    if not k >= p:
        raise DomainError(f"k must be >= p, got k={k}, p={p}")


def paley_lhs(r: AtomicRepresentation, dp: DunklParam, p_exp: float, k: float,
              xi_window=(1e-8, 1e3), count: int = 2560) -> dict:
    """int_0^inf |F f(xi)|^k xi^w dxi on a geometric grid plus fitted end tails."""
    _check_paley_range(dp.lam, p_exp, k)
    lo, hi = xi_window
    if not 0.0 < lo < hi:
        raise DomainError("xi window must satisfy 0 < lo < hi")
    w_exp = paley_weight_exponent(dp.lam, p_exp, k)
    xi = np.geomspace(lo, hi, count)
    F = dunkl_transform(r, dp, xi)
    amp = np.abs(F.values)
    integrand = amp**k * xi**w_exp
    logxi = np.log(xi)
    core = float(np.trapezoid(integrand * xi, logxi))

    # small xi: |F| ~ C xi^s
    m0 = xi <= lo * 10.0
    s0 = float(np.polyfit(logxi[m0], np.log(np.maximum(amp[m0], 1e-300)), 1)[0])
    e0 = k * s0 + w_exp + 1.0
    if not e0 > 0.0:
        raise TailDivergenceError(
            f"xi -> 0 tail diverges: |F| ~ xi^{s0:.3g} against weight xi^{w_exp:.3g}")
    tail0 = float(integrand[0] * xi[0] / e0)

    # large xi: power-law fit of the running maxima over the last decade
    m1 = xi >= hi / 10.0
    chunks = np.array_split(np.flatnonzero(m1), 8)
    cx = np.array([xi[c].mean() for c in chunks])
    cm = np.array([integrand[c].max() for c in chunks])
    s1 = float(np.polyfit(np.log(cx), np.log(np.maximum(cm, 1e-300)), 1)[0])
    if not s1 < -1.0:
        raise TailDivergenceError(f"xi -> inf tail diverges: integrand ~ xi^{s1:.3g}")
    tail1 = float(cm[-1] * cx[-1] / (-s1 - 1.0))
    return {"value": core + tail0 + tail1, "core": core, "tail0": tail0, "tail1": tail1,
            "small_xi_slope": s0, "large_xi_slope": s1, "weight_exponent": w_exp,
            "converged": F.converged}


def paley_functional(r: AtomicRepresentation, dp: DunklParam, p_exp: float, k: float,
                     xi_window=(1e-8, 1e3), dilations: Sequence[float] = DILATIONS,
                     tolerance: float = 0.15, count: int = 2560) -> VerificationReport:
    """LHS / RHS with RHS = quasinorm_upper(r, p)^p, and its stability under dilation.

    Also requires the small-xi slope of |F f| to be at least kappa + 1 - 0.1
    for the smallest kappa in the representation.
    """
    _check_paley_range(dp.lam, p_exp, k)
    if not r.terms:
        raise DomainError("empty representation")
    rhs = quasinorm_upper(r, p_exp) ** p_exp
    ratios, slopes, tails = [], [], []
    for c in dilations:
        rc = r if c == 1.0 else AtomicRepresentation(tuple((co, a.dilate(c)) for co, a in r.terms))
        info = paley_lhs(rc, dp, p_exp, k, xi_window, count)
        ratios.append(info["value"] / rhs)
        slopes.append(info["small_xi_slope"])
        tails.append(info["tail0"] + info["tail1"])
        if c == 1.0:
            ref_info = info
    kappa = min(a.kappa for _, a in r.terms)
    slope_ok = min(slopes) >= kappa + 1 - 0.1
    ref = ratios[list(dilations).index(1.0)] if 1.0 in dilations else ratios[0]
    ref_tail = tails[list(dilations).index(1.0)] if 1.0 in dilations else tails[0]
    mean, spread = _stability(ratios)
    return VerificationReport.build(
        "paley", ref, mean, spread, ref_tail / rhs, tolerance,
        {"lambda": dp.lam, "p": p_exp, "k": k, "weight_exponent": paley_weight_exponent(dp.lam, p_exp, k),
         "rhs": rhs, "ratios": ratios, "small_xi_slopes": slopes, "kappa": kappa,
         "slope_ok": slope_ok, "terms": len(r.terms), "xi_window": list(xi_window)},
        extra_ok=slope_ok)


# --------------------------------------------------------------------------
# H^p sum bound


def hp_sum_bound(r: AtomicRepresentation, y_grid=(0.01, 0.1, 1.0, 10.0), p_exp: float | None = None,
                 bound: float | None = None, R_factor: float = 64.0) -> VerificationReport:
    """sup_y c int |Pf + iQf|^p |x|^{2lam} dx against quasinorm_upper(r, p)^p.

    ratio = LHS / (bound * RHS) where ``bound`` is the constant under test
    (default: the largest single-atom LHS in the representation, which makes
    the check a quasi-triangle inequality).
    """
    if not r.terms:
        return VerificationReport.build("hp_sum", 0.0, 0.0, 1.0, 0.0, 0.0, {"terms": 0})
    p_exp = r.terms[0][1].p if p_exp is None else p_exp
    if not 0.0 < p_exp <= 1.0:
        raise DomainError("p must lie in (0, 1]")
    rhs = quasinorm_upper(r, p_exp) ** p_exp

    def sup_lhs(f) -> tuple[float, float]:
        best, err = 0.0, 0.0
        for y in y_grid:
            v, tail, _ = operator_p_integral(f, Operator("analytic", float(y)), p_exp, R_factor)
            if v > best:
                best, err = v, tail
        return best, err

    lhs, err = sup_lhs(r)
    if bound is None:
        singles = [sup_lhs(AtomicRepresentation(((1.0, a),)))[0] for _, a in r.terms]
        bound = max(singles)
    ratio = lhs / (bound * rhs)
    return VerificationReport.build(
        "hp_sum", lhs, bound * rhs, ratio, err, 1e-6,
        {"p": p_exp, "rhs": rhs, "constant": bound, "y_grid": list(y_grid), "terms": len(r.terms)})
