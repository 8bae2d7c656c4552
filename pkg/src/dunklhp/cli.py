"""Command-line front end.

    dunklhp eval {kernel-h,kernel-p,kernel-q,dunkl-kernel,transform} [options]
    dunklhp atom [options]
    dunklhp verify [--suite {estimates,atoms,decay,paley,all}] [options]

A run is described by one JSON document (``--config``); the flags
``--lambda --p --kappa --seed`` override its top-level keys.  Exit codes:
0 success, 1 verification failures, 2 invalid configuration, 3 numeric
failure.
"""

from __future__ import annotations

import argparse
import copy
import csv
import dataclasses
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import verify as V
from .atoms import (Atom, AtomicRepresentation, Interval, atom_to_json, make_atom,
                    min_vanishing_order)
from .kernels import conj_poisson_kernel, hilbert_kernel, poisson_kernel
from .special import DomainError, DunklParam, dunkl_kernel
from .transform import GridFunction, dunkl_transform

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

SUBJECTS = ("kernel-h", "kernel-p", "kernel-q", "dunkl-kernel", "transform")
SUITES = ("estimates", "atoms", "decay", "paley", "all")
PROFILES = ("gaussian", "atom")

DEFAULTS = {
    "lambda": 1.0,
    "p": 1.0,
    "kappa": "auto",
    "x0": 2.0,
    "delta0": 0.25,
    "seed": 0,
    "profile": "gaussian",
    "grids": {
        "x": {"kind": "linear", "lo": -3.5, "hi": 3.5, "count": 8},
        "t": {"kind": "linear", "lo": -3.0, "hi": 3.0, "count": 7},
        "y": {"kind": "geometric", "lo": 0.1, "hi": 10.0, "count": 3},
        "xi": {"kind": "linear", "lo": 0.0, "hi": 4.0, "count": 41},
        "z": {"kind": "linear", "lo": 0.0, "hi": 5.0, "count": 64},
        "y_sweep": {"kind": "geometric", "lo": 0.01, "hi": 10.0, "count": 4},
    },
    "tolerances": {
        "atom_bound": 0.10,
        "decay_spread": 3.0,
        "exponent_margin": 0.05,
        "y_derivative": 0.25,
        "estimate_factor": 3.0,
        "paley": 0.15,
    },
}


class ConfigError(ValueError):
    pass


def _grid(spec, name: str) -> np.ndarray:
    if isinstance(spec, list):
        vals = np.asarray(spec, dtype=float)
    elif isinstance(spec, dict):
        unknown = set(spec) - {"kind", "lo", "hi", "count"}
        if unknown:
            raise ConfigError(f"grid {name}: unknown keys {sorted(unknown)}")
        try:
            kind, lo, hi, count = spec["kind"], float(spec["lo"]), float(spec["hi"]), int(spec["count"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"grid {name}: needs kind, lo, hi, count ({exc})") from None
        if count < 1:
            raise ConfigError(f"grid {name}: count must be >= 1")
        if kind == "linear":
            vals = np.linspace(lo, hi, count)
        elif kind == "geometric":
            if lo <= 0.0 or hi <= 0.0:
                raise ConfigError(f"grid {name}: geometric grids need lo, hi > 0")
            vals = np.geomspace(lo, hi, count)
        else:
            raise ConfigError(f"grid {name}: kind must be linear or geometric")
    else:
        raise ConfigError(f"grid {name}: expected an object or a list")
    if vals.ndim != 1 or vals.size == 0 or not np.all(np.isfinite(vals)):
        raise ConfigError(f"grid {name}: values must be finite")
    return vals


@dataclass(frozen=True)
class RunConfig:
    lam: float
    p: float
    kappa: int | str
    x0: float
    delta0: float
    seed: int
    profile: str
    grids: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        unknown = set(raw) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        merged = copy.deepcopy(DEFAULTS)
        for key, val in raw.items():
            if key in ("grids", "tolerances"):
                if not isinstance(val, dict):
                    raise ConfigError(f"{key} must be an object")
                extra = set(val) - set(DEFAULTS[key])
                if extra:
                    raise ConfigError(f"unknown {key} entries {sorted(extra)}")
                merged[key].update(val)
            else:
                merged[key] = val
        try:
            lam, p = float(merged["lambda"]), float(merged["p"])
            x0, d0 = float(merged["x0"]), float(merged["delta0"])
            seed = int(merged["seed"])
            tol = {k: float(v) for k, v in merged["tolerances"].items()}
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad numeric value: {exc}") from None
        kappa = merged["kappa"]
        if kappa != "auto":
            if isinstance(kappa, bool) or not isinstance(kappa, (int, float)) or int(kappa) != kappa:
                raise ConfigError(f"kappa must be an integer or 'auto', got {kappa!r}")
            kappa = int(kappa)
        if merged["profile"] not in PROFILES:
            raise ConfigError(f"profile must be one of {PROFILES}")
        grids = {k: _grid(v, k) for k, v in merged["grids"].items()}
        for k, v in (("lambda", lam), ("p", p), ("x0", x0), ("delta0", d0)):
            if not math.isfinite(v):
                raise ConfigError(f"{k} must be finite")
        return cls(lam, p, kappa, x0, d0, seed, merged["profile"], grids, tol)

    @property
    def param(self) -> DunklParam:
        return DunklParam(self.lam)

    def resolved_kappa(self) -> int:
        return min_vanishing_order(self.lam, self.p) if self.kappa == "auto" else int(self.kappa)

    def interval(self) -> Interval:
        return Interval(self.x0, self.delta0)

    def atom(self) -> Atom:
        return make_atom(self.param, self.p, self.interval(), self.resolved_kappa())

    def validate(self, *, needs_atom: bool = False, positive_y: bool = False) -> None:
        """Run the module preconditions up front; raises DomainError."""
        self.param
        if needs_atom:
            self.param.require_positive()
            self.interval()
            k = self.resolved_kappa()
            if k < 0 or k % 2:
                raise DomainError(f"kappa must be even and nonnegative, got {k}")
            kmin = min_vanishing_order(self.lam, self.p)
            if k < kmin:
                raise DomainError(f"kappa={k} below the minimum {kmin}")
        if positive_y and np.any(self.grids["y"] <= 0.0):
            raise DomainError("the Poisson kernels need y > 0")


def load_config(args: argparse.Namespace) -> RunConfig:
    raw: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
    for flag, key in (("lam", "lambda"), ("p", "p"), ("kappa", "kappa"), ("seed", "seed")):
        val = getattr(args, flag, None)
        if val is not None:
            raw[key] = val
    if isinstance(raw.get("kappa"), str) and raw["kappa"] != "auto":
        try:
            raw["kappa"] = int(raw["kappa"])
        except ValueError:
            raise ConfigError(f"kappa must be an integer or 'auto', got {raw['kappa']!r}") from None
    return RunConfig.from_dict(raw)


def num_threads() -> int:
    text = os.environ.get("DUNKL_NUM_THREADS", "1")
    try:
        n = int(text)
    except ValueError:
        raise ConfigError(f"DUNKL_NUM_THREADS must be a positive integer, got {text!r}") from None
    if n < 1:
        raise ConfigError("DUNKL_NUM_THREADS must be >= 1")
    return n


def _fmt(v: float) -> str:
    v = float(v)
    if not math.isfinite(v):
        raise ArithmeticError(f"non-finite value {v!r} in output")
    return format(v, ".15e")


def _write(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# --------------------------------------------------------------------------
# eval


def _profile(cfg: RunConfig):
    if cfg.profile == "atom":
        return AtomicRepresentation(((1.0, cfg.atom()),))
    return GridFunction((-12.0, 12.0), lambda x: np.exp(-0.5 * x * x), "gaussian")


def eval_rows(subject: str, cfg: RunConfig) -> tuple[list[str], list[tuple]]:
    p = cfg.param
    g = cfg.grids
    if subject == "dunkl-kernel":
        z = g["z"]
        v = np.asarray(dunkl_kernel(p, z))
        return ["x", "xi", "value_re", "value_im"], [(zi, 1.0, vi.real, vi.imag) for zi, vi in zip(z, v)]
    if subject == "transform":
        F = dunkl_transform(_profile(cfg), p, g["xi"])
        return ["xi", "value_re", "value_im"], [(xi, v.real, v.imag) for xi, v in zip(F.xi_grid, F.values)]
    X, T = np.meshgrid(g["x"], g["t"], indexing="ij")
    if subject == "kernel-h":
        v = np.asarray(hilbert_kernel(p, X.ravel(), T.ravel()), dtype=float)
        return ["x", "t", "value_re", "value_im"], [
            (x, t, vi, 0.0) for x, t, vi in zip(X.ravel(), T.ravel(), v)]
    kern = poisson_kernel if subject == "kernel-p" else conj_poisson_kernel
    rows = []
    for x, t in zip(X.ravel(), T.ravel()):
        for y in g["y"]:
            rows.append((x, t, y, float(kern(p, x, y, t)), 0.0))
    return ["x", "t", "y", "value_re", "value_im"], rows


def rows_to_csv(header: Sequence[str], rows: Sequence[tuple]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def cmd_eval(subject: str, cfg: RunConfig, out: str | None) -> int:
    if subject not in SUBJECTS:
        raise ConfigError(f"unknown subject {subject!r}")
    cfg.validate(needs_atom=subject == "transform" and cfg.profile == "atom",
                 positive_y=subject in ("kernel-p", "kernel-q"))
    header, rows = eval_rows(subject, cfg)
    _write(out, rows_to_csv(header, rows))
    return EXIT_OK


# --------------------------------------------------------------------------
# atom


def cmd_atom(cfg: RunConfig, out: str | None) -> int:
    cfg.validate(needs_atom=True)
    _write(out, atom_to_json(cfg.atom()) + "\n")
    return EXIT_OK


# --------------------------------------------------------------------------
# verify


def error_report(name: str, exc: BaseException) -> V.VerificationReport:
    return V.VerificationReport(name, 0.0, 0.0, 0.0, 0.0, False,
                                {"error": f"{type(exc).__name__}: {exc}"})


def _guard(name: str, fn: Callable[[], V.VerificationReport]) -> Callable[[], V.VerificationReport]:
    def run() -> V.VerificationReport:
        try:
            return fn()
        except (ArithmeticError, DomainError, np.linalg.LinAlgError) as exc:
            return error_report(name, exc)
    return run


def _decay_grid(a: Atom, seed: int) -> np.ndarray:
    """Deterministic far-field grid plus seeded points in both proof regions."""
    rng = np.random.default_rng(seed)
    x0, d0 = abs(a.interval.x0), a.interval.delta0
    s = math.copysign(1.0, a.interval.x0)
    extra = [-(x0 + 4.0 * d0) - rng.uniform(0.0, x0 - 4.0 * d0 if x0 > 8.0 * d0 else d0, 2)]
    extra.append(x0 + 4.0 * d0 + rng.uniform(0.0, 8.0 * x0, 2))
    pts = np.concatenate([V.far_field_grid(a), s * np.concatenate(extra)])
    region = V.FarFieldRegion.of(a)
    return np.unique(pts[region.contains(pts)])


def suite_jobs(suite: str, cfg: RunConfig) -> list[tuple[str, Callable[[], V.VerificationReport]]]:
    tol = cfg.tolerances
    dp = cfg.param
    jobs: list[tuple[str, Callable]] = []
    if suite in ("estimates", "all"):
        region = V.FarFieldRegion(cfg.x0, cfg.delta0)
        for k in (2.0, 3.0):
            jobs.append((f"estimate_b(k={k:g})", lambda k=k: V.check_estimate_b(k, region)))
        for var in "acd":
            jobs.append((f"estimate_{var}", lambda var=var: V.check_estimate_abc_d(
                var, dp, factor=tol["estimate_factor"])))
    if suite in ("atoms", "decay", "paley", "all"):
        a = cfg.atom()
    if suite in ("atoms", "all"):
        ys = [float(y) for y in cfg.grids["y_sweep"]]
        jobs.append(("atom", lambda: V.atom_report(a)))
        jobs.append(("atom_bound[hilbert]", lambda: V.atom_bound_report(
            a, "hilbert", tolerance=tol["atom_bound"])))
        for kind in ("poisson", "conj_poisson"):
            jobs.append((f"atom_bound_sweep[{kind}]", lambda kind=kind: V.atom_bound_sweep(
                a, kind, ys, tolerance=tol["atom_bound"])))
    if suite in ("decay", "all"):
        x = _decay_grid(a, cfg.seed)
        for op in ("hilbert", "poisson(1)", "conj_poisson(1)"):
            jobs.append((f"decay_envelope[{op}]", lambda op=op: V.decay_envelope_check(
                a, op, x, spread=tol["decay_spread"])))
        jobs.append(("sup_decay", lambda: V.sup_decay_exponent(a, margin=tol["exponent_margin"])))
        for var in ("poisson", "conj_poisson"):
            jobs.append((f"y_derivative[{var}]", lambda var=var: V.y_derivative_bound(
                a, variant=var, tolerance=tol["y_derivative"])))
    if suite in ("paley", "all"):
        narrow = make_atom(dp, cfg.p, Interval(cfg.x0, 0.5 * cfg.delta0), a.kappa)
        far = make_atom(dp, cfg.p, Interval(-2.0 * cfg.x0, 2.0 * cfg.delta0), a.kappa)
        reps = {
            "single": AtomicRepresentation(((1.0, a),)),
            "narrow": AtomicRepresentation(((1.0, narrow),)),
            "pair": AtomicRepresentation(((1.0, a), (0.5, far))),
        }
        for k in sorted({cfg.p, 1.0, 2.0}):
            for label, r in reps.items():
                jobs.append((f"paley[{label},k={k:g}]", lambda r=r, k=k: V.paley_functional(
                    r, dp, cfg.p, k, tolerance=tol["paley"])))
        jobs.append(("hp_sum", lambda: V.hp_sum_bound(reps["pair"])))
    return [(name, _guard(name, fn)) for name, fn in jobs]


def run_suite(suite: str, cfg: RunConfig, threads: int = 1) -> list[V.VerificationReport]:
    jobs = suite_jobs(suite, cfg)
    if threads <= 1:
        reports = [fn() for _, fn in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            # map keeps submission order, so output stays deterministic
            reports = list(pool.map(lambda job: job[1](), jobs))
    # job names are unique within a suite; report names need not be
    return [dataclasses.replace(r, name=name) for (name, _), r in zip(jobs, reports)]


def cmd_verify(suite: str, cfg: RunConfig, out: str | None, threads: int = 1) -> int:
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}")
    cfg.validate(needs_atom=suite != "estimates")
    if suite in ("paley", "all"):
        lo = 2.0 * cfg.lam / (2.0 * cfg.lam + 1.0)
        if not lo < cfg.p <= 1.0:
            raise DomainError(f"p must lie in ({lo:.6g}, 1] for lambda={cfg.lam}")
    reports = run_suite(suite, cfg, threads)
    # reports are tagged with the suite seed so archived files are self-describing
    reports = [dataclasses.replace(r, params={**r.params, "seed": cfg.seed}) for r in reports]
    _write(out, V.reports_to_jsonl(reports))
    failed = [r.name for r in reports if not r.passed]
    for name in failed:
        print(f"FAIL {name}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--lambda", dest="lam", type=float, help="multiplicity lambda")
    common.add_argument("--p", type=float, help="Hardy exponent p")
    common.add_argument("--kappa", help="vanishing order (even integer or 'auto')")
    common.add_argument("--seed", type=int, help="seed for randomized sweep points")

    parser = argparse.ArgumentParser(prog="dunklhp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    ev = sub.add_parser("eval", parents=[common], help="evaluate a kernel or transform to CSV")
    ev.add_argument("subject", choices=SUBJECTS)
    sub.add_parser("atom", parents=[common], help="construct an atom and write it as JSON")
    ve = sub.add_parser("verify", parents=[common], help="run verification suites (JSON lines)")
    ve.add_argument("--suite", choices=SUITES, default="all")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = load_config(args)
        threads = num_threads()
        if args.command == "eval":
            return cmd_eval(args.subject, cfg, args.out)
        if args.command == "atom":
            return cmd_atom(cfg, args.out)
        return cmd_verify(args.suite, cfg, args.out, threads)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(error_report(args.command, exc).to_json(), file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
