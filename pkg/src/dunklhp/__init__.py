"""Rank-one Dunkl harmonic analysis: kernels, transforms, atoms and numerical checks."""

from .atoms import (
    Atom,
    AtomicRepresentation,
    Interval,
    make_atom,
    min_vanishing_order,
    quasinorm_upper,
)
from .kernels import (
    HalfPlanePoint,
    conj_poisson_integral,
    conj_poisson_kernel,
    hilbert_kernel,
    hilbert_transform,
    poisson_integral,
    poisson_kernel,
)
from .special import DomainError, DunklParam, bessel_j_norm, dunkl_kernel
from .transform import GridFunction, dunkl_transform, inverse_dunkl_transform
from .verify import VerificationReport

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "AtomicRepresentation",
    "DomainError",
    "DunklParam",
    "GridFunction",
    "HalfPlanePoint",
    "Interval",
    "VerificationReport",
    "bessel_j_norm",
    "conj_poisson_integral",
    "conj_poisson_kernel",
    "dunkl_kernel",
    "dunkl_transform",
    "hilbert_kernel",
    "hilbert_transform",
    "inverse_dunkl_transform",
    "make_atom",
    "min_vanishing_order",
    "poisson_integral",
    "poisson_kernel",
    "quasinorm_upper",
]
