"""Finite-dimensional resolution of the identity for normal matrices.

A :class:`SpectralMeasure` is a list of distinct eigenvalues with their
orthogonal eigenprojections. Regions of the complex plane are predicates on
eigenvalues; projections, Borel functions and region truncations are finite
sums over the points of the measure.
"""

from dataclasses import dataclass, field
import math
from typing import Callable

import numpy as np

from .errors import NotNormal, NotRealSpectrum
from .linalg import (
    PolarFactors,
    adjoint,
    as_matrix,
    class_check,
    hermitian_eig,
    normal_eig,
    operator_norm,
)


@dataclass(frozen=True)
class SpectralMeasure:
    points: tuple  # ((eigenvalue, projection), ...)
    dim: int
    grouping_tol: float = 0.0

    @property
    def eigenvalues(self):
        return np.array([lam for lam, _ in self.points], dtype=np.complex128)

    @property
    def projections(self):
        return [P for _, P in self.points]

    def has_real_spectrum(self, tol=None):
        if tol is None:
            tol = max(self.grouping_tol, 1e-12)
        return all(abs(lam.imag) <= tol for lam, _ in self.points)


@dataclass(frozen=True)
class SpectralRegion:
    """A set of complex numbers given by a membership predicate.

    ``real_only`` marks regions defined by order comparisons, which only make
    sense on a real spectrum.
    """

    predicate: Callable[[complex], bool]
    label: str
    real_only: bool = field(default=False)

    def __contains__(self, z):
        return bool(self.predicate(z))

    def __or__(self, other):
        return SpectralRegion(lambda z: z in self or z in other, f"({self.label}) ∪ ({other.label})",
                              self.real_only or other.real_only)

    def __and__(self, other):
        return SpectralRegion(lambda z: z in self and z in other, f"({self.label}) ∩ ({other.label})",
                              self.real_only or other.real_only)

    def complement(self):
        return SpectralRegion(lambda z: z not in self, f"complement of ({self.label})", self.real_only)

    @classmethod
    def everything(cls):
        return cls(lambda z: True, "C")

    @classmethod
    def nothing(cls):
        return cls(lambda z: False, "∅")

    @classmethod
    def outside_closed_disk(cls, r):
        """{z : |z| > r}, the complement of the closed disk B(r)."""
        return cls(lambda z: abs(z) > r, f"|z| > {r:g}")

    @classmethod
    def closed_disk(cls, r):
        return cls(lambda z: abs(z) <= r, f"|z| <= {r:g}")

    @classmethod
    def above(cls, t):
        """{z real : z > t}; boundary points are excluded."""
        return cls(lambda z: z.real > t, f"z > {t:g}", real_only=True)

    @classmethod
    def at_most(cls, t):
        return cls(lambda z: z.real <= t, f"z <= {t:g}", real_only=True)


def _group(lam, Q, tol):
    """Cluster eigenvalues closer than ``tol`` (single linkage, in order of
    decreasing modulus) and sum their rank-one projections."""
    order = np.argsort(-np.abs(lam), kind="stable")
    groups = []
    for j in order:
        for g in groups:
            if np.min(np.abs(lam[g] - lam[j])) <= tol:
                g.append(j)
                break
        else:
            groups.append([j])
    points = []
    for g in groups:
        B = Q[:, g]
        P = B @ adjoint(B)
        points.append((complex(np.mean(lam[g])), 0.5 * (P + adjoint(P))))
    return tuple(points)


def default_grouping_tol(T):
    return 1e-8 * max(1.0, operator_norm(T))


def normal_spectral_measure(T, grouping_tol=None, tol=None):
    """Resolution of the identity of a normal matrix."""
    T = as_matrix(T)
    if not class_check(T, "normal", tol):
        raise NotNormal("T is not normal within tolerance")
    if grouping_tol is None:
        grouping_tol = default_grouping_tol(T)
    lam, Q = normal_eig(T)
    return SpectralMeasure(_group(lam, Q, grouping_tol), T.shape[0], grouping_tol)


def hermitian_spectral_measure(A, grouping_tol=None):
    """Resolution of the identity of a Hermitian matrix (real eigenvalues)."""
    A = as_matrix(A)
    ed = hermitian_eig(A)
    if grouping_tol is None:
        grouping_tol = 1e-8 * max(1.0, float(np.max(np.abs(ed.eigenvalues))))
    lam = ed.eigenvalues.astype(np.complex128)
    return SpectralMeasure(_group(lam, ed.eigenvectors, grouping_tol), A.shape[0], grouping_tol)


def push_forward(E, g, grouping_tol=None):
    """Spectral measure of g(T) from that of T: points are mapped by ``g`` and
    projections of points with (numerically) equal images are merged."""
    if grouping_tol is None:
        grouping_tol = E.grouping_tol
    merged = []
    for lam, P in E.points:
        z = complex(g(lam))
        for item in merged:
            if abs(item[0] - z) <= grouping_tol:
                item[1] = item[1] + P
                break
        else:
            merged.append([z, P.copy()])
    return SpectralMeasure(tuple((z, P) for z, P in merged), E.dim, grouping_tol)


def _check_region(E, region):
    if region.real_only and not E.has_real_spectrum():
        raise NotRealSpectrum(f"region {region.label!r} compares with reals but the spectrum is not real")


def apply_borel_function(E, f):
    """f(T) = sum_j f(lambda_j) P_j."""
    out = np.zeros((E.dim, E.dim), dtype=np.complex128)
    for lam, P in E.points:
        val = complex(f(lam))
        if not (math.isfinite(val.real) and math.isfinite(val.imag)):
            raise ValueError(f"f is not finite at eigenvalue {lam!r}")
        out += val * P
    return out


def spectral_projection(E, region):
    _check_region(E, region)
    out = np.zeros((E.dim, E.dim), dtype=np.complex128)
    for lam, P in E.points:
        if lam in region:
            out += P
    return out


def region_truncation(E, region, f):
    """sum over eigenvalues in ``region`` of f(lambda_j) P_j."""
    _check_region(E, region)
    out = np.zeros((E.dim, E.dim), dtype=np.complex128)
    for lam, P in E.points:
        if lam in region:
            out += complex(f(lam)) * P
    return out


def unit_phase(z):
    """z/|z|, with the value 1 at the origin."""
    return z / abs(z) if z != 0 else 1.0 + 0j


def normal_polar(T, E=None):
    """Polar factors of a normal matrix with commuting U and |T|:
    U = g(T) for g(z) = z/|z| (g(0) = 1) and |T| = abs(T).

    Eigenvalues within the grouping tolerance of 0 count as 0.
    """
    if E is None:
        E = normal_spectral_measure(T)
    zero = E.grouping_tol
    U = apply_borel_function(E, lambda z: unit_phase(z) if abs(z) > zero else 1.0)
    M = apply_borel_function(E, abs)
    return PolarFactors(U, 0.5 * (M + adjoint(M)))
