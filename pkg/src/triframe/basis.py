"""Orthonormal polynomial basis on the unit triangle.

The basis members are weighted tensor products of Jacobi polynomials in
collapsed coordinates, orthonormal for the normalized area measure on
T2 = {x1 >= 0, x2 >= 0, x1 + x2 <= 1}.  Each degree-ell member is an
eigenfunction of the triangle's Laplace-Beltrami operator, which attaches
the spectral location sqrt(ell*(ell+2)) used by the filter banks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np

SIMPLEX_TOL = 1e-12
# Distance from the x1 = 1 corner below which the collapsed ratio coordinate
# 2*x2/(1-x1) - 1 degenerates; the continuous limit of the product is used.
_CORNER_EPS = 1e-14


class DomainError(ValueError):
    """Argument outside the domain an operation is defined on."""


class BasisIndex(NamedTuple):
    """Degree/order pair with 0 <= m <= ell."""

    ell: int
    m: int


def tri_dim(cutoff: int) -> int:
    """Number of basis members with degree <= cutoff (0 for cutoff < 0)."""
    if cutoff < 0:
        return 0
    return (cutoff + 1) * (cutoff + 2) // 2


def linear_index(ell: int, m: int) -> int:
    """Position of (ell, m) in degree-major ordering."""
    if not 0 <= m <= ell:
        raise DomainError(f"invalid basis index ({ell}, {m})")
    return ell * (ell + 1) // 2 + m


@lru_cache(maxsize=None)
def index_list(cutoff: int) -> tuple[BasisIndex, ...]:
    """All (ell, m) pairs with ell <= cutoff, in linear-index order."""
    return tuple(
        BasisIndex(ell, m) for ell in range(cutoff + 1) for m in range(ell + 1)
    )


@lru_cache(maxsize=None)
def degree_vector(cutoff: int) -> np.ndarray:
    """Degree ell of every linear index up to the cutoff (read-only)."""
    out = np.repeat(np.arange(cutoff + 1), np.arange(1, cutoff + 2))
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def lambda_vector(cutoff: int) -> np.ndarray:
    """Eigenvalue sqrt(ell*(ell+2)) of every linear index (read-only)."""
    ells = degree_vector(cutoff).astype(float)
    out = np.sqrt(ells * (ells + 2.0))
    out.flags.writeable = False
    return out


def eigenvalue(ell: int) -> float:
    """Square-rooted Laplace-Beltrami eigenvalue of the degree-ell space."""
    if ell < 0:
        raise DomainError("degree must be nonnegative")
    return math.sqrt(ell * (ell + 2))


def degree_cutoff(j: int) -> int:
    """Largest degree whose eigenvalue fits under 2**(j-1).

    Exact integer arithmetic: ell*(ell+2) <= 4**(j-1) iff
    (ell+1)**2 <= 4**(j-1) + 1.
    """
    if j < 0:
        raise DomainError("level must be nonnegative")
    if j == 0:
        return 0
    return math.isqrt(4 ** (j - 1) + 1) - 1


def max_degree_within(bound: float) -> int:
    """Largest ell with eigenvalue(ell) <= bound, or -1 when bound < 0."""
    if bound < 0:
        return -1
    ell = max(int(math.sqrt(bound * bound + 1.0) - 1.0), 0)
    while eigenvalue(ell + 1) <= bound:
        ell += 1
    while ell > 0 and eigenvalue(ell) > bound:
        ell -= 1
    return ell


def in_simplex(x, tol: float = SIMPLEX_TOL) -> bool:
    """Membership in the closed triangle, up to tolerance."""
    x1, x2 = float(x[0]), float(x[1])
    return x1 >= -tol and x2 >= -tol and x1 + x2 <= 1.0 + tol


def require_in_simplex(x, tol: float = SIMPLEX_TOL) -> None:
    if not in_simplex(x, tol):
        raise DomainError(f"point ({float(x[0])}, {float(x[1])}) outside the simplex")


def _jacobi_next(n: int, tau: float, gamma: float, t, p1, p0):
    """One forward step of the Jacobi three-term recurrence (degree n >= 2)."""
    c = 2.0 * n + tau + gamma
    a1 = 2.0 * n * (n + tau + gamma) * (c - 2.0)
    a2 = (c - 1.0) * (tau * tau - gamma * gamma)
    a3 = (c - 1.0) * c * (c - 2.0)
    a4 = 2.0 * (n + tau - 1.0) * (n + gamma - 1.0) * c
    return ((a2 + a3 * t) * p1 - a4 * p0) / a1


def jacobi_eval(tau: float, gamma: float, ell: int, t):
    """Unnormalized Jacobi polynomial of degree ell at t, weight (1-t)^tau (1+t)^gamma.

    Forward three-term recurrence; stable for the moderate degrees used here.
    t may be a scalar or an ndarray.
    """
    if tau <= -1.0 or gamma <= -1.0:
        raise DomainError("Jacobi parameters must satisfy tau > -1 and gamma > -1")
    if ell < 0:
        raise DomainError("degree must be nonnegative")
    arr = np.asarray(t, dtype=float)
    scalar = arr.ndim == 0
    p0 = np.ones_like(arr)
    if ell == 0:
        return float(p0) if scalar else p0
    p1 = 0.5 * ((tau + gamma + 2.0) * arr + (tau - gamma))
    for n in range(2, ell + 1):
        p1, p0 = _jacobi_next(n, tau, gamma, arr, p1, p0), p1
    return float(p1) if scalar else p1


def basis_eval(idx, x) -> float:
    """Value of the orthonormal triangle polynomial (ell, m) at one point."""
    ell, m = idx
    if not 0 <= m <= ell:
        raise DomainError(f"invalid basis index ({ell}, {m})")
    require_in_simplex(x)
    x1, x2 = float(x[0]), float(x[1])
    norm = math.sqrt((ell + 1) * (2 * m + 1))
    radial = float(jacobi_eval(2.0 * m + 1.0, 0.0, ell - m, 2.0 * x1 - 1.0))
    if m == 0:
        return norm * radial
    omx = 1.0 - x1
    if omx < _CORNER_EPS:
        # continuous limit: the (1-x1)^m factor kills every m >= 1 member
        return 0.0
    ratio = 2.0 * x2 / omx - 1.0
    angular = float(jacobi_eval(0.0, 0.0, m, ratio))
    return norm * radial * omx**m * angular


def basis_matrix(points, cutoff: int, validate: bool = True) -> np.ndarray:
    """Table of all basis values with degree <= cutoff at many points.

    Returns shape (npoints, tri_dim(cutoff)), columns in degree-major (ell, m)
    order.  Cost is O(npoints * tri_dim(cutoff)) recurrence work.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise DomainError("points must have shape (n, 2)")
    if validate:
        bad = (
            (pts[:, 0] < -SIMPLEX_TOL)
            | (pts[:, 1] < -SIMPLEX_TOL)
            | (pts[:, 0] + pts[:, 1] > 1.0 + SIMPLEX_TOL)
        )
        if bad.any():
            raise DomainError(f"{int(bad.sum())} point(s) outside the simplex")
    if cutoff < 0:
        return np.empty((pts.shape[0], 0))
    x1 = pts[:, 0]
    t = 2.0 * x1 - 1.0
    omx = 1.0 - x1
    degenerate = omx < _CORNER_EPS
    ratio = 2.0 * pts[:, 1] / np.where(degenerate, 1.0, omx) - 1.0

    n = pts.shape[0]
    out = np.empty((n, tri_dim(cutoff)))
    leg0 = np.zeros(n)
    leg1 = np.ones(n)  # Legendre P_m(ratio), m running
    weight = np.ones(n)  # (1-x1)^m, exactly zero at the corner for m >= 1
    for m in range(cutoff + 1):
        if m == 1:
            leg1, leg0 = ratio.copy(), leg1
            weight = np.where(degenerate, 0.0, omx)
        elif m > 1:
            leg1, leg0 = _jacobi_next(m, 0.0, 0.0, ratio, leg1, leg0), leg1
            weight = np.where(degenerate, 0.0, weight * omx)
        base = leg1 * weight
        tau = 2.0 * m + 1.0
        jac0 = np.zeros(n)
        jac1 = np.ones(n)  # Jacobi P^(2m+1,0)_d(t), d running
        for d in range(cutoff - m + 1):
            if d == 1:
                jac1, jac0 = 0.5 * ((tau + 2.0) * t + tau), jac1
            elif d > 1:
                jac1, jac0 = _jacobi_next(d, tau, 0.0, t, jac1, jac0), jac1
            ell = d + m
            out[:, linear_index(ell, m)] = (
                math.sqrt((ell + 1) * (2 * m + 1)) * jac1 * base
            )
    return out


def laplace_beltrami_apply(f: Callable, x, h: float) -> float:
    """O(h^2) central-difference application of the triangle Laplace-Beltrami
    operator to a scalar field at an interior point.

    The point should sit at distance > 2h from the boundary; the nine-point
    stencil is required to stay inside the closed triangle.
    """
    if h <= 0:
        raise DomainError("step must be positive")
    x1, x2 = float(x[0]), float(x[1])
    require_in_simplex((x1, x2))
    offsets = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)]
    for i, k in offsets:
        if not in_simplex((x1 + i * h, x2 + k * h), tol=0.0):
            raise DomainError("finite-difference stencil leaves the simplex")

    def fv(i, k):
        return float(f((x1 + i * h, x2 + k * h)))

    f00 = float(f((x1, x2)))
    d1 = (fv(1, 0) - fv(-1, 0)) / (2.0 * h)
    d2 = (fv(0, 1) - fv(0, -1)) / (2.0 * h)
    d11 = (fv(1, 0) - 2.0 * f00 + fv(-1, 0)) / (h * h)
    d22 = (fv(0, 1) - 2.0 * f00 + fv(0, -1)) / (h * h)
    d12 = (fv(1, 1) - fv(1, -1) - fv(-1, 1) + fv(-1, -1)) / (4.0 * h * h)
    return (
        x1 * (1.0 - x1) * d11
        + x2 * (1.0 - x2) * d22
        - 2.0 * x1 * x2 * d12
        + (1.0 - 3.0 * x1) * d1
        + (1.0 - 3.0 * x2) * d2
    )


@dataclass
class SpectralVector:
    """Dense complex coefficients over all (ell, m) with ell <= cutoff."""

    cutoff: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.coeffs = np.ascontiguousarray(self.coeffs, dtype=complex)
        if self.coeffs.shape != (tri_dim(self.cutoff),):
            raise ValueError(
                f"expected {tri_dim(self.cutoff)} coefficients for cutoff "
                f"{self.cutoff}, got {self.coeffs.shape}"
            )

    @classmethod
    def zeros(cls, cutoff: int) -> "SpectralVector":
        return cls(cutoff, np.zeros(tri_dim(cutoff), dtype=complex))

    @classmethod
    def from_entries(cls, cutoff: int, entries: dict) -> "SpectralVector":
        """Build from a sparse {(ell, m): value} mapping; absent entries are 0."""
        vec = cls.zeros(cutoff)
        for (ell, m), value in entries.items():
            if ell > cutoff:
                raise ValueError(f"entry ({ell}, {m}) exceeds cutoff {cutoff}")
            vec.coeffs[linear_index(ell, m)] = value
        return vec

    def __getitem__(self, idx) -> complex:
        ell, m = idx
        if ell > self.cutoff:
            return 0j
        return complex(self.coeffs[linear_index(ell, m)])

    def resized(self, cutoff: int) -> "SpectralVector":
        """Copy truncated or zero-padded to a new cutoff."""
        out = np.zeros(tri_dim(cutoff), dtype=complex)
        keep = min(tri_dim(cutoff), tri_dim(self.cutoff))
        out[:keep] = self.coeffs[:keep]
        return SpectralVector(cutoff, out)

    def copy(self) -> "SpectralVector":
        return SpectralVector(self.cutoff, self.coeffs.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))
