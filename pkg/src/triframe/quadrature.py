"""Quadrature rules on the triangle.

Two families: equal-weight triangular Kronecker lattices (low-discrepancy,
used as framelet translation points) and a polynomial-exact reference rule
built by collapsed-coordinate tensorization (the oracle for exactness and
orthonormality checks).  Gram matrices quantify how far a rule is from
integrating basis products exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .basis import (
    SIMPLEX_TOL,
    DomainError,
    basis_matrix,
    degree_cutoff,
    lambda_vector,
    tri_dim,
)

#: default lattice generator: fractional parts of sqrt(2) and sqrt(3)
DEFAULT_GENERATOR = (math.sqrt(2.0) - 1.0, math.sqrt(3.0) - 1.0)
DEFAULT_SHIFT = (0.0, 0.0)

KIND_KRONECKER = "kronecker_lattice"
KIND_GAUSS = "gauss_reference"
KIND_CUSTOM = "custom"


def lattice_size(j: int) -> int:
    """Node count 2**(2j) + 1 of the level-j lattice."""
    if j < 0:
        raise DomainError("level must be nonnegative")
    return 4**j + 1


@dataclass
class QuadratureRule:
    """Weighted node set on the triangle.

    Treated as immutable after construction; the lazily built weighted basis
    matrices are cached per spectral cutoff.
    """

    nodes: np.ndarray
    weights: np.ndarray
    kind: str = KIND_CUSTOM
    level: int | None = None
    generator_meta: dict = field(default_factory=dict)
    _basis_cache: dict = field(
        default_factory=dict, repr=False, compare=False, init=False
    )

    def __post_init__(self):
        self.nodes = np.ascontiguousarray(self.nodes, dtype=float)
        self.weights = np.ascontiguousarray(self.weights, dtype=float)
        if self.nodes.ndim != 2 or self.nodes.shape[1] != 2:
            raise ValueError("nodes must have shape (N, 2)")
        if self.weights.shape != (self.nodes.shape[0],):
            raise ValueError("weights must match nodes in length")
        if np.any(self.weights == 0.0):
            raise ValueError("weights must be nonzero")
        bad = (
            (self.nodes[:, 0] < -SIMPLEX_TOL)
            | (self.nodes[:, 1] < -SIMPLEX_TOL)
            | (self.nodes.sum(axis=1) > 1.0 + SIMPLEX_TOL)
        )
        if bad.any():
            raise DomainError(f"{int(bad.sum())} node(s) outside the simplex")
        if self.kind == KIND_KRONECKER:
            if self.level is None:
                raise ValueError("lattice rules carry a level")
            n = self.size
            if n < 4**self.level:
                raise ValueError("lattice must have at least 2**(2j) nodes")
            if not np.allclose(self.weights, 1.0 / n, rtol=0.0, atol=0.0):
                raise ValueError("lattice weights must all equal 1/N")

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    def with_level(self, level: int) -> "QuadratureRule":
        """Copy of this rule tagged with a framelet level (shares node data)."""
        return replace(self, level=level)

    def weighted_basis(self, cutoff: int) -> np.ndarray:
        """sqrt(weight)-scaled basis table, shape (N, tri_dim(cutoff)); cached.

        This is the synthesis matrix: values = weighted_basis(c) @ coeffs.
        """
        if cutoff < 0:
            return np.empty((self.size, 0))
        best = max((c for c in self._basis_cache if c >= cutoff), default=None)
        if best is None:
            table = basis_matrix(self.nodes, cutoff, validate=False)
            table *= np.sqrt(self.weights)[:, None]
            self._basis_cache[cutoff] = table
            return table
        return self._basis_cache[best][:, : tri_dim(cutoff)]

    def clear_cache(self) -> None:
        self._basis_cache.clear()


def _unit_square_stream(generator, shift, count: int) -> np.ndarray:
    g1, g2 = float(generator[0]), float(generator[1])
    s1, s2 = float(shift[0]), float(shift[1])
    i = np.arange(count, dtype=float)
    return np.stack(((i * g1 + s1) % 1.0, (i * g2 + s2) % 1.0), axis=1)


def kronecker_lattice(
    j: int,
    generator=DEFAULT_GENERATOR,
    shift=DEFAULT_SHIFT,
    strategy: str = "fold",
) -> QuadratureRule:
    """Equal-weight triangular Kronecker lattice with 2**(2j) + 1 nodes.

    strategy "fold" reflects unit-square points with x + y > 1 through
    (1-x, 1-y); "intersect" walks the lattice stream and keeps the first
    points that land in the triangle, failing after 8N candidates.
    Deterministic (bit-identical) for fixed parameters.
    """
    n = lattice_size(j)
    if strategy == "fold":
        pts = _unit_square_stream(generator, shift, n)
        over = pts.sum(axis=1) > 1.0
        pts[over] = 1.0 - pts[over]
    elif strategy == "intersect":
        budget = 8 * n
        candidates = _unit_square_stream(generator, shift, budget)
        inside = candidates.sum(axis=1) <= 1.0
        if inside.sum() < n:
            raise ValueError(
                f"intersect strategy found only {int(inside.sum())} of {n} "
                f"nodes within {budget} candidates"
            )
        pts = candidates[inside][:n]
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return QuadratureRule(
        nodes=pts,
        weights=np.full(n, 1.0 / n),
        kind=KIND_KRONECKER,
        level=j,
        generator_meta={
            "generator": [float(generator[0]), float(generator[1])],
            "shift": [float(shift[0]), float(shift[1])],
            "strategy": strategy,
        },
    )


def gauss_reference_rule(degree: int) -> QuadratureRule:
    """Rule exact for all triangle polynomials up to the requested degree.

    Collapsed-coordinate tensorization: Gauss-Jacobi with weight (1-t) in the
    x1 direction times Gauss-Legendre in the ratio direction, mapped through
    (x1, x2) = (u, (1-u) v); the Jacobian is absorbed by the Jacobi weight and
    the weights are normalized to sum to 1 (normalized area measure).
    """
    if degree < 0:
        raise DomainError("degree must be nonnegative")
    if degree > 128:
        raise DomainError("reference rule capped at degree 128")
    npts = degree // 2 + 1
    tu, wu = roots_jacobi(npts, 1.0, 0.0)
    tv, wv = roots_legendre(npts)
    u = 0.5 * (tu + 1.0)
    v = 0.5 * (tv + 1.0)
    x1 = np.repeat(u, npts)
    x2 = (1.0 - x1) * np.tile(v, npts)
    w = np.repeat(wu, npts) * np.tile(wv, npts)
    w /= w.sum()
    return QuadratureRule(
        nodes=np.stack((x1, x2), axis=1),
        weights=w,
        kind=KIND_GAUSS,
        generator_meta={"degree": degree},
    )


def integrate(rule: QuadratureRule, f: Callable) -> complex:
    """Weighted node sum of a scalar field.

    f may act on an (N, 2) array of points or on a single point.
    """
    try:
        values = np.asarray(f(rule.nodes))
        if values.shape != (rule.size,):
            raise TypeError
    except TypeError:
        values = np.asarray([f(p) for p in rule.nodes])
    return complex(np.sum(rule.weights * values))


def exactness_degree(rule: QuadratureRule, tol: float, max_degree: int = 60) -> int:
    """Largest degree L (capped at max_degree) such that every basis member
    of degree <= L integrates to its exact value within tol; -1 when even
    constants fail.

    Constants integrate to 1; every other member has zero mean, so exactness
    on the orthonormal basis is equivalent to exactness on polynomials.  The
    search grows the tested cutoff geometrically so inexact rules exit early.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    cap = max_degree + 1
    cutoff = min(8, cap)
    while True:
        table = basis_matrix(rule.nodes, cutoff, validate=False)
        sums = rule.weights @ table
        exact = np.zeros_like(sums)
        exact[0] = 1.0
        err = np.abs(sums - exact)
        for ell in range(cutoff + 1):
            if err[tri_dim(ell - 1) : tri_dim(ell)].max() > tol:
                return ell - 1
        if cutoff == cap:
            return max_degree
        cutoff = min(2 * cutoff, cap)


@dataclass
class GramMatrix:
    """Quadrature approximations of all pairwise basis inner products."""

    cutoff: int
    entries: np.ndarray

    def __post_init__(self):
        dim = tri_dim(self.cutoff)
        if self.entries.shape != (dim, dim):
            raise ValueError("entries must be square over the linearized basis")

    def max_deviation_from_identity(self) -> float:
        return float(
            np.abs(self.entries - np.eye(tri_dim(self.cutoff))).max()
        )


def gram_matrix(rule: QuadratureRule, cutoff: int) -> GramMatrix:
    """Matrix of weighted sums of basis products over the rule's nodes.

    Equals the identity exactly when the rule is polynomial-exact to degree
    2*cutoff; for the real-valued basis the matrix is real symmetric.
    """
    if cutoff < 0:
        raise DomainError("cutoff must be nonnegative")
    table = rule.weighted_basis(cutoff)
    return GramMatrix(cutoff, table.T @ np.conj(table))


def generalized_tightness_residual(
    rule_lo: QuadratureRule,
    rule_hi: QuadratureRule,
    bank,
    j: int,
    cutoff: int,
) -> float:
    """Residual of the tightness condition for possibly inexact rules.

    For every basis pair whose low-pass scaling values at scale j are both
    nonzero, the low-pass mask couples the coarse rule's Gram entry and the
    high-pass masks couple the fine rule's; a tight system reproduces the fine
    Gram entry.  Returns the maximum absolute defect.
    """
    if j < 1:
        raise DomainError("scale j must be >= 1")
    if cutoff > degree_cutoff(j):
        raise DomainError("cutoff exceeds the level-j spectral cap")
    gram_lo = gram_matrix(rule_lo, cutoff).entries
    gram_hi = gram_matrix(rule_hi, cutoff).entries
    xi = lambda_vector(cutoff) / 2.0**j
    low = bank.low(xi)
    scaling_low = bank.scaling_low(xi)
    combo = np.outer(np.conj(low), low) * gram_lo
    for high in bank.highs:
        hv = high(xi)
        combo += np.outer(np.conj(hv), hv) * gram_hi
    defect = np.abs(combo - gram_hi)
    qualifies = np.outer(np.conj(scaling_low), scaling_low) != 0.0
    if not qualifies.any():
        return 0.0
    return float(defect[qualifies].max())


def rule_to_dict(rule: QuadratureRule) -> dict:
    meta = rule.generator_meta
    return {
        "kind": rule.kind,
        "level": rule.level,
        "generator": meta.get("generator"),
        "shift": meta.get("shift"),
        "strategy": meta.get("strategy"),
        "nodes": [[float(x), float(y)] for x, y in rule.nodes],
        "weights": [float(w) for w in rule.weights],
    }


def rule_from_dict(doc: dict) -> QuadratureRule:
    meta = {
        key: doc[key]
        for key in ("generator", "shift", "strategy")
        if doc.get(key) is not None
    }
    return QuadratureRule(
        nodes=np.asarray(doc["nodes"], dtype=float),
        weights=np.asarray(doc["weights"], dtype=float),
        kind=doc["kind"],
        level=doc.get("level"),
        generator_meta=meta,
    )
