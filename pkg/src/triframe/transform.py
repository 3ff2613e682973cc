"""Framelet transforms: analysis, decomposition, reconstruction, DFTs.

Every coefficient sequence carries its spectral representation alongside the
point values; the transform algebra acts on spectra (where decomposition and
reconstruction are exact identities) and point values are a synthesized view
computed lazily from the carrying rule.  High-pass coefficients at framelet
level j live on the level-(j+1) rule because their scaling symbols occupy a
band twice as wide as the low-pass one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .basis import (
    SpectralVector,
    basis_matrix,
    degree_cutoff,
    lambda_vector,
    max_degree_within,
    tri_dim,
)
from .filters import FilterBank, SpectralSymbol
from . import filters as _filters
from . import quadrature as _quadrature
from .quadrature import KIND_KRONECKER, QuadratureRule, lattice_size

#: residual allowed for the mask partition identity of a usable bank
PARTITION_TOL = 1e-12
_PARTITION_GRID = np.linspace(0.0, 0.5, 2049)

_bit_reproducible = False


def set_bit_reproducible(flag: bool) -> None:
    """Route synthesis sums through a fixed association order.

    Slower, but makes repeated runs bit-identical independently of the BLAS
    threading behind matrix products.
    """
    global _bit_reproducible
    _bit_reproducible = bool(flag)


def _synthesize(matrix: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    if _bit_reproducible:
        return (matrix * coeffs[None, :]).sum(axis=1)
    if np.iscomplexobj(coeffs):
        return matrix @ coeffs.real + 1j * (matrix @ coeffs.imag)
    return matrix @ coeffs


def _adjoint_apply(matrix: np.ndarray, values: np.ndarray) -> np.ndarray:
    if _bit_reproducible:
        return (np.conj(matrix) * values[:, None]).sum(axis=0)
    if np.iscomplexobj(values):
        return matrix.T @ values.real + 1j * (matrix.T @ values.imag)
    return matrix.T @ values


@dataclass(eq=False)
class CoefficientSequence:
    """Framelet coefficients over one rule's nodes plus their spectrum."""

    rule: QuadratureRule
    spectral: SpectralVector | None
    _values: np.ndarray | None = None

    def __post_init__(self):
        if self._values is not None:
            self._values = np.ascontiguousarray(self._values, dtype=complex)
            if self._values.shape != (self.rule.size,):
                raise ValueError("values must match the rule's node count")
        elif self.spectral is None:
            raise ValueError("a sequence needs spectral data or explicit values")

    @property
    def level(self) -> int:
        if self.rule.level is None:
            raise ValueError("carrying rule has no level")
        return self.rule.level

    @property
    def values(self) -> np.ndarray:
        """Point values sqrt(w_k) * sum of spectrum * basis at node k."""
        if self._values is None:
            table = self.rule.weighted_basis(self.spectral.cutoff)
            self._values = _synthesize(table, self.spectral.coeffs)
        return self._values

    def __len__(self) -> int:
        return self.rule.size


@dataclass
class FrameletSystem:
    """A filter bank with one quadrature rule per level 0..J."""

    bank: FilterBank
    rules: list

    def __post_init__(self):
        for j, rule in enumerate(self.rules):
            if rule.level != j:
                raise ValueError(f"rule at position {j} carries level {rule.level}")
            if rule.kind == KIND_KRONECKER and rule.size != lattice_size(j):
                raise ValueError(
                    f"level-{j} lattice must have {lattice_size(j)} nodes"
                )
        residual = _filters.check_partition(self.bank, _PARTITION_GRID)
        if residual > PARTITION_TOL:
            raise ValueError(
                f"bank violates the partition identity (residual {residual:.3e})"
            )

    @property
    def J(self) -> int:
        return len(self.rules) - 1

    @property
    def r(self) -> int:
        return self.bank.r

    def rule(self, j: int) -> QuadratureRule:
        if not 0 <= j <= self.J:
            raise IndexError(f"no rule at level {j} (system has levels 0..{self.J})")
        return self.rules[j]


def kronecker_system(
    bank: FilterBank,
    levels: int,
    generator=_quadrature.DEFAULT_GENERATOR,
    shift=_quadrature.DEFAULT_SHIFT,
    strategy: str = "fold",
) -> FrameletSystem:
    """Framelet system over equal-weight Kronecker lattices for levels 0..levels."""
    rules = [
        _quadrature.kronecker_lattice(j, generator, shift, strategy)
        for j in range(levels + 1)
    ]
    return FrameletSystem(bank, rules)


def reference_system(bank: FilterBank, levels: int, degree: int | None = None) -> FrameletSystem:
    """Framelet system whose every level uses a polynomial-exact rule.

    Used as the oracle family; defaults to exactness degree 2 * degree_cutoff(levels).
    """
    if degree is None:
        degree = 2 * degree_cutoff(levels)
    base = _quadrature.gauss_reference_rule(degree)
    return FrameletSystem(bank, [base.with_level(j) for j in range(levels + 1)])


def _symbol_cutoff(symbol: SpectralSymbol, j: int, base_cutoff: int) -> int:
    """Largest degree the symbol can pass at scale j, capped by base_cutoff."""
    return min(base_cutoff, max_degree_within(2.0**j * symbol.support[1]))


def _filtered_spectrum(
    f: SpectralVector, symbol: SpectralSymbol, j: int, conjugate: bool = True
) -> SpectralVector:
    cut = _symbol_cutoff(symbol, j, f.cutoff)
    gains = symbol(lambda_vector(cut) / 2.0**j).astype(complex)
    if conjugate:
        gains = np.conj(gains)
    return SpectralVector(cut, gains * f.coeffs[: tri_dim(cut)])


def analyze_lowpass(sys: FrameletSystem, f: SpectralVector, j: int) -> CoefficientSequence:
    """Level-j low-pass framelet coefficients of a band-limited function."""
    return CoefficientSequence(
        sys.rule(j), _filtered_spectrum(f, sys.bank.scaling_low, j)
    )


def analyze(sys: FrameletSystem, f: SpectralVector, j: int):
    """Level-j low- and high-pass framelet coefficients of a band-limited function.

    The high-pass sequences live on the level-(j+1) rule, so j must be below
    the system's top level.
    """
    low = analyze_lowpass(sys, f, j)
    if j + 1 > sys.J:
        raise IndexError(
            f"high-pass analysis at level {j} needs the level-{j + 1} rule"
        )
    rule_hi = sys.rule(j + 1)
    highs = [
        CoefficientSequence(rule_hi, _filtered_spectrum(f, sym, j))
        for sym in sys.bank.scaling_highs
    ]
    return low, highs


def convolve(
    v: CoefficientSequence, symbol: SpectralSymbol, conjugate: bool = False
) -> CoefficientSequence:
    """Multiply the spectrum by symbol values at eigenvalue / 2**level.

    With conjugate=True this applies the adjoint mask; for the shipped
    real-valued bank conjugation is the identity but is applied regardless.
    """
    if v.spectral is None:
        raise ValueError("sequence carries no spectral representation")
    out = _filtered_spectrum(v.spectral, symbol, v.level, conjugate=conjugate)
    return CoefficientSequence(v.rule, out)


def downsample(sys: FrameletSystem, v: CoefficientSequence) -> CoefficientSequence:
    """Truncate the spectrum to eigenvalues <= 2**(j-1) and move one level down."""
    j = v.level
    if j < 1:
        raise ValueError("cannot downsample a level-0 sequence")
    if v.spectral is None:
        raise ValueError("sequence carries no spectral representation")
    cut = min(v.spectral.cutoff, max_degree_within(2.0 ** (j - 1)))
    return CoefficientSequence(sys.rule(j - 1), v.spectral.resized(cut))


def upsample(sys: FrameletSystem, v: CoefficientSequence) -> CoefficientSequence:
    """Truncate the spectrum to eigenvalues <= 2**(j-2) and move one level up."""
    j = v.level + 1
    if v.spectral is None:
        raise ValueError("sequence carries no spectral representation")
    cut = min(v.spectral.cutoff, max_degree_within(2.0 ** (j - 2)))
    return CoefficientSequence(sys.rule(j), v.spectral.resized(cut))


def decompose(sys: FrameletSystem, v: CoefficientSequence):
    """One-level decomposition: (low at level j-1, r highs on the level-j rule)."""
    j = v.level
    if j < 1:
        raise ValueError("cannot decompose below level 1")
    low = downsample(sys, convolve(v, sys.bank.low, conjugate=True))
    highs = [convolve(v, sym, conjugate=True) for sym in sys.bank.highs]
    return low, highs


def reconstruct(
    sys: FrameletSystem, low: CoefficientSequence, highs: Sequence[CoefficientSequence]
) -> CoefficientSequence:
    """Exact inverse of decompose on the carried spectra."""
    j = low.level + 1
    if len(highs) != sys.r:
        raise ValueError(f"expected {sys.r} high-pass sequences, got {len(highs)}")
    for h in highs:
        if h.level != j:
            raise ValueError(
                f"high-pass sequence at rule level {h.level}, expected {j}"
            )
    terms = [convolve(upsample(sys, low), sys.bank.low)]
    terms += [convolve(h, sym) for h, sym in zip(highs, sys.bank.highs)]
    cut = max(t.spectral.cutoff for t in terms)
    coeffs = np.zeros(tri_dim(cut), dtype=complex)
    for t in terms:
        coeffs[: tri_dim(t.spectral.cutoff)] += t.spectral.coeffs
    return CoefficientSequence(sys.rule(j), SpectralVector(cut, coeffs))


@dataclass
class FrameletTree:
    """Multi-level coefficient set: base low-pass plus details per level.

    details[j] holds the r high-pass sequences of framelet level j, carried
    by the level-(j+1) rule.
    """

    base: CoefficientSequence
    details: list

    @property
    def J(self) -> int:
        return len(self.details)

    @property
    def r(self) -> int:
        return len(self.details[0]) if self.details else 0

    def coefficient_count(self) -> int:
        total = len(self.base)
        for highs in self.details:
            total += sum(len(h) for h in highs)
        return total


def multilevel_decompose(sys: FrameletSystem, v: CoefficientSequence) -> FrameletTree:
    """Iterate decompose from the sequence's level down to level 0."""
    top = v.level
    if top < 1:
        raise ValueError("multilevel decomposition needs a level >= 1 input")
    details = [None] * top
    current = v
    for j in range(top, 0, -1):
        current, highs = decompose(sys, current)
        details[j - 1] = highs
    return FrameletTree(base=current, details=details)


def multilevel_reconstruct(sys: FrameletSystem, tree: FrameletTree) -> CoefficientSequence:
    """Iterate reconstruct from level 0 back up to the tree's top level."""
    current = tree.base
    for highs in tree.details:
        current = reconstruct(sys, current, highs)
    return current


def dft(u: SpectralVector, j: int, rule: QuadratureRule) -> np.ndarray:
    """Direct synthesis of a spectral vector onto the rule's nodes.

    Cost O(N * dim); the cutoff must fit the level-j spectral cap.
    """
    if u.cutoff > degree_cutoff(j):
        raise ValueError(
            f"cutoff {u.cutoff} exceeds level-{j} cap {degree_cutoff(j)}"
        )
    return _synthesize(rule.weighted_basis(u.cutoff), u.coeffs)


def adjoint_dft(values, j: int, rule: QuadratureRule) -> SpectralVector:
    """Adjoint of dft: weighted conjugate-basis sums over the nodes."""
    values = np.ascontiguousarray(values, dtype=complex)
    if values.shape != (rule.size,):
        raise ValueError(
            f"expected {rule.size} point values, got {values.shape}"
        )
    cut = degree_cutoff(j)
    return SpectralVector(cut, _adjoint_apply(rule.weighted_basis(cut), values))


def parseval_report(sys: FrameletSystem, f: SpectralVector, levels: int) -> dict:
    """Per-level energy balance of the frame.

    For each j < levels, compares the level-(j+1) low-pass energy against the
    level-j low-pass plus high-pass energies; the top entry compares the
    level-`levels` low-pass energy against the spectral norm of f.  With
    polynomial-exact rules the residuals vanish (to roundoff) whenever f is
    band-limited; the top residual additionally needs the band inside the
    flat region of the low-pass scaling symbol (cutoff <= degree_cutoff(levels - 1)).
    """
    if not 1 <= levels <= sys.J:
        raise ValueError(f"levels must lie in 1..{sys.J}")

    def energy(seq: CoefficientSequence) -> float:
        return float(np.vdot(seq.values, seq.values).real)

    low_energy = [energy(analyze_lowpass(sys, f, j)) for j in range(levels + 1)]
    rows = []
    for j in range(levels):
        _, highs = analyze(sys, f, j)
        high_energy = [energy(h) for h in highs]
        residual = abs(low_energy[j + 1] - low_energy[j] - sum(high_energy))
        rows.append(
            {
                "j": j,
                "low_next": low_energy[j + 1],
                "low": low_energy[j],
                "high": high_energy,
                "residual": residual,
            }
        )
    norm_sq = f.norm() ** 2
    return {
        "levels": rows,
        "top": {
            "low": low_energy[levels],
            "f_norm_sq": norm_sq,
            "residual": abs(low_energy[levels] - norm_sq),
        },
        "max_level_residual": max(row["residual"] for row in rows),
    }


def _framelet_coefficients(
    sys: FrameletSystem, kind: str, j: int, k: int, n: int
) -> SpectralVector:
    """Spectral expansion of one framelet: symbol gains times the conjugated
    weighted basis row at its translation node."""
    if kind == "low":
        rule = sys.rule(j)
        symbol = sys.bank.scaling_low
    elif kind == "high":
        if not 1 <= n <= sys.r:
            raise IndexError(f"high-pass channel {n} out of range 1..{sys.r}")
        rule = sys.rule(j + 1)
        symbol = sys.bank.scaling_highs[n - 1]
    else:
        raise ValueError(f"kind must be 'low' or 'high', got {kind!r}")
    if not 0 <= k < rule.size:
        raise IndexError(f"node index {k} out of range for {rule.size} nodes")
    cut = max_degree_within(2.0**j * symbol.support[1])
    gains = symbol(lambda_vector(cut) / 2.0**j)
    row = rule.weighted_basis(cut)[k]
    return SpectralVector(cut, gains * np.conj(row))


def framelet_eval(
    sys: FrameletSystem, kind: str, j: int, k: int, x, n: int = 1
) -> float:
    """Value at x of the level-j framelet translated at node k.

    kind "low" uses the level-j rule; kind "high" (channel n) uses the
    level-(j+1) rule.  Real-valued for the shipped bank.
    """
    coeffs = _framelet_coefficients(sys, kind, j, k, n)
    row = basis_matrix(np.asarray(x, dtype=float).reshape(1, 2), coeffs.cutoff)[0]
    return float(np.real(row @ coeffs.coeffs))


def framelet_values(
    sys: FrameletSystem,
    kind: str,
    j: int,
    k: int,
    points,
    n: int = 1,
    chunk: int = 4096,
) -> np.ndarray:
    """framelet_eval over many points, evaluated in chunks."""
    coeffs = _framelet_coefficients(sys, kind, j, k, n)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.empty(pts.shape[0])
    for start in range(0, pts.shape[0], chunk):
        block = pts[start : start + chunk]
        out[start : start + chunk] = np.real(
            basis_matrix(block, coeffs.cutoff) @ coeffs.coeffs
        )
    return out


def triangle_grid(resolution: int) -> np.ndarray:
    """Uniform resolution x resolution grid on [0,1]^2 clipped to the triangle."""
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    axis = np.linspace(0.0, 1.0, resolution)
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    pts = np.stack((xx.ravel(), yy.ravel()), axis=1)
    return pts[pts.sum(axis=1) <= 1.0]


def relative_difference(a: CoefficientSequence, b: CoefficientSequence) -> float:
    """Max of spectral and point-value deviations, relative to the larger norm."""
    cut = max(a.spectral.cutoff, b.spectral.cutoff)
    sa = a.spectral.resized(cut).coeffs
    sb = b.spectral.resized(cut).coeffs
    scale = max(
        np.abs(sa).max(initial=0.0),
        np.abs(sb).max(initial=0.0),
        np.abs(a.values).max(initial=0.0),
        np.abs(b.values).max(initial=0.0),
        np.finfo(float).tiny,
    )
    spectral_err = np.abs(sa - sb).max(initial=0.0)
    value_err = (
        np.abs(a.values - b.values).max(initial=0.0)
        if a.values.shape == b.values.shape
        else np.inf
    )
    return float(max(spectral_err, value_err) / scale)


def _complex_pairs(arr: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(arr, dtype=complex)]


def _pairs_to_array(pairs) -> np.ndarray:
    data = np.asarray(pairs, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValueError("expected a list of [re, im] pairs")
    return data[:, 0] + 1j * data[:, 1]


def _rule_ref(rule: QuadratureRule) -> str:
    return f"{rule.kind}/{rule.level}"


def sequence_to_dict(seq: CoefficientSequence, channel: str = "low", j: int | None = None, n: int | None = None) -> dict:
    doc = {
        "channel": channel,
        "j": seq.level if j is None else j,
        "rule_ref": _rule_ref(seq.rule),
        "v": _complex_pairs(seq.values),
        "spectral": {
            "cutoff": seq.spectral.cutoff,
            "coeffs": _complex_pairs(seq.spectral.coeffs),
        },
    }
    if n is not None:
        doc["n"] = n
    return doc


def sequence_from_dict(doc: dict, sys: FrameletSystem) -> CoefficientSequence:
    level = int(doc["rule_ref"].rsplit("/", 1)[1])
    rule = sys.rule(level)
    spectral = SpectralVector(
        int(doc["spectral"]["cutoff"]), _pairs_to_array(doc["spectral"]["coeffs"])
    )
    return CoefficientSequence(rule, spectral, _pairs_to_array(doc["v"]))


def tree_to_dict(tree: FrameletTree) -> dict:
    levels = [sequence_to_dict(tree.base, channel="low", j=0)]
    for j, highs in enumerate(tree.details):
        for n, seq in enumerate(highs, start=1):
            levels.append(sequence_to_dict(seq, channel="high", j=j, n=n))
    return {"J": tree.J, "r": tree.r, "levels": levels}


def tree_from_dict(doc: dict, sys: FrameletSystem) -> FrameletTree:
    J = int(doc["J"])
    r = int(doc["r"])
    if J > sys.J:
        raise ValueError(f"tree top level {J} exceeds system level {sys.J}")
    base = None
    details = [[None] * r for _ in range(J)]
    for entry in doc["levels"]:
        seq = sequence_from_dict(entry, sys)
        if entry["channel"] == "low":
            base = seq
        else:
            details[int(entry["j"])][int(entry["n"]) - 1] = seq
    if base is None or any(h is None for highs in details for h in highs):
        raise ValueError("coefficient tree is missing entries")
    return FrameletTree(base=base, details=details)
