import numpy as np
import pytest

from triframe.basis import SpectralVector, tri_dim
from triframe.filters import default_bank


@pytest.fixture(scope="session")
def bank():
    return default_bank()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_spectral(cutoff: int, rng: np.random.Generator) -> SpectralVector:
    """Dense complex spectral vector with unit-scale Gaussian entries."""
    dim = tri_dim(cutoff)
    return SpectralVector(
        cutoff, rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    )


def spectral_max_diff(a: SpectralVector, b: SpectralVector) -> float:
    """Max absolute entry difference after aligning cutoffs."""
    cut = max(a.cutoff, b.cutoff)
    return float(np.abs(a.resized(cut).coeffs - b.resized(cut).coeffs).max())
