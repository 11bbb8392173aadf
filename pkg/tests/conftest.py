"""Shared builders for randomized test instances."""
import numpy as np
import pytest

from biphoton_sim import (
    FrequencyGrid,
    ProcessType,
    SchmidtSpectrum,
    SqueezingSpectrum,
    build_covariance_exact,
)


def random_orthonormal(rng, n, k):
    """k orthonormal complex columns over an n-point grid (symmetrized space)."""
    a = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    q, _ = np.linalg.qr(a)
    return q


def random_schmidt(rng, n=14, n_modes=4, grid_span=4.0):
    """A random discretized Schmidt spectrum with orthonormal modes."""
    grid = FrequencyGrid.uniform(-grid_span, grid_span, n)
    lam = rng.uniform(0.2, 1.0, n_modes)
    lam = np.sort(lam / lam.sum())[::-1]
    sqw = np.sqrt(grid.weights)
    u = random_orthonormal(rng, n, n_modes) / sqw[:, None]
    v = random_orthonormal(rng, n, n_modes) / sqw[:, None]
    return SchmidtSpectrum(
        np.sqrt(lam),
        truncation_tail=0.0,
        modes_signal=u,
        modes_idler=v,
        grid_signal=grid,
        grid_idler=grid,
    )


def random_covariance(rng, process=ProcessType.TYPE_II, gain=0.6, **kwargs):
    schmidt = random_schmidt(rng, **kwargs)
    gamma = build_covariance_exact(schmidt, gain, process)
    spectrum = SqueezingSpectrum.from_schmidt(schmidt, gain, process)
    return gamma, spectrum, schmidt


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
