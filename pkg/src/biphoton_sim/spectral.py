"""Joint-spectral-amplitude models, discretization and Schmidt analysis.

Frequencies are angular (rad/s) or dimensionless detunings around a carrier;
only relative scales matter for every quantity computed downstream.  Kernels
carry dimension 1/frequency so that the discretized joint spectral density
sums to one under the grid quadrature.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GridCoverageError",
    "FrequencyGrid",
    "GaussianJsaModel",
    "DiscretizedJsa",
    "SchmidtSpectrum",
    "default_grids",
    "build_gaussian_jsa",
    "analytic_gaussian_schmidt",
    "gaussian_schmidt_number",
    "schmidt_decompose",
    "marginals",
    "schmidt_number",
    "load_jsa_csv",
    "save_jsa_csv",
]


class GridCoverageError(ValueError):
    """The frequency grid does not capture enough of the spectral mass."""


def _frozen_array(x, dtype=float) -> np.ndarray:
    arr = np.array(x, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FrequencyGrid:
    """Ordered frequency samples with quadrature weights.

    points : strictly increasing angular frequencies (or detunings)
    weights: positive quadrature weights, same units as points
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", _frozen_array(self.points))
        object.__setattr__(self, "weights", _frozen_array(self.weights))
        if self.points.ndim != 1 or self.points.size < 2:
            raise ValueError("a frequency grid needs at least 2 ordered points")
        if self.weights.shape != self.points.shape:
            raise ValueError("weights must match points")
        if not np.all(np.diff(self.points) > 0):
            raise ValueError("grid points must be strictly increasing")
        if not np.all(self.weights > 0):
            raise ValueError("quadrature weights must be strictly positive")

    @classmethod
    def uniform(cls, lo: float, hi: float, n: int) -> "FrequencyGrid":
        """Uniform grid on [lo, hi] with trapezoidal weights."""
        points = np.linspace(lo, hi, n)
        h = (hi - lo) / (n - 1)
        weights = np.full(n, h)
        weights[0] = weights[-1] = h / 2
        return cls(points, weights)

    @property
    def n(self) -> int:
        return self.points.size

    @property
    def spacing(self) -> float:
        """Grid spacing; raises if the grid is not uniform."""
        d = np.diff(self.points)
        if not np.allclose(d, d[0], rtol=1e-12, atol=0):
            raise ValueError("grid is not uniform")
        return float(d[0])

    def same_points(self, other: "FrequencyGrid") -> bool:
        return self.points.shape == other.points.shape and np.array_equal(
            self.points, other.points
        )


@dataclass(frozen=True)
class GaussianJsaModel:
    """2D Gaussian joint spectral amplitude.

    delta_plus / delta_minus are the standard deviations of the joint spectral
    density along the diagonal and anti-diagonal of the (signal, idler) plane.
    The entanglement of the model is set entirely by the aspect ratio
    delta_minus / delta_plus.
    """

    delta_plus: float
    delta_minus: float
    center_signal: float = 0.0
    center_idler: float = 0.0

    def __post_init__(self):
        if self.delta_plus <= 0 or self.delta_minus <= 0:
            raise ValueError("delta_plus and delta_minus must be positive")

    @property
    def aspect_ratio(self) -> float:
        return self.delta_minus / self.delta_plus


@dataclass(frozen=True)
class DiscretizedJsa:
    """JSA samples psi(w_s, w_i) on a rectangular grid.

    The quadrature-weighted squared norm is one:
    sum_mn w_m w_n |psi_mn|^2 = 1 (within 1e-10).
    """

    grid_signal: FrequencyGrid
    grid_idler: FrequencyGrid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values, dtype=complex))
        if self.values.shape != (self.grid_signal.n, self.grid_idler.n):
            raise ValueError("values shape must be (n_signal, n_idler)")
        norm = self.quadrature_norm()
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"JSA not normalized: quadrature norm {norm!r}")

    def quadrature_norm(self) -> float:
        w_s = self.grid_signal.weights
        w_i = self.grid_idler.weights
        return float(np.einsum("m,n,mn->", w_s, w_i, np.abs(self.values) ** 2))

    def symmetrized(self) -> np.ndarray:
        """Weight-symmetrized kernel matrix sqrt(w_s) psi sqrt(w_i)."""
        return (
            np.sqrt(self.grid_signal.weights)[:, None]
            * self.values
            * np.sqrt(self.grid_idler.weights)[None, :]
        )


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Schmidt coefficients sqrt(lambda_j), descending, with optional modes.

    Modes, when present, are orthonormal under the grid quadrature and stored
    de-symmetrized (plain function samples).  truncation_tail bounds the sum
    of all discarded lambda_j, so sum(lambda) + truncation_tail = 1.
    """

    coefficients: np.ndarray
    truncation_tail: float = 0.0
    modes_signal: np.ndarray | None = None
    modes_idler: np.ndarray | None = None
    grid_signal: FrequencyGrid | None = None
    grid_idler: FrequencyGrid | None = None

    def __post_init__(self):
        object.__setattr__(self, "coefficients", _frozen_array(self.coefficients))
        c = self.coefficients
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must be a non-empty 1-D array")
        if np.any(c < 0):
            raise ValueError("Schmidt coefficients must be non-negative")
        if np.any(np.diff(c) > 0):
            raise ValueError("Schmidt coefficients must be sorted descending")
        if self.truncation_tail < 0:
            raise ValueError("truncation_tail must be non-negative")
        total = float(np.sum(c**2)) + self.truncation_tail
        if abs(total - 1.0) > 1e-8:
            raise ValueError(f"sum(lambda) + truncation_tail = {total!r}, expected 1")
        for m, g in ((self.modes_signal, self.grid_signal), (self.modes_idler, self.grid_idler)):
            if m is not None:
                if g is None:
                    raise ValueError("modes require their grid")
                if m.shape != (g.n, c.size):
                    raise ValueError("mode array shape must be (n_grid, n_modes)")

    @property
    def lambdas(self) -> np.ndarray:
        return self.coefficients**2

    @property
    def has_modes(self) -> bool:
        return self.modes_signal is not None and self.modes_idler is not None


def default_grids(
    model: GaussianJsaModel,
    extent_sigmas: float = 6.0,
    points_per_width: float = 8.0,
) -> tuple[FrequencyGrid, FrequencyGrid]:
    """Symmetric uniform grids adequate for `model`.

    The half-width covers `extent_sigmas` standard deviations along both
    rotated principal axes; the spacing resolves the narrower of the two
    widths with `points_per_width` points.
    """
    half = extent_sigmas * (model.delta_plus + model.delta_minus) / math.sqrt(2.0)
    h = min(model.delta_plus, model.delta_minus) / points_per_width
    m = int(math.ceil(half / h))
    n = 2 * m + 1
    grid_s = FrequencyGrid.uniform(model.center_signal - m * h, model.center_signal + m * h, n)
    grid_i = FrequencyGrid.uniform(model.center_idler - m * h, model.center_idler + m * h, n)
    return grid_s, grid_i


def _coverage_check(model: GaussianJsaModel, grid_s: FrequencyGrid, grid_i: FrequencyGrid):
    d_s = min(model.center_signal - grid_s.points[0], grid_s.points[-1] - model.center_signal)
    d_i = min(model.center_idler - grid_i.points[0], grid_i.points[-1] - model.center_idler)
    # the rotated +-5 sigma box has corners at (5 dp + 5 dm)/sqrt(2) from center
    corner = 5.0 * (model.delta_plus + model.delta_minus) / math.sqrt(2.0)
    if min(d_s, d_i) < corner:
        raise GridCoverageError(
            "grid does not cover 5 standard deviations along both rotated axes"
        )
    # union bound on the analytic density mass outside the rectangle
    sig_marg = math.sqrt((model.delta_plus**2 + model.delta_minus**2) / 2.0)
    tails = 0.0
    for d in (
        model.center_signal - grid_s.points[0],
        grid_s.points[-1] - model.center_signal,
        model.center_idler - grid_i.points[0],
        grid_i.points[-1] - model.center_idler,
    ):
        tails += 0.5 * math.erfc(d / (math.sqrt(2.0) * sig_marg))
    if tails > 1e-8:
        raise GridCoverageError(
            f"estimated spectral mass outside the grid is {tails:.3e} (limit 1e-8)"
        )


def build_gaussian_jsa(
    model: GaussianJsaModel, grid_s: FrequencyGrid, grid_i: FrequencyGrid
) -> DiscretizedJsa:
    """Sample the 2D Gaussian amplitude and normalize it on the grid."""
    _coverage_check(model, grid_s, grid_i)
    ws = grid_s.points - model.center_signal
    wi = grid_i.points - model.center_idler
    wp = (ws[:, None] + wi[None, :]) / math.sqrt(2.0)
    wm = (ws[:, None] - wi[None, :]) / math.sqrt(2.0)
    vals = np.exp(
        -(wp**2) / (4.0 * model.delta_plus**2) - (wm**2) / (4.0 * model.delta_minus**2)
    ).astype(complex)
    norm = np.einsum("m,n,mn->", grid_s.weights, grid_i.weights, np.abs(vals) ** 2)
    vals /= math.sqrt(float(norm.real))
    return DiscretizedJsa(grid_s, grid_i, vals)


def analytic_gaussian_schmidt(aspect_ratio: float, j_max: int) -> SchmidtSpectrum:
    """Closed-form Schmidt spectrum of the 2D Gaussian model.

    lambda_j = (1 - z) z^(j-1) with z = ((r - 1)/(r + 1))^2; the spectrum is
    invariant under r -> 1/r.  The tail of the geometric series beyond j_max
    is returned as truncation_tail.
    """
    if aspect_ratio <= 0:
        raise ValueError("aspect_ratio must be positive")
    if j_max < 1:
        raise ValueError("j_max must be at least 1")
    zeta = (aspect_ratio - 1.0) / (aspect_ratio + 1.0)
    z = zeta * zeta
    j = np.arange(j_max, dtype=float)
    lam = (1.0 - z) * np.power(z, j)
    return SchmidtSpectrum(np.sqrt(lam), truncation_tail=float(z**j_max))


def gaussian_schmidt_number(aspect_ratio: float) -> float:
    """Closed-form Schmidt number (1 + z)/(1 - z) of the Gaussian model."""
    zeta = (aspect_ratio - 1.0) / (aspect_ratio + 1.0)
    z = zeta * zeta
    return (1.0 + z) / (1.0 - z)


def schmidt_decompose(
    jsa: DiscretizedJsa,
    rank: int | None = None,
    lambda_floor: float = 1e-16,
    want_modes: bool = True,
) -> SchmidtSpectrum:
    """SVD of the weight-symmetrized kernel.

    Returns the top `rank` coefficients if given, otherwise all with
    lambda_j >= lambda_floor; everything below goes into truncation_tail.
    Modes come back de-symmetrized and are orthonormal under the grid
    quadrature; pass want_modes=False to skip them (much faster for large
    grids when only the coefficients matter).
    """
    a = jsa.symmetrized()
    if want_modes:
        u, s, vh = np.linalg.svd(a, full_matrices=False)
    else:
        s = np.linalg.svd(a, compute_uv=False)
    lam = s**2
    if rank is not None:
        if rank < 1:
            raise ValueError("rank must be at least 1")
        keep = min(rank, s.size)
    else:
        keep = max(1, int(np.count_nonzero(lam >= lambda_floor)))
    tail = max(0.0, 1.0 - float(np.sum(lam[:keep])))
    if not want_modes:
        return SchmidtSpectrum(s[:keep], truncation_tail=tail)
    modes_s = u[:, :keep] / np.sqrt(jsa.grid_signal.weights)[:, None]
    modes_i = vh[:keep, :].conj().T / np.sqrt(jsa.grid_idler.weights)[:, None]
    return SchmidtSpectrum(
        s[:keep],
        truncation_tail=tail,
        modes_signal=modes_s,
        modes_idler=modes_i,
        grid_signal=jsa.grid_signal,
        grid_idler=jsa.grid_idler,
    )


def marginals(jsa: DiscretizedJsa) -> tuple[np.ndarray, np.ndarray]:
    """Signal and idler spectral densities on their grids; each integrates to 1."""
    dens = np.abs(jsa.values) ** 2
    psi_s = dens @ jsa.grid_idler.weights
    psi_i = jsa.grid_signal.weights @ dens
    return psi_s, psi_i


def schmidt_number(spectrum: SchmidtSpectrum) -> float:
    """Entanglement measure 1 / sum(lambda_j^2); equals J for J equal modes."""
    lam2 = np.sum(spectrum.lambdas**2)
    if lam2 == 0:
        raise ValueError("all-zero Schmidt spectrum")
    return float(1.0 / lam2)


def save_jsa_csv(jsa: DiscretizedJsa, path) -> None:
    """Write `omega_s,omega_i,re_psi,im_psi` rows for the full grid product."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["omega_s", "omega_i", "re_psi", "im_psi"])
        for m, ws in enumerate(jsa.grid_signal.points):
            for n, wi in enumerate(jsa.grid_idler.points):
                v = jsa.values[m, n]
                writer.writerow(
                    [f"{ws:.17g}", f"{wi:.17g}", f"{v.real:.17g}", f"{v.imag:.17g}"]
                )


def _trapezoid_weights(points: np.ndarray) -> np.ndarray:
    w = np.empty_like(points)
    w[1:-1] = (points[2:] - points[:-2]) / 2.0
    w[0] = (points[1] - points[0]) / 2.0
    w[-1] = (points[-1] - points[-2]) / 2.0
    return w


def load_jsa_csv(path) -> DiscretizedJsa:
    """Read a JSA written by `save_jsa_csv`; the grid is inferred.

    The sample set must form a complete rectangle over the unique sorted
    signal and idler frequencies.
    """
    ws, wi, re, im = [], [], [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header] != ["omega_s", "omega_i", "re_psi", "im_psi"]:
            raise ValueError("unexpected JSA CSV header")
        for row in reader:
            if not row:
                continue
            ws.append(float(row[0]))
            wi.append(float(row[1]))
            re.append(float(row[2]))
            im.append(float(row[3]))
    ws = np.asarray(ws)
    wi = np.asarray(wi)
    pts_s = np.unique(ws)
    pts_i = np.unique(wi)
    if ws.size != pts_s.size * pts_i.size:
        raise ValueError("JSA CSV is not a complete rectangular grid")
    vals = np.full((pts_s.size, pts_i.size), np.nan + 0j)
    idx_s = np.searchsorted(pts_s, ws)
    idx_i = np.searchsorted(pts_i, wi)
    vals[idx_s, idx_i] = np.asarray(re) + 1j * np.asarray(im)
    if np.any(np.isnan(vals)):
        raise ValueError("JSA CSV is not a complete rectangular grid")
    grid_s = FrequencyGrid(pts_s, _trapezoid_weights(pts_s))
    grid_i = FrequencyGrid(pts_i, _trapezoid_weights(pts_i))
    return DiscretizedJsa(grid_s, grid_i, vals)
