"""Diagonalization, eigenvector fractal dimensions, and windowed spectral statistics.

The localization measure is the Shannon-entropy fractal dimension of an
eigenvector over its construction basis,

    D1 = -(1/log D) sum_a |psi_a|^2 log |psi_a|^2  in [0, 1],

with D the dimension of that basis (the sector dimension when working inside
a parity sector). Ergodic eigenstates push D1 towards the Gaussian orthogonal
ensemble value while their state-to-state fluctuations collapse; both are
resolved here per spectral window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from .errors import CapacityError, EdgeSolverError, NumericalError
from .hamiltonian import SparseHamiltonian

#: Largest dimension accepted by the dense eigensolver.
DENSE_EIG_CAP = 50_000

#: Below this size the spectrum edges come from the dense solver directly.
_EDGE_DENSE_CUTOFF = 600


@dataclass(frozen=True)
class SpectralData:
    """Full eigendecomposition of one Hamiltonian."""

    hamiltonian: SparseHamiltonian
    energies: np.ndarray   # ascending
    vectors: np.ndarray    # column k is the eigenvector of energies[k]

    @property
    def dim(self) -> int:
        return self.energies.shape[0]

    @property
    def e_min(self) -> float:
        return float(self.energies[0])

    @property
    def e_max(self) -> float:
        return float(self.energies[-1])

    @property
    def width(self) -> float:
        return self.e_max - self.e_min


def diagonalize(ham: SparseHamiltonian, dense_cap: int = DENSE_EIG_CAP) -> SpectralData:
    """Dense symmetric eigendecomposition; capped to keep memory sane."""
    if ham.dim > dense_cap:
        raise CapacityError(
            f"dimension {ham.dim} exceeds the dense cap {dense_cap}; "
            "use spectrum_edges and the propagation workflow instead")
    energies, vectors = sla.eigh(ham.dense())
    return SpectralData(ham, energies, vectors)


def spectrum_edges(ham: SparseHamiltonian, tol: float = 1e-8,
                   maxiter: int | None = None) -> tuple[float, float]:
    """Extremal eigenvalues (E_min, E_max).

    Exact for diagonal Hamiltonians (J = 0) and for small dimensions; larger
    problems use the iterative Lanczos solver with a deterministic start
    vector.
    """
    if ham.j == 0.0:
        diag = ham.u * ham.h_int
        return float(diag.min()), float(diag.max())
    if ham.dim <= _EDGE_DENSE_CUTOFF:
        energies = sla.eigvalsh(ham.dense())
        return float(energies[0]), float(energies[-1])

    mat = ham.matrix()
    v0 = np.full(ham.dim, 1.0 / np.sqrt(ham.dim))
    if maxiter is None:
        maxiter = max(10_000, 20 * ham.dim)
    edges = []
    for which in ("SA", "LA"):
        try:
            vals = spla.eigsh(mat, k=1, which=which, v0=v0,
                              maxiter=maxiter, tol=tol,
                              return_eigenvectors=False)
        except spla.ArpackNoConvergence as exc:
            raise EdgeSolverError(
                f"edge solver did not converge for which={which}",
                diagnostics={"which": which, "dim": ham.dim,
                             "maxiter": maxiter, "tol": tol,
                             "converged": list(map(float, exc.eigenvalues))},
            ) from exc
        edges.append(float(vals[0]))
    return edges[0], edges[1]


def scaled_energy(energy: float, spec: SpectralData) -> float:
    """eps = (E - E_min)/(E_max - E_min)."""
    width = spec.width
    if width <= 0:
        raise NumericalError("spectrum width is degenerate; scaled energy undefined")
    return (energy - spec.e_min) / width


# --------------------------------------------------------------------------
# fractal dimension
# --------------------------------------------------------------------------

def _entropy(prob: np.ndarray) -> np.ndarray:
    """Shannon entropy along axis 0; zero-probability entries contribute zero."""
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(prob > 0.0, prob * np.log(prob), 0.0)
    return -plogp.sum(axis=0)


def fractal_dimension(vec: np.ndarray, basis_size: int | None = None) -> float:
    """D1 of a normalized state vector over its basis."""
    v = np.asarray(vec)
    size = basis_size if basis_size is not None else v.shape[0]
    if size < 2:
        raise ValueError("basis size must be at least 2")
    prob = np.abs(v) ** 2
    norm = prob.sum()
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"state is not normalized (|v|^2 = {norm}); refusing to rescale")
    return float(_entropy(prob[:, None])[0] / np.log(size))


def fractal_dimensions(vectors: np.ndarray, basis_size: int | None = None) -> np.ndarray:
    """D1 for every column of an eigenvector matrix."""
    size = basis_size if basis_size is not None else vectors.shape[0]
    prob = np.abs(vectors) ** 2
    return _entropy(prob) / np.log(size)


def goe_d1_asymptotic(dim: int) -> float:
    """Large-dim GOE mean of D1: 1 - (2 - euler_gamma - ln 2)/ln(dim)."""
    return 1.0 - (2.0 - np.euler_gamma - np.log(2.0)) / np.log(dim)


@dataclass(frozen=True)
class GOEReference:
    """Sampled GOE eigenvector statistics of D1 at fixed dimension."""

    dim: int
    samples: int
    seed: int
    mean_d1: float
    var_d1: float


def goe_reference(dim: int, samples: int = 10_000, seed: int = 7,
                  batch: int = 256) -> GOEReference:
    """Sample D1 over unit-norm Gaussian vectors (the GOE eigenvector ensemble)."""
    rng = np.random.default_rng(seed)
    values = np.empty(samples)
    done = 0
    while done < samples:
        take = min(batch, samples - done)
        g = rng.standard_normal((dim, take))
        prob = g * g
        prob /= prob.sum(axis=0)
        values[done:done + take] = _entropy(prob) / np.log(dim)
        done += take
    return GOEReference(dim, samples, seed,
                        float(values.mean()), float(values.var()))


# --------------------------------------------------------------------------
# windowed statistics
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class EqualWidthWindows:
    """Fixed number of windows of constant width in scaled energy."""

    count: int = 100


@dataclass(frozen=True)
class NearestEnergyWindows:
    """Consecutive blocks of ``size`` eigenstates ordered by distance to e_ref.

    Window 0 holds the ``size`` states closest in energy to the reference;
    ties are broken towards the lower eigenvalue index, so the union of the
    first k windows is always a prefix of the distance-sorted spectrum.
    """

    e_ref: float
    size: int = 100


@dataclass(frozen=True)
class FractalStatistics:
    """Per-window mean and variance of D1, plus the raw per-state values."""

    scheme: EqualWidthWindows | NearestEnergyWindows
    window_id: np.ndarray
    label: np.ndarray       # eps window center, or spectrum percentage covered
    label_name: str
    mean_d1: np.ndarray
    var_d1: np.ndarray
    count: np.ndarray
    d1: np.ndarray          # per-eigenstate values, spectrum order

    @property
    def n_windows(self) -> int:
        return self.window_id.shape[0]


def windowed_statistics(spec: SpectralData,
                        scheme: EqualWidthWindows | NearestEnergyWindows,
                        d1: np.ndarray | None = None) -> FractalStatistics:
    """Aggregate eigenvector D1 over spectral windows."""
    if d1 is None:
        d1 = fractal_dimensions(spec.vectors)
    dim = spec.dim

    if isinstance(scheme, EqualWidthWindows):
        count = scheme.count
        if count < 1:
            raise ValueError("window count must be positive")
        eps = (spec.energies - spec.e_min) / spec.width
        idx = np.minimum((eps * count).astype(np.int64), count - 1)
        groups = [np.nonzero(idx == w)[0] for w in range(count)]
        label = (np.arange(count) + 0.5) / count
        label_name = "eps_center"
        window_id = np.arange(count)
    elif isinstance(scheme, NearestEnergyWindows):
        size = scheme.size
        if size < 1:
            raise ValueError("window size must be positive")
        if size > dim:
            raise ValueError(f"window of {size} states exceeds spectrum size {dim}")
        order = np.argsort(np.abs(spec.energies - scheme.e_ref), kind="stable")
        n_windows = int(np.ceil(dim / size))
        groups = [order[w * size:(w + 1) * size] for w in range(n_windows)]
        covered = np.cumsum([len(g) for g in groups])
        start = covered - np.array([len(g) for g in groups])
        label = 100.0 * (start + np.array([len(g) for g in groups]) / 2.0) / dim
        label_name = "spectrum_percentage"
        window_id = np.arange(n_windows)
    else:
        raise TypeError(f"unknown window scheme {type(scheme).__name__}")

    means = np.full(len(groups), np.nan)
    variances = np.full(len(groups), np.nan)
    counts = np.zeros(len(groups), dtype=np.int64)
    for w, sel in enumerate(groups):
        counts[w] = sel.size
        if sel.size:
            means[w] = float(np.mean(d1[sel]))
            variances[w] = float(np.var(d1[sel]))
    return FractalStatistics(scheme, window_id, np.asarray(label, dtype=np.float64),
                             label_name, means, variances, counts, d1)
