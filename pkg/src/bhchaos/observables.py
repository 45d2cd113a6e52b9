"""Local observables on propagated states and their time-domain statistics.

All observables here are diagonal in the occupation basis, so a state in a
parity sector never has to be expanded back to the full Fock basis: a
symmetrized member built from the pair (n, Pi n) contributes the label-average
(n_j + (Pi n)_j)/2 to every site density, and cross terms between distinct
members vanish identically for diagonal operators.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from .basis import FockBasis, ParityBasis
from .errors import NumericalError

_CONSERVATION_TOL = 1e-8


def central_site(n_sites: int) -> int:
    """1-indexed label floor(L/2) of the measured central site (the closest
    site from the left of the chain center, even and odd L alike)."""
    return n_sites // 2


def density_view(basis: FockBasis | ParityBasis) -> np.ndarray:
    """(dim, L) matrix whose row m is the site-occupancy profile of basis
    member m; densities are probability-weighted sums of these rows."""
    if isinstance(basis, ParityBasis):
        a, b = basis.member_states()
        return 0.5 * (a.astype(np.float64) + b.astype(np.float64))
    return basis.states.astype(np.float64)


def _site_moment_views(basis, site0: int) -> tuple[np.ndarray, np.ndarray]:
    """First and second moments of the occupation at one (0-based) site."""
    if isinstance(basis, ParityBasis):
        a, b = basis.member_states()
        na = a[:, site0].astype(np.float64)
        nb = b[:, site0].astype(np.float64)
        return 0.5 * (na + nb), 0.5 * (na ** 2 + nb ** 2)
    n = basis.states[:, site0].astype(np.float64)
    return n, n ** 2


def _probabilities(vec: np.ndarray) -> np.ndarray:
    """Measurement weights |psi_m|^2, normalized so diagonal expectation
    values are insensitive to the propagator's residual norm drift."""
    prob = np.abs(np.asarray(vec)) ** 2
    return prob / prob.sum()


def site_densities(basis, vec: np.ndarray) -> np.ndarray:
    """Expectation values <n_j> for every site."""
    return _probabilities(vec) @ density_view(basis)


def central_site_stats(basis, vec: np.ndarray) -> tuple[float, float]:
    """(<n_c>, <n_c^2> - <n_c>^2) at the central site."""
    prob = _probabilities(vec)
    site0 = central_site(basis.n_sites) - 1
    first, second = _site_moment_views(basis, site0)
    mean = float(prob @ first)
    return mean, float(prob @ second) - mean ** 2


def cloud_width(densities: np.ndarray) -> float:
    """Standard deviation of the density profile, normalized so a uniform
    profile gives exactly 1."""
    rho = np.asarray(densities, dtype=np.float64)
    n_sites = rho.shape[0]
    total = rho.sum()
    positions = np.arange(1, n_sites + 1, dtype=np.float64)
    center = (n_sites + 1) / 2.0
    second = np.sum((rho / total) * (positions - center) ** 2)
    sigma_uniform = np.sqrt((n_sites ** 2 - 1) / 12.0)
    return float(np.sqrt(second) / sigma_uniform)


def homogeneity_deficit(densities: np.ndarray, density: float) -> float:
    """Mean square deviation of the profile from the uniform value n."""
    rho = np.asarray(densities, dtype=np.float64)
    return float(np.mean((rho - density) ** 2))


@dataclass
class TimeSeries:
    """Sampled local observables along one evolution."""

    times: np.ndarray
    densities: np.ndarray   # (T, L)
    n_central: np.ndarray
    var_central: np.ndarray  # on-site number fluctuations at the central site
    sigma: np.ndarray        # normalized cloud width
    f: np.ndarray            # homogeneity deficit
    meta: dict = field(default_factory=dict)

    @property
    def n_sites(self) -> int:
        return self.densities.shape[1]


def build_time_series(basis, snapshots, density: float,
                      meta: dict | None = None) -> TimeSeries:
    """Measure every snapshot of an evolution (an iterable of (tau, state)).

    Particle conservation is enforced at each sample; a violation indicates a
    propagation failure upstream.
    """
    dens_rows = density_view(basis)
    site0 = central_site(basis.n_sites) - 1
    first, second = _site_moment_views(basis, site0)
    n_total = float(basis.n_particles)

    times, profiles, ncs, dnc2s, sigmas, fs = [], [], [], [], [], []
    for tau, state in snapshots:
        prob = _probabilities(state)
        rho = prob @ dens_rows
        if abs(rho.sum() - n_total) > _CONSERVATION_TOL:
            raise NumericalError(
                f"particle number {rho.sum()} != {n_total} at tau = {tau}")
        mean_c = float(prob @ first)
        times.append(tau)
        profiles.append(rho)
        ncs.append(mean_c)
        dnc2s.append(float(prob @ second) - mean_c ** 2)
        sigmas.append(cloud_width(rho))
        fs.append(homogeneity_deficit(rho, density))
    return TimeSeries(np.asarray(times), np.asarray(profiles), np.asarray(ncs),
                      np.asarray(dnc2s), np.asarray(sigmas), np.asarray(fs),
                      meta or {})


# --------------------------------------------------------------------------
# time-domain statistics
# --------------------------------------------------------------------------

def _window(times: np.ndarray, t_i: float, t_f: float) -> np.ndarray:
    if t_f <= t_i:
        raise ValueError("need t_f > t_i")
    if times[0] > t_i + 1e-9 or times[-1] < t_f - 1e-9:
        raise ValueError(f"samples cover [{times[0]}, {times[-1]}], "
                         f"not the requested [{t_i}, {t_f}]")
    sel = (times >= t_i - 1e-9) & (times <= t_f + 1e-9)
    if np.count_nonzero(sel) < 2:
        raise ValueError("too few samples inside the averaging window")
    return sel


def time_average(times: np.ndarray, values: np.ndarray,
                 t_i: float, t_f: float) -> float:
    sel = _window(np.asarray(times), t_i, t_f)
    t = np.asarray(times)[sel]
    return float(trapezoid(np.asarray(values)[sel], t) / (t[-1] - t[0]))


def temporal_variance(times: np.ndarray, values: np.ndarray,
                      t_i: float, t_f: float) -> float:
    """var_t<O> = (1/(t_f-t_i)) integral of (O - time mean)^2, trapezoidal."""
    sel = _window(np.asarray(times), t_i, t_f)
    t = np.asarray(times)[sel]
    x = np.asarray(values)[sel]
    mean = trapezoid(x, t) / (t[-1] - t[0])
    return float(trapezoid((x - mean) ** 2, t) / (t[-1] - t[0]))


@dataclass(frozen=True)
class TemporalSummary:
    """Time-window statistics of one evolution run."""

    t_window: tuple[float, float]
    var_t_central: float          # var_t <n_c>
    relvar_t_fluct: float         # var_t(dn_c^2) / time-mean(dn_c^2)
    sigma_bar: float              # time-averaged cloud width
    f_bar: float                  # time-averaged homogeneity deficit
    f0: float                     # F at tau = 0
    f_bar_scaled: float | None    # f_bar / f0, None when f0 = 0


def summarize(series: TimeSeries, t_i: float = 100.0,
              t_f: float = 200.0) -> TemporalSummary:
    var_nc = temporal_variance(series.times, series.n_central, t_i, t_f)
    var_fl = temporal_variance(series.times, series.var_central, t_i, t_f)
    mean_fl = time_average(series.times, series.var_central, t_i, t_f)
    relvar = 0.0 if abs(mean_fl) < 1e-300 else var_fl / mean_fl
    f0 = float(series.f[0])
    f_bar = time_average(series.times, series.f, t_i, t_f)
    scaled = f_bar / f0 if f0 > 0 else None
    return TemporalSummary((t_i, t_f), var_nc, relvar,
                           time_average(series.times, series.sigma, t_i, t_f),
                           f_bar, f0, scaled)
