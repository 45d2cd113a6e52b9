"""Parameter sweeps over gamma or eta grids: task scheduling, CSV output, manifests.

One task is one (grid value, system size) cell handled end to end; tasks share
nothing mutable, so any subset can be recomputed in isolation and a rerun with
the same configuration reproduces the output files byte for byte. Each result
directory carries a JSON manifest with the configuration, its hash, per-task
status and a checksum registry of every file written.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import asdict, dataclass, field
from multiprocessing import get_context
from pathlib import Path

import numpy as np

from . import __version__
from .basis import build_parity_basis, enumerate_basis, format_occupations
from .errors import BhcError, CapacityError, ConfigError
from .hamiltonian import CouplingParameters, assemble
from .observables import build_time_series, summarize
from .propagator import configure_propagator, evolve
from .spectral import (DENSE_EIG_CAP, EqualWidthWindows, NearestEnergyWindows,
                       diagonalize, fractal_dimensions, goe_reference,
                       windowed_statistics)
from .states import (fock_energy, initial_state, maximally_mixed_energy,
                     make_staggered, threshold)


def make_grid(lo: float, hi: float, count: int) -> tuple[float, ...]:
    """Log-spaced grid rounded to six significant decimals, so values are
    exact decimals that can be joined across runs and sizes."""
    if count < 1:
        raise ConfigError("grid needs at least one point")
    if lo <= 0 or hi <= 0:
        raise ConfigError("grid bounds must be positive")
    if count == 1:
        if lo != hi:
            raise ConfigError("single-point grid needs equal bounds")
        return (float(f"{lo:.6g}"),)
    if hi <= lo:
        raise ConfigError("grid upper bound must exceed the lower bound")
    raw = np.logspace(np.log10(lo), np.log10(hi), count)
    return tuple(float(f"{v:.6g}") for v in raw)


@dataclass(frozen=True)
class SweepConfig:
    """Everything one sweep needs; hashed for reproducibility."""

    mode: str                       # 'sweep_d1' | 'sweep_dynamics' | ...
    sizes: tuple[tuple[int, int], ...]  # (N, L) pairs
    grid: tuple[float, ...]
    grid_param: str = "gamma"       # 'gamma' | 'eta'
    state_kind: str = "homogeneous"
    ell: int = 3
    sector: str = "even"
    dt: float = 0.1
    eps_cutoff: float = 1e-12
    padding: float = 1.01
    tmax: float = 200.0
    dt_sample: float = 0.5
    t_window: tuple[float, float] = (100.0, 200.0)
    eps_windows: int = 100
    window_size: int = 100
    dense_cap: int = DENSE_EIG_CAP
    seed: int = 7

    def __post_init__(self):
        if self.grid_param not in ("gamma", "eta"):
            raise ConfigError("grid_param must be 'gamma' or 'eta'")
        if not self.grid:
            raise ConfigError("empty grid")
        for n, l in self.sizes:
            if l < 2 or n < 1 or n % l:
                raise ConfigError(f"size N={n}, L={l} is not an integer density")

    def config_hash(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def couplings(self, value: float, n_particles: int) -> CouplingParameters:
        if self.grid_param == "eta":
            return CouplingParameters.from_eta(value, n_particles)
        return CouplingParameters.from_gamma(value)


@dataclass
class TaskRecord:
    task_id: str
    n_particles: int
    n_sites: int
    value: float
    status: str = "ok"
    error: str = ""
    seconds: float = 0.0


@dataclass
class SweepResult:
    config: SweepConfig
    out_dir: Path
    tasks: list[TaskRecord] = field(default_factory=list)
    files: dict[str, str] = field(default_factory=dict)
    rows: dict[str, list[dict]] = field(default_factory=dict)

    @property
    def failed(self) -> list[TaskRecord]:
        return [t for t in self.tasks if t.status != "ok"]


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)  # shortest exact round-trip form
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[dict]) -> str:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[col]) for col in header])
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(result: SweepResult) -> Path:
    manifest = {
        "version": __version__,
        "config": asdict(result.config),
        "config_hash": result.config.config_hash(),
        "tasks": [asdict(t) for t in result.tasks],
        "files": result.files,
    }
    path = result.out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return path


def _task_sort_key(task):
    n, l, value = task
    return (n, l, value)


def _run_tasks(worker, tasks, config: SweepConfig, workers: int):
    """Run tasks (possibly in parallel); results come back keyed by task."""
    ordered = sorted(tasks, key=_task_sort_key)
    args = [(config, n, l, value) for n, l, value in ordered]
    if workers <= 1 or len(args) <= 1:
        return [worker(a) for a in args]
    with get_context("fork").Pool(processes=min(workers, len(args))) as pool:
        return pool.map(worker, args)


# --------------------------------------------------------------------------
# eigenstate-statistics sweep
# --------------------------------------------------------------------------

_D1_EPS_HEADER = ["gamma", "eta", "n_particles", "n_sites", "sector_dim",
                  "window_id", "eps_center", "mean_d1", "var_d1", "count"]
_D1_REF_HEADER = ["gamma", "eta", "n_particles", "n_sites", "sector_dim",
                  "window_id", "spectrum_percentage", "mean_d1", "var_d1",
                  "count", "e_ref", "goe_mean_d1", "goe_var_d1"]


def _d1_task(args):
    config, n, l, value = args
    record = TaskRecord(f"d1/N{n}L{l}/{value:g}", n, l, value)
    t0 = time.perf_counter()
    try:
        params = config.couplings(value, n)
        basis = enumerate_basis(n, l)
        sector = build_parity_basis(basis, config.sector)
        if sector.dim > config.dense_cap:
            raise CapacityError(
                f"sector dimension {sector.dim} exceeds dense cap {config.dense_cap}")
        ham = assemble(sector, params)
        spec = diagonalize(ham, dense_cap=config.dense_cap)
        d1 = fractal_dimensions(spec.vectors)
        ref_state = initial_state(config.state_kind, n, l, config.ell)
        e_ref = fock_energy(ref_state.occupations, params.u)
        goe = goe_reference(sector.dim, seed=config.seed)

        eps_stats = windowed_statistics(spec, EqualWidthWindows(config.eps_windows), d1)
        ref_stats = windowed_statistics(
            spec, NearestEnergyWindows(e_ref, config.window_size), d1)

        common = {"gamma": params.gamma, "eta": params.eta(n),
                  "n_particles": n, "n_sites": l, "sector_dim": sector.dim}
        eps_rows = [dict(common, window_id=int(w), eps_center=float(c),
                         mean_d1=float(m), var_d1=float(v), count=int(k))
                    for w, c, m, v, k in zip(eps_stats.window_id, eps_stats.label,
                                             eps_stats.mean_d1, eps_stats.var_d1,
                                             eps_stats.count)]
        ref_rows = [dict(common, window_id=int(w), spectrum_percentage=float(c),
                         mean_d1=float(m), var_d1=float(v), count=int(k),
                         e_ref=e_ref, goe_mean_d1=goe.mean_d1,
                         goe_var_d1=goe.var_d1)
                    for w, c, m, v, k in zip(ref_stats.window_id, ref_stats.label,
                                             ref_stats.mean_d1, ref_stats.var_d1,
                                             ref_stats.count)]
        record.seconds = time.perf_counter() - t0
        return record, {"d1_eps_windows": eps_rows, "d1_ref_windows": ref_rows}
    except BhcError as exc:
        record.status = "failed"
        record.error = f"{type(exc).__name__}: {exc}"
        record.seconds = time.perf_counter() - t0
        return record, {}


def run_sweep_d1(config: SweepConfig, out_dir, workers: int = 1) -> SweepResult:
    """Diagonalize every grid cell and persist windowed D1 statistics."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tasks = [(n, l, v) for n, l in config.sizes for v in config.grid]
    results = _run_tasks(_d1_task, tasks, config, workers)

    sweep = SweepResult(config, out)
    collected: dict[str, list[dict]] = {"d1_eps_windows": [], "d1_ref_windows": []}
    for record, rows in results:
        sweep.tasks.append(record)
        for key, items in rows.items():
            collected[key].extend(items)
    sweep.rows = collected
    sweep.files["d1_eps_windows.csv"] = _write_csv(
        out / "d1_eps_windows.csv", _D1_EPS_HEADER, collected["d1_eps_windows"])
    sweep.files["d1_ref_windows.csv"] = _write_csv(
        out / "d1_ref_windows.csv", _D1_REF_HEADER, collected["d1_ref_windows"])
    _write_manifest(sweep)
    return sweep


# --------------------------------------------------------------------------
# dynamics sweep
# --------------------------------------------------------------------------

_SUMMARY_HEADER = ["state", "n_particles", "n_sites", "ell", "gamma", "eta",
                   "f0", "var_t_nc", "relvar_t_dnc2", "sigma_bar", "f_bar",
                   "f_bar_scaled"]
_TIMESERIES_HEADER = ["state", "n_particles", "n_sites", "gamma", "eta",
                      "tau", "n_c", "dn_c2", "sigma", "f"]
_PROFILE_HEADER = ["state", "n_particles", "n_sites", "gamma", "eta",
                   "tau", "site", "density"]


def _dynamics_task(args):
    config, n, l, value = args
    record = TaskRecord(f"dyn/N{n}L{l}/{value:g}", n, l, value)
    t0 = time.perf_counter()
    try:
        params = config.couplings(value, n)
        spec = initial_state(config.state_kind, n, l, config.ell)
        basis = enumerate_basis(n, l)
        # palindromic initial states evolve entirely inside the even sector
        if spec.palindromic:
            work_basis = build_parity_basis(basis, "even")
            start_index = work_basis.member_index_of(spec.occupations)
        else:
            work_basis = basis
            start_index = basis.index(spec.occupations)
        ham = assemble(work_basis, params)
        cfg = configure_propagator(ham, dt=config.dt,
                                   eps_cutoff=config.eps_cutoff,
                                   padding=config.padding)
        psi0 = np.zeros(ham.dim, dtype=np.complex128)
        psi0[start_index] = 1.0
        n_samples = int(round(config.tmax / config.dt_sample))
        times = np.round(np.arange(n_samples + 1) * config.dt_sample, 12)
        series = build_time_series(
            work_basis, evolve(ham, psi0, times, cfg), spec.density,
            meta={"gamma": params.gamma, "eta": params.eta(n)})
        summary = summarize(series, *config.t_window)

        key = {"state": config.state_kind, "n_particles": n, "n_sites": l,
               "gamma": params.gamma, "eta": params.eta(n)}
        summary_row = dict(key, ell=spec.ell if spec.ell is not None else "",
                           f0=summary.f0, var_t_nc=summary.var_t_central,
                           relvar_t_dnc2=summary.relvar_t_fluct,
                           sigma_bar=summary.sigma_bar, f_bar=summary.f_bar,
                           f_bar_scaled=summary.f_bar_scaled
                           if summary.f_bar_scaled is not None else "")
        ts_rows = [dict(key, tau=float(t), n_c=float(nc), dn_c2=float(dn),
                        sigma=float(s), f=float(f))
                   for t, nc, dn, s, f in zip(series.times, series.n_central,
                                              series.var_central, series.sigma,
                                              series.f)]
        profile_rows = [dict(key, tau=float(t), site=site + 1,
                             density=float(series.densities[i, site]))
                        for i, t in enumerate(series.times)
                        for site in range(series.n_sites)]
        record.seconds = time.perf_counter() - t0
        return record, {"summary": [summary_row], "timeseries": ts_rows,
                        "profiles": profile_rows}
    except BhcError as exc:
        record.status = "failed"
        record.error = f"{type(exc).__name__}: {exc}"
        record.seconds = time.perf_counter() - t0
        return record, {}


def run_sweep_dynamics(config: SweepConfig, out_dir, workers: int = 1,
                       write_profiles: bool = True) -> SweepResult:
    """Propagate the chosen initial state over the grid and persist the
    time series plus temporal summaries."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tasks = [(n, l, v) for n, l in config.sizes for v in config.grid]
    results = _run_tasks(_dynamics_task, tasks, config, workers)

    sweep = SweepResult(config, out)
    collected = {"summary": [], "timeseries": [], "profiles": []}
    for record, rows in results:
        sweep.tasks.append(record)
        for key, items in rows.items():
            collected[key].extend(items)
    sweep.rows = collected
    sweep.files["dynamics_summary.csv"] = _write_csv(
        out / "dynamics_summary.csv", _SUMMARY_HEADER, collected["summary"])
    sweep.files["timeseries.csv"] = _write_csv(
        out / "timeseries.csv", _TIMESERIES_HEADER, collected["timeseries"])
    if write_profiles:
        sweep.files["profiles.csv"] = _write_csv(
            out / "profiles.csv", _PROFILE_HEADER, collected["profiles"])
    _write_manifest(sweep)
    return sweep


# --------------------------------------------------------------------------
# report tables
# --------------------------------------------------------------------------

_THRESH_HEADER = ["state", "n_particles", "n_sites", "ell", "density",
                  "gamma_c", "gamma_c_exact", "eta_c", "eta_c_exact", "regime"]


def threshold_rows(sizes, ell: int = 3) -> list[dict]:
    rows = []
    for n, l in sorted(set(sizes)):
        for kind in ("homogeneous", "staggered", "localized"):
            try:
                spec = initial_state(kind, n, l, ell)
            except BhcError:
                continue
            est = threshold(spec)
            rows.append({"state": kind, "n_particles": n, "n_sites": l,
                         "ell": spec.ell if spec.ell is not None else "",
                         "density": est.density,
                         "gamma_c": float(est.gamma_c),
                         "gamma_c_exact": str(est.gamma_c),
                         "eta_c": float(est.eta_c),
                         "eta_c_exact": str(est.eta_c),
                         "regime": est.regime})
    return rows


def write_thresholds(sizes, out_dir, ell: int = 3) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "thresholds.csv"
    _write_csv(path, _THRESH_HEADER, threshold_rows(sizes, ell))
    return path


_STAGGERED_HEADER = ["n_sites", "n_particles", "occupations",
                     "interaction_energy_over_u", "mm_energy_over_u"]


def staggered_rows(lengths) -> list[dict]:
    rows = []
    for l in sorted(set(lengths)):
        state = make_staggered(l, l)
        rows.append({"n_sites": l, "n_particles": l,
                     "occupations": format_occupations(state),
                     "interaction_energy_over_u": fock_energy(state, 1.0),
                     "mm_energy_over_u": maximally_mixed_energy(l, l, 1.0)})
    return rows


def write_staggered_table(lengths, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "staggered_states.csv"
    _write_csv(path, _STAGGERED_HEADER, staggered_rows(lengths))
    return path
