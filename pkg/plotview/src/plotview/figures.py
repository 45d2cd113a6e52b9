"""Render publication-style figures from bhchaos CSV output directories.

Three figure kinds:
    heatmap    variance of the fractal dimension over (gamma, scaled energy)
    curves     mean/variance of the fractal dimension, or dynamical summaries,
               versus the control parameter, one line per system size
    spacetime  on-site density evolution panels over (tau, site)

This is a pure view layer: every number is read from the CSVs (and the run
manifest); nothing physical is recomputed here. Threshold vertical lines come
from thresholds.csv when present in the input directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

FIGURE_KINDS = ("heatmap", "curves", "spacetime")

_SAVE_OPTS = {"dpi": 150, "metadata": {"Software": "plotview"}}


class PlotviewError(Exception):
    """Bad input directory, missing file, or missing column."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure to render: kind, where the CSVs live, where the image goes."""

    kind: str
    input_dir: Path
    out_path: Path
    log_x: bool = True  # control-parameter axes are logarithmic in gamma/eta


def _load_csv(path: Path, required: list[str]) -> pd.DataFrame:
    if not path.exists():
        raise PlotviewError(f"missing input file {path.name}")
    frame = pd.read_csv(path, float_precision="round_trip")
    if frame.empty:
        raise PlotviewError(f"{path.name} contains no rows")
    for column in required:
        if column not in frame.columns:
            raise PlotviewError(f"{path.name} is missing column '{column}'")
    return frame


def _load_manifest(input_dir: Path) -> dict:
    path = input_dir / "manifest.json"
    if not path.exists():
        return {}
    return json.loads(path.read_text())


def _thresholds(input_dir: Path, state: str, param: str) -> pd.DataFrame | None:
    path = input_dir / "thresholds.csv"
    if not path.exists():
        return None
    frame = _load_csv(path, ["state", "n_particles", "gamma_c", "eta_c"])
    rows = frame[frame["state"] == state]
    return rows if not rows.empty else None


def _draw_threshold_vlines(ax, thresholds: pd.DataFrame | None, param: str):
    if thresholds is None:
        return
    column = "gamma_c" if param == "gamma" else "eta_c"
    for value in sorted(set(thresholds[column])):
        ax.axvline(value, color="k", linestyle="--", linewidth=0.8, alpha=0.7)


def build_heatmap(input_dir: Path, log_x: bool = True):
    frame = _load_csv(input_dir / "d1_eps_windows.csv",
                      ["gamma", "n_particles", "n_sites", "eps_center",
                       "var_d1", "count"])
    n, l = sorted(set(zip(frame["n_particles"], frame["n_sites"])))[0]
    sub = frame[(frame["n_particles"] == n) & (frame["n_sites"] == l)]
    gammas = np.sort(sub["gamma"].unique())
    centers = np.sort(sub["eps_center"].unique())
    grid = np.full((centers.size, gammas.size), np.nan)
    gi = {g: i for i, g in enumerate(gammas)}
    ci = {c: i for i, c in enumerate(centers)}
    for _, row in sub.iterrows():
        if row["count"] > 0:
            grid[ci[row["eps_center"]], gi[row["gamma"]]] = row["var_d1"]

    fig, ax = plt.subplots(figsize=(6.0, 4.2), constrained_layout=True)
    mesh = ax.pcolormesh(gammas, centers, np.log10(grid),
                         shading="nearest", cmap="viridis")
    if log_x:
        ax.set_xscale("log")
    ax.set_xlabel(r"$\gamma = J/U$")
    ax.set_ylabel(r"scaled energy $\varepsilon$")
    ax.set_title(f"var of fractal dimension, N={n}, L={l}")
    fig.colorbar(mesh, ax=ax, label=r"$\log_{10}$ var $D_1$")
    return fig


def _build_d1_curves(input_dir: Path, manifest: dict, log_x: bool = True):
    frame = _load_csv(input_dir / "d1_ref_windows.csv",
                      ["gamma", "eta", "n_particles", "n_sites", "window_id",
                       "mean_d1", "var_d1", "goe_mean_d1", "goe_var_d1"])
    frame = frame[frame["window_id"] == 0]
    param = manifest.get("config", {}).get("grid_param", "gamma")
    state = manifest.get("config", {}).get("state_kind", "staggered")
    thresholds = _thresholds(input_dir, state, param)

    fig, (ax_mean, ax_var) = plt.subplots(
        2, 1, figsize=(6.0, 6.4), sharex=True, constrained_layout=True)
    for (n, l), sub in frame.groupby(["n_particles", "n_sites"]):
        sub = sub.sort_values(param)
        line, = ax_mean.plot(sub[param], sub["mean_d1"], "o-", ms=3,
                             label=f"N={n}, L={l}")
        ax_var.plot(sub[param], sub["var_d1"], "o-", ms=3,
                    color=line.get_color())
        ax_mean.axhline(sub["goe_mean_d1"].iloc[0], color=line.get_color(),
                        linestyle=":", linewidth=0.8)
        ax_var.axhline(sub["goe_var_d1"].iloc[0], color=line.get_color(),
                       linestyle=":", linewidth=0.8)
    for ax in (ax_mean, ax_var):
        if log_x:
            ax.set_xscale("log")
        _draw_threshold_vlines(ax, thresholds, param)
    ax_var.set_yscale("log")
    ax_mean.set_ylabel(r"$\langle D_1 \rangle$")
    ax_var.set_ylabel(r"var $D_1$")
    ax_var.set_xlabel(rf"$\{param}$")
    ax_mean.legend(fontsize=8)
    ax_mean.set_title(f"eigenstates nearest the {state} state energy")
    return fig


def _build_dynamics_curves(input_dir: Path, manifest: dict, log_x: bool = True):
    frame = _load_csv(input_dir / "dynamics_summary.csv",
                      ["state", "n_particles", "n_sites", "gamma", "eta",
                       "var_t_nc", "relvar_t_dnc2", "sigma_bar", "f_bar",
                       "f_bar_scaled"])
    param = manifest.get("config", {}).get("grid_param", "gamma")
    state = str(frame["state"].iloc[0])
    thresholds = _thresholds(input_dir, state, param)
    f_column = "f_bar" if frame["f_bar_scaled"].isna().all() else "f_bar_scaled"

    fig, axes = plt.subplots(3, 1, figsize=(6.0, 8.0), sharex=True,
                             constrained_layout=True)
    ax_sigma, ax_f, ax_var = axes
    for (n, l), sub in frame.groupby(["n_particles", "n_sites"]):
        sub = sub.sort_values(param)
        line, = ax_sigma.plot(sub[param], sub["sigma_bar"], "o-", ms=3,
                              label=f"N={n}, L={l}")
        ax_f.plot(sub[param], sub[f_column], "o-", ms=3, color=line.get_color())
        ax_var.plot(sub[param], sub["var_t_nc"], "o-", ms=3,
                    color=line.get_color())
    for ax in axes:
        if log_x:
            ax.set_xscale("log")
        _draw_threshold_vlines(ax, thresholds, param)
    ax_f.set_yscale("log")
    ax_var.set_yscale("log")
    ax_sigma.set_ylabel(r"$\bar\sigma$")
    ax_f.set_ylabel(r"$\bar F / F_0$" if f_column == "f_bar_scaled" else r"$\bar F$")
    ax_var.set_ylabel(r"var$_t \langle n_c \rangle$")
    ax_var.set_xlabel(rf"$\{param}$")
    ax_sigma.legend(fontsize=8)
    ax_sigma.set_title(f"{state} initial state, time window averages")
    return fig


def build_curves(input_dir: Path, log_x: bool = True):
    manifest = _load_manifest(input_dir)
    if (input_dir / "d1_ref_windows.csv").exists():
        return _build_d1_curves(input_dir, manifest, log_x)
    if (input_dir / "dynamics_summary.csv").exists():
        return _build_dynamics_curves(input_dir, manifest, log_x)
    raise PlotviewError(
        "missing input file d1_ref_windows.csv or dynamics_summary.csv")


def build_spacetime(input_dir: Path, max_panels: int = 4, log_x: bool = True):
    frame = _load_csv(input_dir / "profiles.csv",
                      ["n_particles", "n_sites", "gamma", "eta", "tau",
                       "site", "density"])
    manifest = _load_manifest(input_dir)
    param = manifest.get("config", {}).get("grid_param", "gamma")
    n = frame["n_particles"].max()
    sub = frame[frame["n_particles"] == n]
    values = np.sort(sub[param].unique())
    if values.size > max_panels:
        picks = values[np.linspace(0, values.size - 1, max_panels).astype(int)]
    else:
        picks = values

    fig, axes = plt.subplots(1, len(picks), figsize=(3.0 * len(picks), 4.0),
                             sharey=True, constrained_layout=True)
    axes = np.atleast_1d(axes)
    for ax, value in zip(axes, picks):
        panel = sub[sub[param] == value]
        taus = np.sort(panel["tau"].unique())
        sites = np.sort(panel["site"].unique())
        grid = panel.pivot_table(index="tau", columns="site",
                                 values="density").to_numpy()
        mesh = ax.pcolormesh(sites, taus, grid, shading="nearest",
                             cmap="magma")
        ax.set_title(rf"$\{param} = {value:g}$", fontsize=9)
        ax.set_xlabel("site")
    axes[0].set_ylabel(r"$\tau$")
    fig.colorbar(mesh, ax=axes[-1], label=r"$\langle n_j \rangle$")
    return fig


_BUILDERS = {"heatmap": build_heatmap, "curves": build_curves,
             "spacetime": build_spacetime}


def render_figure(spec: FigureSpec) -> Path:
    """Render one FigureSpec and write the image."""
    if spec.kind not in _BUILDERS:
        raise PlotviewError(f"unknown figure kind {spec.kind!r}; "
                            f"choose from {', '.join(FIGURE_KINDS)}")
    fig = _BUILDERS[spec.kind](Path(spec.input_dir), log_x=spec.log_x)
    out = Path(spec.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, **_SAVE_OPTS)
    plt.close(fig)
    return out


def render(input_dir, kind: str, out_path, log_x: bool = True) -> Path:
    """Build one figure kind from an input directory and write the image."""
    return render_figure(FigureSpec(kind, Path(input_dir), Path(out_path), log_x))
