"""Command-line entry point.

Subcommands
    spectrum        eigenvalues, scaled energies and D1 for one grid point
    sweep-d1        windowed eigenvector statistics over a gamma/eta grid
    evolve          one time evolution with full observable time series
    sweep-dynamics  time-evolution sweep with temporal summaries
    thresholds      analytic chaos-onset table per state family
    staggered-table staggered reference configurations per system size

Exit codes: 0 success, 2 configuration error, 3 capacity error, 4 numerical
failure. The output directory defaults to $BHCHAOS_OUT/<subcommand>-<hash>.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .basis import build_parity_basis, enumerate_basis
from .errors import CapacityError, ConfigError, NumericalError
from .hamiltonian import assemble
from .spectral import DENSE_EIG_CAP, diagonalize, fractal_dimensions
from .sweep import (SweepConfig, make_grid, run_sweep_d1, run_sweep_dynamics,
                    staggered_rows, threshold_rows, write_staggered_table,
                    write_thresholds, _write_csv)

OUTPUT_ROOT_ENV = "BHCHAOS_OUT"


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}") from exc


def _add_size_flags(parser, multi=True):
    helper = "comma-separated list" if multi else "single value"
    parser.add_argument("--n", type=_int_list, required=True,
                        help=f"particle number N ({helper})")
    parser.add_argument("--l", type=_int_list, required=True,
                        help=f"site count L ({helper})")
    parser.add_argument("--ell", type=int, default=3,
                        help="block size for the localized state (default 3)")


def _add_grid_flags(parser):
    parser.add_argument("--grid-min", type=float, required=True)
    parser.add_argument("--grid-max", type=float, required=True)
    parser.add_argument("--grid-count", type=int, required=True)
    parser.add_argument("--grid-param", choices=("gamma", "eta"), default="gamma")


def _add_common_flags(parser):
    parser.add_argument("--out", type=Path, default=None,
                        help=f"output directory (default under ${OUTPUT_ROOT_ENV})")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--seed", type=int, default=7)


def _sizes(args) -> tuple[tuple[int, int], ...]:
    ns, ls = args.n, args.l
    if len(ns) != len(ls):
        raise ConfigError("--n and --l need the same number of entries")
    return tuple(zip(ns, ls))


def _resolve_out(args, name: str, config_hash: str = "") -> Path:
    if args.out is not None:
        return args.out
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if not root:
        raise ConfigError(f"pass --out or set ${OUTPUT_ROOT_ENV}")
    tag = f"{name}-{config_hash}" if config_hash else name
    return Path(root) / tag


def _report(result) -> int:
    for task in result.tasks:
        line = f"  {task.task_id}: {task.status} ({task.seconds:.1f}s)"
        if task.error:
            line += f" {task.error}"
        print(line)
    print(f"wrote {len(result.files)} files to {result.out_dir}")
    if result.failed:
        if all("CapacityError" in t.error for t in result.failed):
            return 3
        return 4
    return 0


def _cmd_spectrum(args) -> int:
    basis = enumerate_basis(args.n[0], args.l[0])
    work = basis if args.sector == "full" else build_parity_basis(basis, args.sector)
    params = SweepConfig(
        mode="spectrum", sizes=_sizes(args)[:1], grid=(args.gamma,),
    ).couplings(args.gamma, args.n[0])
    ham = assemble(work, params)
    spec = diagonalize(ham, dense_cap=args.dense_cap)
    d1 = fractal_dimensions(spec.vectors)
    eps = (spec.energies - spec.e_min) / spec.width
    rows = [{"k": k, "energy": float(spec.energies[k]), "eps": float(eps[k]),
             "d1": float(d1[k])} for k in range(spec.dim)]
    out = _resolve_out(args, "spectrum")
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "spectrum.csv", ["k", "energy", "eps", "d1"], rows)
    print(f"wrote {out / 'spectrum.csv'} ({spec.dim} states)")
    return 0


def _sweep_config(args, mode: str) -> SweepConfig:
    return SweepConfig(
        mode=mode, sizes=_sizes(args),
        grid=make_grid(args.grid_min, args.grid_max, args.grid_count),
        grid_param=args.grid_param, state_kind=args.state, ell=args.ell,
        tmax=args.tmax, dt_sample=args.dt_sample,
        t_window=(args.tmax / 2.0, args.tmax),
        eps_windows=args.windows, window_size=args.window_size,
        seed=args.seed)


def _cmd_sweep_d1(args) -> int:
    config = _sweep_config(args, "sweep_d1")
    out = _resolve_out(args, "sweep-d1", config.config_hash())
    return _report(run_sweep_d1(config, out, workers=args.workers))


def _cmd_sweep_dynamics(args) -> int:
    config = _sweep_config(args, "sweep_dynamics")
    out = _resolve_out(args, "sweep-dynamics", config.config_hash())
    return _report(run_sweep_dynamics(config, out, workers=args.workers))


def _cmd_evolve(args) -> int:
    if (args.gamma is None) == (args.eta is None):
        raise ConfigError("pass exactly one of --gamma / --eta")
    value = args.gamma if args.gamma is not None else args.eta
    config = SweepConfig(
        mode="evolve", sizes=_sizes(args)[:1], grid=(value,),
        grid_param="gamma" if args.gamma is not None else "eta",
        state_kind=args.state, ell=args.ell,
        tmax=args.tmax, dt_sample=args.dt_sample,
        t_window=(args.tmax / 2.0, args.tmax), seed=args.seed)
    out = _resolve_out(args, "evolve", config.config_hash())
    return _report(run_sweep_dynamics(config, out, workers=1))


def _cmd_thresholds(args) -> int:
    rows = threshold_rows(_sizes(args), args.ell)
    print(f"{'state':<12} {'N':>4} {'L':>4} {'ell':>4} "
          f"{'gamma_c':>12} {'eta_c':>12}  regime")
    for row in rows:
        print(f"{row['state']:<12} {row['n_particles']:>4} {row['n_sites']:>4} "
              f"{str(row['ell']):>4} {row['gamma_c']:>12.6g} "
              f"{row['eta_c']:>12.6g}  {row['regime']}")
    if args.out is not None or os.environ.get(OUTPUT_ROOT_ENV):
        out = _resolve_out(args, "thresholds")
        path = write_thresholds(_sizes(args), out, args.ell)
        print(f"wrote {path}")
    return 0


def _cmd_staggered_table(args) -> int:
    rows = staggered_rows(args.l)
    print(f"{'L':>4}  {'configuration':<24} {'E/U':>8} {'E_MM/U':>10}")
    for row in rows:
        print(f"{row['n_sites']:>4}  {row['occupations']:<24} "
              f"{row['interaction_energy_over_u']:>8.6g} "
              f"{row['mm_energy_over_u']:>10.6g}")
    if args.out is not None or os.environ.get(OUTPUT_ROOT_ENV):
        out = _resolve_out(args, "staggered-table")
        path = write_staggered_table(args.l, out)
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bhchaos",
        description="Bose-Hubbard chain: spectral chaos measures and quench dynamics")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="diagonalize one parameter point")
    _add_size_flags(p, multi=False)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--sector", choices=("even", "odd", "full"), default="even")
    p.add_argument("--dense-cap", type=int, default=DENSE_EIG_CAP)
    _add_common_flags(p)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("sweep-d1", help="eigenvector statistics over a grid")
    _add_size_flags(p)
    _add_grid_flags(p)
    p.add_argument("--state", choices=("homogeneous", "staggered", "localized"),
                   default="staggered", help="reference state for energy windows")
    p.add_argument("--windows", type=int, default=100,
                   help="equal-width windows in scaled energy")
    p.add_argument("--window-size", type=int, default=100,
                   help="states per window around the reference energy")
    p.add_argument("--tmax", type=float, default=200.0, help=argparse.SUPPRESS)
    p.add_argument("--dt-sample", type=float, default=0.5, help=argparse.SUPPRESS)
    _add_common_flags(p)
    p.set_defaults(func=_cmd_sweep_d1)

    p = sub.add_parser("sweep-dynamics", help="quench dynamics over a grid")
    _add_size_flags(p)
    _add_grid_flags(p)
    p.add_argument("--state", choices=("homogeneous", "staggered", "localized"),
                   default="homogeneous")
    p.add_argument("--tmax", type=float, default=200.0)
    p.add_argument("--dt-sample", type=float, default=0.5)
    p.add_argument("--windows", type=int, default=100, help=argparse.SUPPRESS)
    p.add_argument("--window-size", type=int, default=100, help=argparse.SUPPRESS)
    _add_common_flags(p)
    p.set_defaults(func=_cmd_sweep_dynamics)

    p = sub.add_parser("evolve", help="single quench evolution")
    _add_size_flags(p, multi=False)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--state", choices=("homogeneous", "staggered", "localized"),
                   default="homogeneous")
    p.add_argument("--tmax", type=float, default=200.0)
    p.add_argument("--dt-sample", type=float, default=0.5)
    _add_common_flags(p)
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("thresholds", help="analytic chaos thresholds")
    _add_size_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=_cmd_thresholds)

    p = sub.add_parser("staggered-table", help="staggered reference states")
    p.add_argument("--l", type=_int_list, default=[10, 11, 13, 14, 16, 17])
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=_cmd_staggered_table)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
