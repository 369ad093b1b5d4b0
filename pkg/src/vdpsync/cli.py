"""Command-line front end.

Subcommands: steady, sweep, phase-dist, modes, amplitudes, perturb,
reproduce, converge.  All rates are in units of gamma1.  Exit codes:
0 success, 1 numerical failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import sys
import warnings

import numpy as np
import yaml

from . import __version__
from .effective import ANSATZ_STATES, build_effective_hamiltonian, normal_modes, solve_amplitudes
from .errors import InvalidTruncationError, VdpsyncError
from .fock import TruncationSpec
from .liouvillian import SystemParams, build_liouvillian
from .observables import (
    relative_phase_distribution,
    single_phase_distribution,
    sync_measures,
)
from .perturbation import fit_form_coefficients, perturbative_phase_distribution
from .steady_state import check_convergence, solve_steady_state
from .sweep import (
    FIGURE_IDS,
    SweepAxis,
    SweepConfig,
    reproduce_figure,
    run_sweep,
    _fmt,
    _write_lines,
)


def _point_header(params: SystemParams, tol: float, grid_size: int, note: str) -> list:
    lines = [f"# vdpsync {__version__}"]
    for key in ("delta1", "delta2", "coupling", "drive", "gamma2"):
        lines.append(f"# {key} = {_fmt(getattr(params, key))}")
    lines.append("# gamma1 = 1 (unit of all rates)")
    lines.append(f"# n_max_1 = {params.trunc.n_max_1}")
    lines.append(f"# n_max_2 = {params.trunc.n_max_2}")
    lines.append(f"# tol = {_fmt(tol)}")
    lines.append(f"# phase grid: {grid_size} cells, phi_k = 2*pi*k/{grid_size}")
    lines.append(f"# values: {note}")
    return lines

_PARAM_FLAGS = ("delta1", "delta2", "coupling", "drive", "gamma2")


def _add_param_flags(parser):
    for name in _PARAM_FLAGS:
        parser.add_argument(f"--{name}", type=float, default=None,
                            help=f"{name} in units of gamma1")
    parser.add_argument("--nmax1", type=int, default=None, help="Fock cutoff, mode 1")
    parser.add_argument("--nmax2", type=int, default=None, help="Fock cutoff, mode 2")


_PARAM_DEFAULTS = {
    "delta1": 0.0, "delta2": 0.0, "coupling": 0.0, "drive": 0.0, "gamma2": 10.0,
    "nmax1": 5, "nmax2": 5,
}


def _params_from_args(args, config=None) -> SystemParams:
    config = config or {}
    def pick(flag, key=None):
        value = getattr(args, flag)
        if value is not None:
            return value
        return config.get(key or flag, _PARAM_DEFAULTS[flag])
    return SystemParams(
        delta1=pick("delta1"), delta2=pick("delta2"), gamma2=pick("gamma2"),
        coupling=pick("coupling"), drive=pick("drive"),
        trunc=TruncationSpec(int(pick("nmax1", "n_max_1")), int(pick("nmax2", "n_max_2"))),
    )


def _complex_lines(label, value):
    if value is None:
        return [f"{label}: undefined (zero occupation)"]
    return [
        f"{label} = {_fmt(value.real)} {'+' if value.imag >= 0 else '-'} "
        f"{_fmt(abs(value.imag))}i   |{label}| = {_fmt(abs(value))}   "
        f"arg({label}) = {_fmt(np.angle(value))}"
    ]


def _cmd_steady(args) -> int:
    params = _params_from_args(args)
    sol = solve_steady_state(build_liouvillian(params), tol=args.tol)
    report = sync_measures(sol.rho, params=params)
    print(f"steady state ({sol.method}, {sol.factorizations} solves), "
          f"residual = {_fmt(sol.residual)}")
    for name in _PARAM_FLAGS:
        print(f"{name} = {_fmt(getattr(params, name))}")
    print(f"truncation: n_max_1 = {params.trunc.n_max_1}, n_max_2 = {params.trunc.n_max_2}")
    print(f"<n1> = {_fmt(report.n1)}")
    print(f"<n2> = {_fmt(report.n2)}")
    for label, value in (("s1", report.s1), ("s2", report.s2), ("s3", report.s3)):
        for line in _complex_lines(label, value):
            print(line)
    return 0


def _cmd_phase_dist(args) -> int:
    params = _params_from_args(args)
    sol = solve_steady_state(build_liouvillian(params), tol=args.tol)
    single1 = single_phase_distribution(sol.rho, 1, args.grid_size)
    single2 = single_phase_distribution(sol.rho, 2, args.grid_size)
    relative = relative_phase_distribution(sol.rho, args.grid_size)
    lines = _point_header(params, args.tol, args.grid_size,
                          "steady-state phase distributions")
    lines.append("phi,p_phi1,p_phi2,p_relative")
    for k in range(args.grid_size):
        lines.append(",".join(_fmt(v) for v in (
            single1.grid[k], single1.values[k], single2.values[k], relative.values[k],
        )))
    _emit(lines, args.output)
    return 0


def _cmd_modes(args) -> int:
    params = _params_from_args(args)
    modes = normal_modes(params, args.subspace)
    print(f"normal modes of the {args.subspace}-phonon block "
          f"(coupling = {_fmt(params.coupling)}, delta1 = {_fmt(params.delta1)}, "
          f"delta2 = {_fmt(params.delta2)})")
    print("basis:", " ".join(f"|{n}{m}>" for n, m in modes.basis))
    for energy, vector in zip(modes.energies, modes.vectors.T):
        comps = ", ".join(_fmt(c) for c in vector)
        print(f"energy = {_fmt(energy)}   eigenvector = [{comps}]")
    return 0


def _cmd_amplitudes(args) -> int:
    params = _params_from_args(args)
    amps = solve_amplitudes(params)
    h_eff = build_effective_hamiltonian(params)
    print("stationary weak-drive amplitudes (c00 pinned to 1)")
    for (n, m), value in zip(ANSATZ_STATES, amps.as_array()):
        print(f"c{n}{m} = {_fmt(value.real)} {'+' if value.imag >= 0 else '-'} "
              f"{_fmt(abs(value.imag))}i   |c{n}{m}|^2 = {_fmt(abs(value) ** 2)}")
    ratio = amps.ratio_01_10
    print(f"c01/c10 = {_fmt(ratio.real)} {'+' if ratio.imag >= 0 else '-'} "
          f"{_fmt(abs(ratio.imag))}i")
    decay = float(np.max(np.imag(np.linalg.eigvals(h_eff))))
    print(f"max Im eigenvalue of the effective Hamiltonian = {_fmt(decay)}")
    return 0


def _cmd_perturb(args) -> int:
    params = _params_from_args(args)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        dist, coeff = perturbative_phase_distribution(
            params, max_order=args.max_order, grid_size=args.grid_size
        )
    for warning in caught:
        print(f"warning: {warning.message}", file=sys.stderr)
    print(f"perturbative relative-phase distribution to order {args.max_order}")
    print(f"sin(phi) coefficient  = {_fmt(coeff['sin_phi'])}")
    print(f"cos(2phi) coefficient = {_fmt(coeff['cos_2phi'])}")
    if args.fit_coefficients:
        fit = fit_form_coefficients(params.gamma2, gamma1=params.gamma1,
                                    trunc=params.trunc, grid_size=args.grid_size)
        for key in ("c0", "c1", "c2", "c3", "c4"):
            print(f"{key} = {_fmt(fit[key])}")
    full = None
    if args.compare_full:
        sol = solve_steady_state(build_liouvillian(params), tol=args.tol)
        full = relative_phase_distribution(sol.rho, args.grid_size)
        sup = float(np.max(np.abs(full.values - dist.values)))
        print(f"sup-norm difference to the full solver = {_fmt(sup)}")
    if args.output:
        lines = _point_header(params, args.tol, args.grid_size,
                              "perturbative relative-phase distribution")
        header = "phi,p_perturb" + (",p_full" if full is not None else "")
        lines.append(header)
        for k in range(args.grid_size):
            cells = [_fmt(dist.grid[k]), _fmt(dist.values[k])]
            if full is not None:
                cells.append(_fmt(full.values[k]))
            lines.append(",".join(cells))
        _write_lines(args.output, lines)
        print(f"wrote {args.output}")
    return 0


def _cmd_converge(args) -> int:
    params = _params_from_args(args)
    trunc = check_convergence(
        params, step=args.step, tol=args.converge_tol, start=args.start, cap=args.cap
    )
    print(f"converged truncation: n_max = {trunc.n_max_1} "
          f"(observables stable to {_fmt(args.converge_tol)} under n_max -> "
          f"n_max + {args.step})")
    return 0


def _cmd_sweep(args) -> int:
    config_data = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as handle:
            config_data = yaml.safe_load(handle) or {}
        if not isinstance(config_data, dict):
            raise ValueError(f"config file {args.config} must hold a mapping")
    axes = []
    for spec in args.axis or []:
        name, start, stop, count = spec
        axes.append(SweepAxis(name, float(start), float(stop), int(count)))
    if not axes:
        for entry in config_data.get("axes", []):
            axes.append(SweepAxis(entry["name"], float(entry["start"]),
                                  float(entry["stop"]), int(entry["count"])))
    def pick(flag, key, default):
        value = getattr(args, flag, None)
        if value is not None:
            return value
        return config_data.get(key, default)
    config = SweepConfig(
        delta1=pick("delta1", "delta1", 0.0),
        delta2=pick("delta2", "delta2", 0.0),
        gamma2=pick("gamma2", "gamma2", 10.0),
        coupling=pick("coupling", "coupling", 0.0),
        drive=pick("drive", "drive", 0.0),
        n_max_1=int(pick("nmax1", "n_max_1", 5)),
        n_max_2=int(pick("nmax2", "n_max_2", 5)),
        tol=float(pick("tol", "tol", 1e-10)),
        axes=tuple(axes),
        phase_dist=bool(pick("phase_dist", "phase_dist", False) or False),
        grid_size=int(pick("grid_size", "grid_size", 256)),
        workers=int(pick("workers", "workers", 1)),
        output=pick("output", "output", "sweep.csv"),
    )
    result = run_sweep(config)
    for path in result.paths:
        print(f"wrote {path}")
    return 0


def _cmd_reproduce(args) -> int:
    paths = reproduce_figure(
        args.figure, outdir=args.outdir, plot=not args.no_plot, workers=args.workers
    )
    for path in paths:
        print(f"wrote {path}")
    return 0


def _emit(lines, output):
    if output:
        _write_lines(output, lines)
        print(f"wrote {output}")
    else:
        for line in lines:
            print(line)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vdpsync",
        description="Coupled quantum van der Pol oscillators: steady states, "
                    "phase distributions and synchronization measures.",
    )
    parser.add_argument("--version", action="version", version=f"vdpsync {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    steady = sub.add_parser("steady", help="solve one steady state and print measures")
    _add_param_flags(steady)
    steady.add_argument("--tol", type=float, default=1e-10)
    steady.set_defaults(func=_cmd_steady)

    sweep = sub.add_parser("sweep", help="run a 1- or 2-axis parameter sweep")
    _add_param_flags(sweep)
    sweep.add_argument("--axis", nargs=4, action="append",
                       metavar=("NAME", "START", "STOP", "COUNT"),
                       help="swept axis; repeat for a 2-axis sweep")
    sweep.add_argument("--config", help="YAML file with SweepConfig keys")
    sweep.add_argument("--tol", type=float, default=None)
    sweep.add_argument("--phase-dist", dest="phase_dist", action="store_true",
                       default=None, help="also emit the relative-phase matrix")
    sweep.add_argument("--grid-size", dest="grid_size", type=int, default=None)
    sweep.add_argument("--workers", type=int, default=None)
    sweep.add_argument("-o", "--output", default=None)
    sweep.set_defaults(func=_cmd_sweep)

    phase = sub.add_parser("phase-dist", help="phase distributions of one steady state")
    _add_param_flags(phase)
    phase.add_argument("--tol", type=float, default=1e-10)
    phase.add_argument("--grid-size", dest="grid_size", type=int, default=256)
    phase.add_argument("-o", "--output", default=None)
    phase.set_defaults(func=_cmd_phase_dist)

    modes = sub.add_parser("modes", help="normal modes of a phonon block")
    _add_param_flags(modes)
    modes.add_argument("--subspace", type=int, choices=(1, 2), required=True)
    modes.set_defaults(func=_cmd_modes)

    amplitudes = sub.add_parser("amplitudes", help="weak-drive stationary amplitudes")
    _add_param_flags(amplitudes)
    amplitudes.set_defaults(func=_cmd_amplitudes)

    perturb = sub.add_parser("perturb", help="perturbative phase distribution")
    _add_param_flags(perturb)
    perturb.add_argument("--max-order", dest="max_order", type=int, choices=(1, 2),
                         default=2)
    perturb.add_argument("--grid-size", dest="grid_size", type=int, default=256)
    perturb.add_argument("--compare-full", dest="compare_full", action="store_true")
    perturb.add_argument("--fit-coefficients", dest="fit_coefficients",
                         action="store_true")
    perturb.add_argument("--tol", type=float, default=1e-10)
    perturb.add_argument("-o", "--output", default=None)
    perturb.set_defaults(func=_cmd_perturb)

    reproduce = sub.add_parser("reproduce", help="emit the data files for one figure")
    reproduce.add_argument("figure", choices=FIGURE_IDS)
    reproduce.add_argument("--outdir", default=".")
    reproduce.add_argument("--no-plot", dest="no_plot", action="store_true",
                           help="skip PNG rendering, emit CSV only")
    reproduce.add_argument("--workers", type=int, default=1)
    reproduce.set_defaults(func=_cmd_reproduce)

    converge = sub.add_parser("converge", help="find a converged truncation")
    _add_param_flags(converge)
    converge.add_argument("--step", type=int, default=1)
    converge.add_argument("--converge-tol", dest="converge_tol", type=float,
                          default=1e-4)
    converge.add_argument("--start", type=int, default=2)
    converge.add_argument("--cap", type=int, default=12)
    converge.set_defaults(func=_cmd_converge)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidTruncationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VdpsyncError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except np.linalg.LinAlgError as exc:
        print(f"error: linear algebra failure: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, OSError, yaml.YAMLError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
