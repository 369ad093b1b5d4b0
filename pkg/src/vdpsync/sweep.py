"""Parameter sweeps, figure-grade data tables and deterministic CSV output.

Every emitted file starts with a `#` header block recording the tool
version, all fixed parameters, the truncation and the sweep axes, so the
artifact is self-describing.  Numbers are serialized with 12 significant
digits and rows follow the sweep order, which makes reruns byte-identical.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import PerturbationRegimeWarning, VdpsyncError
from .fock import TruncationSpec
from .liouvillian import SystemParams, build_liouvillian
from .observables import relative_phase_distribution, sync_measures
from .perturbation import perturbative_phase_distribution
from .steady_state import solve_steady_state

SWEEP_AXES = ("delta1", "delta2", "coupling", "drive", "gamma2")

FIGURE_IDS = ("fig2a", "fig2b", "fig3", "fig4", "fig5", "figS1")

COLUMNS = (
    "delta1", "delta2", "coupling", "drive", "gamma2",
    "n1", "n2",
    "s1_re", "s1_im", "s1_abs",
    "s2_re", "s2_im", "s2_abs",
    "s3_re", "s3_im", "s3_abs",
    "residual", "n_max_1", "n_max_2",
)

_INT_COLUMNS = {"n_max_1", "n_max_2"}


def _fmt(value) -> str:
    """12-significant-digit serialization; NaN for undefined measures."""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "nan"
    return f"{value:.11e}"


@dataclass(frozen=True)
class SweepAxis:
    name: str
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.name not in SWEEP_AXES:
            raise ValueError(f"axis name must be one of {SWEEP_AXES}, got {self.name!r}")
        if self.count < 2:
            raise ValueError(f"axis count must be >= 2, got {self.count}")
        if not self.start < self.stop:
            raise ValueError(f"axis needs start < stop, got [{self.start}, {self.stop}]")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class SweepConfig:
    """Fixed parameters plus one or two linearly spaced sweep axes."""

    delta1: float = 0.0
    delta2: float = 0.0
    gamma2: float = 10.0
    coupling: float = 0.0
    drive: float = 0.0
    n_max_1: int = 5
    n_max_2: int = 5
    tol: float = 1e-10
    axes: tuple = ()
    phase_dist: bool = False
    grid_size: int = 256
    workers: int = 1
    check_unique: bool = True
    output: str | None = None

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ValueError(f"need 1 or 2 sweep axes, got {len(self.axes)}")
        names = [axis.name for axis in self.axes]
        if len(set(names)) != len(names):
            raise ValueError(f"sweep axes must be distinct, got {names}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")

    def base_params(self) -> SystemParams:
        return SystemParams(
            delta1=self.delta1, delta2=self.delta2, gamma2=self.gamma2,
            coupling=self.coupling, drive=self.drive,
            trunc=TruncationSpec(self.n_max_1, self.n_max_2),
        )

    def points(self) -> list[dict]:
        """Axis-value assignments in row-major sweep order."""
        grids = [axis.values() for axis in self.axes]
        names = [axis.name for axis in self.axes]
        if len(grids) == 1:
            return [{names[0]: v} for v in grids[0]]
        return [
            {names[0]: v0, names[1]: v1} for v0 in grids[0] for v1 in grids[1]
        ]


@dataclass
class SweepResult:
    config: SweepConfig
    columns: tuple
    rows: np.ndarray
    phase_grid: np.ndarray | None = None
    phase_rows: np.ndarray | None = None
    paths: list = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]


def _compute_point(args):
    config, point = args
    params = config.base_params()
    params = params.replace(
        **{k: v for k, v in point.items() if k != "trunc"},
    )
    try:
        sol = solve_steady_state(
            build_liouvillian(params), tol=config.tol, check_unique=config.check_unique
        )
        report = sync_measures(sol.rho, params=params)
    except VdpsyncError as exc:
        tuple_desc = ", ".join(f"{k}={v:g}" for k, v in point.items())
        raise type(exc)(f"sweep aborted at point ({tuple_desc}): {exc}") from exc
    def parts(s):
        if s is None:
            return (math.nan, math.nan, math.nan)
        return (s.real, s.imag, abs(s))
    row = [
        params.delta1, params.delta2, params.coupling, params.drive, params.gamma2,
        report.n1, report.n2,
        *parts(report.s1), *parts(report.s2), *parts(report.s3),
        sol.residual, params.trunc.n_max_1, params.trunc.n_max_2,
    ]
    phase_row = None
    if config.phase_dist:
        dist = relative_phase_distribution(sol.rho, grid_size=config.grid_size)
        phase_row = dist.values
    return row, phase_row


def run_sweep(config: SweepConfig) -> SweepResult:
    """Solve every sweep point and emit the result table.

    Points are computed by a worker pool when config.workers > 1; rows are
    always collected and written in deterministic sweep order.
    """
    points = config.points()
    jobs = [(config, point) for point in points]
    if config.workers > 1:
        chunk = max(1, len(jobs) // (config.workers * 8))
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outputs = list(pool.map(_compute_point, jobs, chunksize=chunk))
    else:
        outputs = [_compute_point(job) for job in jobs]
    rows = np.array([row for row, _ in outputs])
    phase_rows = None
    phase_grid = None
    if config.phase_dist:
        phase_rows = np.array([phase for _, phase in outputs])
        phase_grid = np.linspace(0.0, 2.0 * np.pi, config.grid_size, endpoint=False)
    result = SweepResult(
        config=config, columns=COLUMNS, rows=rows,
        phase_grid=phase_grid, phase_rows=phase_rows,
    )
    if config.output:
        result.paths.extend(write_sweep_csv(result, config.output))
    return result


def _header(config: SweepConfig, extra: dict | None = None, skip=()) -> list[str]:
    lines = [f"# vdpsync {__version__}"]
    swept = {axis.name for axis in config.axes}
    for key in ("delta1", "delta2", "coupling", "drive", "gamma2"):
        if key in swept or key in skip:
            continue
        lines.append(f"# {key} = {_fmt(getattr(config, key))}")
    lines.append("# gamma1 = 1 (unit of all rates)")
    lines.append(f"# n_max_1 = {config.n_max_1}")
    lines.append(f"# n_max_2 = {config.n_max_2}")
    lines.append(f"# tol = {_fmt(config.tol)}")
    for axis in config.axes:
        lines.append(
            f"# axis: {axis.name} from {_fmt(axis.start)} to {_fmt(axis.stop)} "
            f"count {axis.count}"
        )
    for key, value in (extra or {}).items():
        lines.append(f"# {key}: {value}")
    return lines


def _write_lines(path: str, lines) -> str:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")
    return path


def write_sweep_csv(result: SweepResult, path: str) -> list[str]:
    """Persist a sweep as CSV (plus a companion phase-matrix file if present)."""
    config = result.config
    lines = _header(config)
    lines.append(",".join(result.columns))
    for row in result.rows:
        cells = [
            str(int(value)) if name in _INT_COLUMNS else _fmt(value)
            for name, value in zip(result.columns, row)
        ]
        lines.append(",".join(cells))
    paths = [_write_lines(path, lines)]
    if result.phase_rows is not None:
        stem, ext = os.path.splitext(path)
        axis_names = [axis.name for axis in config.axes]
        extra = {
            "phase grid": f"{config.grid_size} cells, phi_k = 2*pi*k/{config.grid_size}",
            "values": "relative-phase distribution P(phi), one row per sweep point",
        }
        lines = _header(config, extra)
        lines.append(",".join(axis_names + [f"p{k:03d}" for k in range(config.grid_size)]))
        axis_cols = [result.columns.index(name) for name in axis_names]
        for row, phase in zip(result.rows, result.phase_rows):
            cells = [_fmt(row[c]) for c in axis_cols] + [_fmt(v) for v in phase]
            lines.append(",".join(cells))
        paths.append(_write_lines(f"{stem}_phase{ext}", lines))
    return paths


# --- figure reproduction -------------------------------------------------

_FIG_E = {"fig2a": 0.1, "fig2b": 0.5}
_FIG3_COUPLINGS = (0.6, 2.0, 3.0, 4.0)
_FIG4_COUPLINGS = (0.6, 4.0)
_FIG5_COUPLING = 5.0
_DETUNING_AXIS = (-8.0, 8.0, 161)
_MAP_AXIS = (-8.0, 8.0, 41)
_GAMMA2_AXIS = (10.0, 100.0, 19)
_COUPLING_AXIS = (0.0, 5.0, 51)


def reproduce_figure(
    figure_id: str, outdir: str = ".", plot: bool = True, workers: int = 1
) -> list[str]:
    """Emit the sweep tables for one figure (and render it unless plot=False)."""
    if figure_id not in FIGURE_IDS:
        raise ValueError(f"unknown figure id {figure_id!r}; known: {FIGURE_IDS}")
    os.makedirs(outdir, exist_ok=True)
    builder = {
        "fig2a": _reproduce_phase_map,
        "fig2b": _reproduce_phase_map,
        "fig3": _reproduce_detuning_curves,
        "fig4": _reproduce_detuning_maps,
        "fig5": _reproduce_damping_maps,
        "figS1": _reproduce_perturbative_maps,
    }[figure_id]
    return builder(figure_id, outdir, plot, workers)


def _reproduce_phase_map(figure_id, outdir, plot, workers):
    drive = _FIG_E[figure_id]
    config = SweepConfig(
        drive=drive, axes=(SweepAxis("coupling", *_COUPLING_AXIS),),
        phase_dist=True, workers=workers,
    )
    result = run_sweep(config)
    couplings = result.column("coupling")
    extra = {"figure": figure_id, "values": "P(phi) rows over the coupling axis"}
    lines = _header(config, extra)
    lines.append(",".join(["coupling"] + [f"p{k:03d}" for k in range(config.grid_size)]))
    for value, phase in zip(couplings, result.phase_rows):
        lines.append(",".join([_fmt(value)] + [_fmt(v) for v in phase]))
    paths = [_write_lines(os.path.join(outdir, f"{figure_id}.csv"), lines)]
    if plot:
        from .plotting import render_phase_map

        paths.append(render_phase_map(
            os.path.join(outdir, f"{figure_id}.png"),
            couplings, result.phase_grid, result.phase_rows,
            title=f"relative phase distribution, E/gamma1 = {drive:g}",
        ))
    return paths


def _reproduce_detuning_curves(figure_id, outdir, plot, workers):
    sweeps = {}
    for scan in ("delta1", "delta2"):
        for coupling in _FIG3_COUPLINGS:
            config = SweepConfig(
                coupling=coupling, drive=0.5,
                axes=(SweepAxis(scan, *_DETUNING_AXIS),), workers=workers,
            )
            sweeps[(scan, coupling)] = run_sweep(config)
    grid = SweepAxis("delta1", *_DETUNING_AXIS).values()
    paths = []
    panels = {}
    panel_defs = [
        ("fig3a", "delta1", "s1_abs"), ("fig3b", "delta1", "s2_abs"),
        ("fig3c", "delta1", "s3_abs"), ("fig3d", "delta2", "s1_abs"),
        ("fig3e", "delta2", "s2_abs"), ("fig3f", "delta2", "s3_abs"),
    ]
    for name, scan, column in panel_defs:
        curves = {
            f"{column}_V{coupling:g}": sweeps[(scan, coupling)].column(column)
            for coupling in _FIG3_COUPLINGS
        }
        config = SweepConfig(drive=0.5, axes=(SweepAxis(scan, *_DETUNING_AXIS),))
        extra = {
            "figure": name,
            "couplings": ", ".join(f"{c:g}" for c in _FIG3_COUPLINGS),
        }
        lines = _header(config, extra, skip=("coupling",))
        lines.append(",".join([scan] + list(curves)))
        for i, value in enumerate(grid):
            lines.append(",".join([_fmt(value)] + [_fmt(c[i]) for c in curves.values()]))
        paths.append(_write_lines(os.path.join(outdir, f"{name}.csv"), lines))
        panels[name] = (scan, column, curves)
    if plot:
        from .plotting import render_curve_panels

        paths.append(render_curve_panels(
            os.path.join(outdir, "fig3.png"), grid, panels,
        ))
    return paths


def _map_tables(figure_id, outdir, plot, sweeps, panel_defs):
    """Long-format (x, y, value) tables for 2-axis sweeps, one per panel."""
    paths = []
    panels = {}
    for name, key, column in panel_defs:
        result = sweeps[key]
        x_name, y_name = (axis.name for axis in result.config.axes)
        lines = _header(result.config, {"figure": name})
        lines.append(",".join([x_name, y_name, column]))
        xs = result.column(x_name)
        ys = result.column(y_name)
        zs = result.column(column)
        for x, y, z in zip(xs, ys, zs):
            lines.append(",".join([_fmt(x), _fmt(y), _fmt(z)]))
        paths.append(_write_lines(os.path.join(outdir, f"{name}.csv"), lines))
        x_vals = result.config.axes[0].values()
        y_vals = result.config.axes[1].values()
        panels[name] = (
            x_vals, y_vals, zs.reshape(x_vals.size, y_vals.size), x_name, y_name, column,
        )
    if plot:
        from .plotting import render_map_panels

        paths.append(render_map_panels(os.path.join(outdir, f"{figure_id}.png"), panels))
    return paths


def _reproduce_detuning_maps(figure_id, outdir, plot, workers):
    sweeps = {}
    for coupling in _FIG4_COUPLINGS:
        config = SweepConfig(
            coupling=coupling, drive=0.5,
            axes=(SweepAxis("delta1", *_MAP_AXIS), SweepAxis("delta2", *_MAP_AXIS)),
            workers=workers,
        )
        sweeps[coupling] = run_sweep(config)
    panel_defs = [
        ("fig4a", 0.6, "s1_abs"), ("fig4b", 0.6, "s2_abs"), ("fig4c", 0.6, "s3_abs"),
        ("fig4d", 4.0, "s1_abs"), ("fig4e", 4.0, "s2_abs"), ("fig4f", 4.0, "s3_abs"),
    ]
    return _map_tables(figure_id, outdir, plot, sweeps, panel_defs)


def _reproduce_damping_maps(figure_id, outdir, plot, workers):
    sweeps = {}
    for scan in ("delta1", "delta2"):
        config = SweepConfig(
            coupling=_FIG5_COUPLING, drive=0.5,
            axes=(SweepAxis(scan, *_MAP_AXIS), SweepAxis("gamma2", *_GAMMA2_AXIS)),
            workers=workers,
        )
        sweeps[scan] = run_sweep(config)
    panel_defs = [
        ("fig5a", "delta1", "s1_abs"), ("fig5b", "delta1", "s2_abs"),
        ("fig5c", "delta1", "s3_abs"), ("fig5d", "delta2", "s1_abs"),
        ("fig5e", "delta2", "s2_abs"), ("fig5f", "delta2", "s3_abs"),
    ]
    return _map_tables(figure_id, outdir, plot, sweeps, panel_defs)


def _reproduce_perturbative_maps(figure_id, outdir, plot, workers):
    couplings = np.linspace(*_COUPLING_AXIS)
    grid = np.linspace(0.0, 2.0 * np.pi, 256, endpoint=False)
    paths = []
    matrices = {}
    for tag, drive in (("figS1a", 0.1), ("figS1b", 0.5)):
        rows = []
        for coupling in couplings:
            params = SystemParams(gamma2=10.0, coupling=coupling, drive=drive)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", PerturbationRegimeWarning)
                dist, _ = perturbative_phase_distribution(params, max_order=2)
            rows.append(dist.values)
        matrix = np.array(rows)
        matrices[tag] = matrix
        config = SweepConfig(
            drive=drive, axes=(SweepAxis("coupling", *_COUPLING_AXIS),),
        )
        extra = {
            "figure": tag,
            "values": "perturbative P(phi) rows over the coupling axis",
            "note": ("couplings above 0.1*(gamma1+gamma2) are outside the "
                     "expansion's validity window"),
        }
        lines = _header(config, extra)
        lines.append(",".join(["coupling"] + [f"p{k:03d}" for k in range(256)]))
        for value, row in zip(couplings, matrix):
            lines.append(",".join([_fmt(value)] + [_fmt(v) for v in row]))
        paths.append(_write_lines(os.path.join(outdir, f"{tag}.csv"), lines))
    if plot:
        from .plotting import render_phase_map_pair

        paths.append(render_phase_map_pair(
            os.path.join(outdir, f"{figure_id}.png"), couplings, grid, matrices,
        ))
    return paths
