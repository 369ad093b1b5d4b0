"""Phase distributions and synchronization measures of a two-mode state.

Phases are defined through the (unnormalized) phase states
|phi> = sum_n exp(i n phi) |n>.  The single-oscillator distribution is
P(phi) = <phi| rho_red |phi> / 2pi.  The relative-phase distribution for
phi = phi_2 - phi_1 follows from integrating the joint distribution
<phi_1, phi_2| rho |phi_1, phi_2> over the mean phase, which collects the
excitation-conserving coherences <n, m+p| rho |n+p, m>:

    P(phi) = 1/2pi + (1/pi) Re sum_{p>=1} e^{-i p phi} sum_{n,m} <n,m+p|rho|n+p,m>.

(The e^{-i p phi} kernel is what the phi_2 - phi_1 orientation demands; it
locates the driven-locking peak at 3pi/2, consistent with the phase of the
mutual measure below.)

The synchronization measures are the normalized first-order coherences
s_i = <a_i^dag> / sqrt(<n_i>) (oscillator-to-drive, i = 1, 2) and
s3 = <a1^dag a2> / sqrt(<n1><n2>) (mutual); their moduli are bounded by 1,
and the locked relative phase sits at -arg(s3).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fock import TruncationSpec, mode_annihilation, number_operator
from .liouvillian import SystemParams
from .steady_state import DensityMatrix

DEFAULT_GRID_SIZE = 256

# Occupations below this are treated as zero; dividing by them would make
# the measures meaningless rather than merely noisy.
OCCUPATION_FLOOR = 1e-14


@dataclass
class PhaseDistribution:
    """P on a uniform phase grid over [0, 2pi); kind tags which phase."""

    grid: np.ndarray
    values: np.ndarray
    kind: str  # "single-1" | "single-2" | "relative"

    @property
    def cell(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def normalization_error(self) -> float:
        return abs(float(np.sum(self.values)) * self.cell - 1.0)

    def local_maxima(self) -> np.ndarray:
        """Indices of strict local maxima on the periodic grid."""
        return strict_local_maxima(self.values, circular=True)

    def argmax_phase(self) -> float:
        return float(self.grid[int(np.argmax(self.values))])


@dataclass
class SyncReport:
    """Synchronization measures and occupations for one parameter point.

    A measure is None when the occupation it divides by is zero (flagged as
    undefined rather than NaN).
    """

    s1: complex | None
    s2: complex | None
    s3: complex | None
    n1: float
    n2: float
    params: SystemParams | None = None


def _runs(vals: np.ndarray):
    """Start indices of the plateaus (runs of equal consecutive values)."""
    starts = [0]
    for i in range(1, vals.size):
        if vals[i] != vals[starts[-1]]:
            starts.append(i)
    return starts


def strict_local_maxima(values: np.ndarray, circular: bool = False) -> np.ndarray:
    """Strict local maxima of a sampled curve, no smoothing.

    A plateau (run of equal values) counts as one maximum at its smallest
    index, and only if it exceeds both neighboring runs.  For non-circular
    input the endpoints are not eligible.
    """
    vals = np.asarray(values, dtype=float)
    size = vals.size
    if size < 3:
        return np.array([], dtype=int)
    if not circular:
        starts = _runs(vals)
        run_vals = vals[starts]
        maxima = [
            starts[r]
            for r in range(1, len(starts) - 1)
            if run_vals[r] > run_vals[r - 1] and run_vals[r] > run_vals[r + 1]
        ]
        return np.array(maxima, dtype=int)
    # Rotate so the array begins at a run boundary; then no plateau wraps.
    boundaries = np.nonzero(vals != np.roll(vals, 1))[0]
    if boundaries.size == 0:
        return np.array([], dtype=int)  # constant curve, no strict maximum
    shift = int(boundaries[0])
    rolled = np.roll(vals, -shift)
    starts = _runs(rolled)
    starts.append(size)  # sentinel for run extents
    run_vals = rolled[starts[:-1]]
    n_runs = len(run_vals)
    maxima = []
    for r in range(n_runs):
        left = run_vals[(r - 1) % n_runs]
        right = run_vals[(r + 1) % n_runs]
        if run_vals[r] > left and run_vals[r] > right:
            original = [(i + shift) % size for i in range(starts[r], starts[r + 1])]
            maxima.append(min(original))
    return np.array(sorted(maxima), dtype=int)


@lru_cache(maxsize=32)
def _operator_bundle(trunc: TruncationSpec):
    a1 = mode_annihilation(1, trunc).toarray()
    a2 = mode_annihilation(2, trunc).toarray()
    return {
        "a1_dag": a1.conj().T,
        "a2_dag": a2.conj().T,
        "n1": number_operator(1, trunc).toarray(),
        "n2": number_operator(2, trunc).toarray(),
        "a1_dag_a2": a1.conj().T @ a2,
    }


def expectation(rho: DensityMatrix, op: np.ndarray) -> complex:
    return complex(np.trace(rho.mat @ op))


def partial_trace(rho: DensityMatrix, keep: int) -> np.ndarray:
    """Reduced density matrix of one mode (keep = 1 or 2)."""
    trunc = rho.trunc
    full = rho.mat.reshape(trunc.dim_1, trunc.dim_2, trunc.dim_1, trunc.dim_2)
    if keep == 1:
        return np.einsum("nmkm->nk", full)
    if keep == 2:
        return np.einsum("nmnk->mk", full)
    raise ValueError(f"keep must be 1 or 2, got {keep}")


def _phase_grid(grid_size: int) -> np.ndarray:
    if grid_size < 4:
        raise ValueError(f"grid_size must be >= 4, got {grid_size}")
    return np.linspace(0.0, 2.0 * np.pi, grid_size, endpoint=False)


def single_phase_distribution(
    rho: DensityMatrix, which: int, grid_size: int = DEFAULT_GRID_SIZE
) -> PhaseDistribution:
    """Phase distribution of one oscillator after tracing out the other."""
    reduced = partial_trace(rho, which)
    grid = _phase_grid(grid_size)
    levels = np.arange(reduced.shape[0])
    # (1/2pi) sum_{n,k} e^{i(k-n)phi} rho_red[n, k]
    phases = np.exp(1j * np.outer(grid, levels))  # [phi, level]
    values = np.einsum("pn,nk,pk->p", phases.conj(), reduced, phases) / (2.0 * np.pi)
    imag = float(np.max(np.abs(values.imag)))
    if imag > 1e-12:
        raise ValueError(f"phase distribution has imaginary residue {imag:.3e}")
    return PhaseDistribution(grid=grid, values=values.real, kind=f"single-{which}")


def coherence_stripe_sum(rho: DensityMatrix, p: int) -> complex:
    """sum_{n,m} <n, m+p| rho |n+p, m> over the truncated space."""
    trunc = rho.trunc
    total = 0.0 + 0.0j
    for n in range(trunc.dim_1 - p):
        for m in range(trunc.dim_2 - p):
            total += rho.mat[trunc.index(n, m + p), trunc.index(n + p, m)]
    return total


def assemble_relative_distribution(stripe_sums: dict, grid: np.ndarray) -> np.ndarray:
    """P(phi) on `grid` from stripe sums {p: sum_nm <n,m+p|rho|n+p,m>}."""
    values = np.full(grid.size, 1.0 / (2.0 * np.pi))
    for p, stripe in stripe_sums.items():
        values += np.real(np.exp(-1j * p * grid) * stripe) / np.pi
    return values


def relative_phase_distribution(
    rho: DensityMatrix, grid_size: int = DEFAULT_GRID_SIZE
) -> PhaseDistribution:
    """Distribution of the relative phase phi_2 - phi_1."""
    trunc = rho.trunc
    grid = _phase_grid(grid_size)
    p_max = max(trunc.n_max_1, trunc.n_max_2)
    stripes = {p: coherence_stripe_sum(rho, p) for p in range(1, p_max + 1)}
    return PhaseDistribution(
        grid=grid, values=assemble_relative_distribution(stripes, grid), kind="relative"
    )


def sync_measures(rho: DensityMatrix, params: SystemParams | None = None) -> SyncReport:
    """Synchronization measures and occupations of a state."""
    ops = _operator_bundle(rho.trunc)
    occ1 = float(np.real(expectation(rho, ops["n1"])))
    occ2 = float(np.real(expectation(rho, ops["n2"])))
    s1 = s2 = s3 = None
    if occ1 > OCCUPATION_FLOOR:
        s1 = expectation(rho, ops["a1_dag"]) / np.sqrt(occ1)
    if occ2 > OCCUPATION_FLOOR:
        s2 = expectation(rho, ops["a2_dag"]) / np.sqrt(occ2)
    if occ1 > OCCUPATION_FLOOR and occ2 > OCCUPATION_FLOOR:
        s3 = expectation(rho, ops["a1_dag_a2"]) / np.sqrt(occ1 * occ2)
    return SyncReport(s1=s1, s2=s2, s3=s3, n1=occ1, n2=occ2, params=params)
