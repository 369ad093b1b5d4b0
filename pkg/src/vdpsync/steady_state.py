"""Steady-state solver, RK4 time-evolution oracle and truncation convergence.

The primary solver replaces one (diagonal) row of the D^2 x D^2 generator
with the vectorized trace functional and right-hand side 1, then solves the
sparse system directly.  That pins Tr(rho) = 1 by construction and needs no
eigensolver.  A second solve with a different replaced row guards against a
degenerate null space.  The fixed-step RK4 integrator is kept as an
independent cross-check, not as a fallback path of the solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    DegenerateSteadyStateError,
    PositivityError,
    SolverFailureError,
    StepSizeError,
    TruncationFailureError,
)
from .fock import TruncationSpec
from .liouvillian import Liouvillian, SystemParams, build_liouvillian, unvectorize, vectorize


@dataclass
class DensityMatrix:
    """Dense Hermitian unit-trace state on the truncated two-mode space."""

    trunc: TruncationSpec
    mat: np.ndarray

    def __post_init__(self):
        self.mat = np.asarray(self.mat, dtype=complex)
        dim = self.trunc.dim
        if self.mat.shape != (dim, dim):
            raise ValueError(f"matrix shape {self.mat.shape} != ({dim}, {dim})")

    @classmethod
    def from_pure(cls, trunc: TruncationSpec, vec: np.ndarray) -> "DensityMatrix":
        vec = np.asarray(vec, dtype=complex)
        vec = vec / np.linalg.norm(vec)
        return cls(trunc, np.outer(vec, vec.conj()))

    @classmethod
    def vacuum(cls, trunc: TruncationSpec) -> "DensityMatrix":
        return cls.from_pure(trunc, trunc.basis_state(0, 0))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.mat - self.mat.conj().T)))

    def trace_error(self) -> float:
        return abs(np.trace(self.mat) - 1.0)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.mat + self.mat.conj().T))[0])

    def validate(self, herm_tol=1e-12, trace_tol=1e-12, positivity_tol=1e-10):
        """Check the state invariants, raising on violation.  Never projects."""
        herm = self.hermiticity_error()
        if herm > herm_tol:
            raise SolverFailureError(f"hermiticity error {herm:.3e} > {herm_tol:.1e}")
        tr = self.trace_error()
        if tr > trace_tol:
            raise SolverFailureError(f"trace error {tr:.3e} > {trace_tol:.1e}")
        mineig = self.min_eigenvalue()
        if mineig < -positivity_tol:
            raise PositivityError(
                f"minimum eigenvalue {mineig:.3e} below -{positivity_tol:.1e}"
            )
        return self


@dataclass
class SteadyStateSolution:
    rho: DensityMatrix
    residual: float
    method: str
    factorizations: int


def trace_distance(rho_a: np.ndarray, rho_b: np.ndarray) -> float:
    """T(a, b) = ||a - b||_1 / 2 for Hermitian a, b."""
    diff = np.asarray(rho_a) - np.asarray(rho_b)
    diff = 0.5 * (diff + diff.conj().T)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


def _constrained_matrix(liou: Liouvillian, diag_index: int) -> sp.csc_matrix:
    """Generator with the `diag_index`-th diagonal row replaced by the trace row.

    Only diagonal rows (those of d rho_kk / dt) are eligible: trace
    preservation makes them linearly dependent, so dropping one loses no
    information.
    """
    dim = liou.dim
    row = diag_index * (dim + 1)
    coo = liou.matrix.tocoo()
    keep = coo.row != row
    trace_cols = np.arange(dim, dtype=coo.col.dtype) * (dim + 1)
    rows = np.concatenate([coo.row[keep], np.full(dim, row, dtype=coo.row.dtype)])
    cols = np.concatenate([coo.col[keep], trace_cols])
    data = np.concatenate([coo.data[keep], np.ones(dim, dtype=complex)])
    size = dim * dim
    return sp.csc_matrix((data, (rows, cols)), shape=(size, size))


def _normalized_state(vec: np.ndarray, dim: int) -> np.ndarray:
    rho = unvectorize(vec, dim)
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.real(np.trace(rho))


def solve_steady_state(
    liou: Liouvillian, tol: float = 1e-10, check_unique: bool = True
) -> SteadyStateSolution:
    """Compute the unique trace-one fixed point of the generator.

    Raises SolverFailureError if the residual ||L(rho)||_F exceeds `tol`,
    DegenerateSteadyStateError if the null space is not one-dimensional
    (singular factorization, or an orthogonally perturbed second solve that
    does not collapse back to the same state), and PositivityError if the
    minimum eigenvalue drops below -1e-10.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    dim = liou.dim
    row = 0  # replace the vacuum-population row
    mat = _constrained_matrix(liou, 0)
    try:
        lu = spla.splu(mat)
    except RuntimeError as exc:
        # SuperLU only fails here on (numerically) singular input.
        raise DegenerateSteadyStateError(
            "singular constrained system: Liouvillian null space has dimension > 1"
        ) from exc
    rhs = np.zeros(dim * dim, dtype=complex)
    rhs[row] = 1.0
    sol = lu.solve(rhs)
    if not np.all(np.isfinite(sol)):
        raise DegenerateSteadyStateError(
            "non-finite solution: Liouvillian null space has dimension > 1"
        )
    rho = _normalized_state(sol, dim)
    solves = 1
    if check_unique:
        # A second solve with the right-hand side perturbed orthogonally to
        # the constraint must collapse to the same state; a near-degenerate
        # null space amplifies the perturbation instead.
        rng = np.random.default_rng(20240521)
        probe = rng.standard_normal(dim * dim) + 1j * rng.standard_normal(dim * dim)
        probe[row] = 0.0
        probe *= 1e-12 / np.linalg.norm(probe)
        other = lu.solve(rhs + probe)
        solves += 1
        if not np.all(np.isfinite(other)):
            raise DegenerateSteadyStateError(
                "perturbed solve diverged: Liouvillian null space has dimension > 1"
            )
        dist = trace_distance(rho, _normalized_state(other, dim))
        if dist > 1e-8:
            raise DegenerateSteadyStateError(
                f"perturbed solve does not collapse to the same state "
                f"(trace distance {dist:.3e}); steady state is not unique"
            )
    residual = float(np.linalg.norm(liou.matrix @ vectorize(rho)))
    if not np.isfinite(residual) or residual > tol:
        raise SolverFailureError(
            f"steady-state residual {residual:.3e} exceeds tolerance {tol:.1e}",
            residual=residual,
        )
    state = DensityMatrix(liou.params.trunc, rho)
    state.validate(herm_tol=1e-12, trace_tol=1e-12, positivity_tol=1e-10)
    return SteadyStateSolution(
        rho=state, residual=residual, method="trace-row direct solve",
        factorizations=solves,
    )


def spectral_bound(liou: Liouvillian, iters: int = 15, seed: int = 7) -> float:
    """Rough power-iteration bound on the generator's spectral radius."""
    rng = np.random.default_rng(seed)
    size = liou.matrix.shape[0]
    vec = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    vec /= np.linalg.norm(vec)
    bound = 1.0
    for _ in range(iters):
        vec = liou.matrix @ vec
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            return 0.0
        vec /= norm
        bound = norm
    return float(bound)


def evolve(
    liou: Liouvillian,
    rho0: DensityMatrix | np.ndarray,
    t_final: float,
    dt: float | None = None,
) -> DensityMatrix:
    """Propagate rho0 to t_final with fixed-step RK4 on the vectorized equation.

    The default step is 0.5 / max(spectral bound, gamma1), well inside the
    RK4 stability region.  Trace drift beyond 1e-6 during the run raises
    StepSizeError.
    """
    mat = liou.matrix
    rho_mat = rho0.mat if isinstance(rho0, DensityMatrix) else np.asarray(rho0)
    vec = vectorize(rho_mat)
    if t_final < 0:
        raise ValueError(f"t_final must be non-negative, got {t_final}")
    if t_final == 0:
        return DensityMatrix(liou.params.trunc, rho_mat.copy())
    if dt is None:
        dt = 0.5 / max(spectral_bound(liou), liou.params.gamma1)
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    steps = max(1, math.ceil(t_final / dt))
    dt = t_final / steps
    dim = liou.dim
    diag_idx = np.arange(dim) * (dim + 1)
    trace0 = np.real(vec[diag_idx].sum())
    for step in range(steps):
        k1 = mat @ vec
        k2 = mat @ (vec + 0.5 * dt * k1)
        k3 = mat @ (vec + 0.5 * dt * k2)
        k4 = mat @ (vec + dt * k3)
        vec = vec + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if step % 200 == 199 or step == steps - 1:
            trace = vec[diag_idx].sum()
            drift = abs(trace - trace0)
            if not np.isfinite(drift) or drift > 1e-6:
                raise StepSizeError(
                    f"trace drift {drift:.3e} after {step + 1} steps (dt={dt:.3e}); "
                    "reduce the step size"
                )
    return DensityMatrix(liou.params.trunc, unvectorize(vec, dim))


_CONVERGENCE_OBSERVABLES = ("n1", "n2", "s1", "s2", "s3")


def _observable_vector(params: SystemParams, names) -> np.ndarray:
    from .observables import sync_measures

    liou = build_liouvillian(params)
    sol = solve_steady_state(liou)
    report = sync_measures(sol.rho)
    values = {
        "n1": report.n1,
        "n2": report.n2,
        "s1": abs(report.s1) if report.s1 is not None else 0.0,
        "s2": abs(report.s2) if report.s2 is not None else 0.0,
        "s3": abs(report.s3) if report.s3 is not None else 0.0,
    }
    return np.array([values[name] for name in names])


def check_convergence(
    params: SystemParams,
    observables=_CONVERGENCE_OBSERVABLES,
    step: int = 1,
    tol: float = 1e-4,
    start: int = 2,
    cap: int = 12,
) -> TruncationSpec:
    """Smallest symmetric truncation whose observables are stable under growth.

    Returns the first n_max (from `start`) such that every requested
    observable moves by less than `tol` when n_max increases by `step`.
    Raises TruncationFailureError if nothing converges below `cap`.
    """
    unknown = set(observables) - set(_CONVERGENCE_OBSERVABLES)
    if unknown:
        raise ValueError(f"unknown observables {sorted(unknown)}")
    cache: dict[int, np.ndarray] = {}

    def at(n_max: int) -> np.ndarray:
        if n_max not in cache:
            cache[n_max] = _observable_vector(
                params.replace(trunc=TruncationSpec(n_max, n_max)), observables
            )
        return cache[n_max]

    for n_max in range(start, cap - step + 1):
        change = float(np.max(np.abs(at(n_max + step) - at(n_max))))
        if change < tol:
            return TruncationSpec(n_max, n_max)
    raise TruncationFailureError(
        f"observables did not converge to {tol:.1e} below n_max = {cap}"
    )
