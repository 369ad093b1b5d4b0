"""Perturbative steady state in the weak coupling/drive limit.

The density matrix is organized into excitation-conserving coherence
stripes rho^(p)_{nm} = <n, m+p| rho |n+p, m>.  Stripe p is fed by stripe
p-1 through the excitation exchange and relaxes with the rate

    Gamma^(p)_{nm} = gamma1 (n+m+p+2)
        + (gamma2/2) (n(n-1) + m(m-1) + (n+p)(n+p-1) + (m+p)(m+p-1)),

(each dissipator contributes half the bra-side plus ket-side diagonal rate;
the gamma1 group already carries that half inside (n+m+p+2)).  The
stationary stripe is rho^(p) = nu / lambda with
lambda = i(delta1-delta2) p - Gamma and the coupling source

    nu = iV ( sqrt((n+1)(m+p)) rho^(p-1)_{n+1,m}
              - sqrt((n+p)(m+1)) rho^(p-1)_{n,m+1} ).

The drive does not source these stripes: it moves only mode-1 quanta, so
it cannot build the cross-mode coherence a stripe element carries — with
V = 0 every stripe vanishes identically for any drive, and the full-solver
oracle confirms that a drive source term here would be spurious.  The
drive's influence on the relative phase enters only beyond this expansion.

The p = 0 stripe is the product of the two uncoupled oscillator steady
states, whose populations solve the gain / two-phonon-loss balance

    gamma1 n p_{n-1} - gamma1 (n+1) p_n
        + gamma2 (n+2)(n+1) p_{n+2} - gamma2 n(n-1) p_n = 0.

The hierarchy drops the stripe-internal dissipative recycling terms and
the downward feed from stripe p+1; it is accurate when V, E are small
compared to gamma1 + gamma2 and the populations stay near the bottom of
the ladder (gamma2 well above gamma1).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import PerturbationRegimeWarning, ResonanceError
from .fock import TruncationSpec
from .liouvillian import SystemParams
from .observables import PhaseDistribution, _phase_grid, assemble_relative_distribution

MAX_ORDER = 2


def single_oscillator_populations(gamma1: float, gamma2: float, n_max: int) -> np.ndarray:
    """Steady-state number populations of one van der Pol oscillator.

    Solves the truncated birth-death balance between linear gain and
    two-phonon loss.  gamma2 = 0 is rejected: without the nonlinearity the
    gain-only ladder has no normalizable steady state.
    """
    if gamma1 <= 0:
        raise ValueError(f"gamma1 must be positive, got {gamma1}")
    if gamma2 <= 0:
        raise ValueError(
            "gamma2 must be positive: a gain-only oscillator has no confining "
            "nonlinearity and no normalizable steady state"
        )
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    dim = n_max + 1
    rates = np.zeros((dim, dim))
    for n in range(n_max):  # gain n -> n+1 at gamma1 (n+1)
        rate = gamma1 * (n + 1)
        rates[n + 1, n] += rate
        rates[n, n] -= rate
    for n in range(2, dim):  # two-phonon loss n -> n-2 at gamma2 n(n-1)
        rate = gamma2 * n * (n - 1)
        rates[n - 2, n] += rate
        rates[n, n] -= rate
    rates[0, :] = 1.0  # normalization replaces one dependent balance row
    rhs = np.zeros(dim)
    rhs[0] = 1.0
    return np.linalg.solve(rates, rhs)


@dataclass
class CoherenceBlock:
    """One excitation-conserving stripe rho^(p)_{nm} on the truncated space.

    values[n, m] holds <n, m+p| rho |n+p, m>; entries with n+p or m+p
    outside the truncation are identically zero.
    """

    order: int
    trunc: TruncationSpec
    values: np.ndarray

    def valid_shape(self) -> tuple[int, int]:
        return (self.trunc.dim_1 - self.order, self.trunc.dim_2 - self.order)

    def stripe_sum(self) -> complex:
        rows, cols = self.valid_shape()
        return complex(np.sum(self.values[:rows, :cols]))


def decay_rate(n: int, m: int, p: int, gamma1: float, gamma2: float) -> float:
    """Stripe relaxation rate Gamma^(p)_{nm}."""
    return gamma1 * (n + m + p + 2) + 0.5 * gamma2 * (
        n * (n - 1) + m * (m - 1) + (n + p) * (n + p - 1) + (m + p) * (m + p - 1)
    )


def stripe_eigenvalue(n: int, m: int, p: int, params: SystemParams) -> complex:
    """lambda^(p)_{nm} = i(delta1 - delta2) p - Gamma^(p)_{nm}."""
    return 1j * (params.delta1 - params.delta2) * p - decay_rate(
        n, m, p, params.gamma1, params.gamma2
    )


def zeroth_order(params: SystemParams) -> CoherenceBlock:
    """Unperturbed diagonal steady state: product of two single-oscillator ones."""
    trunc = params.trunc
    pop1 = single_oscillator_populations(params.gamma1, params.gamma2, trunc.n_max_1)
    pop2 = single_oscillator_populations(params.gamma1, params.gamma2, trunc.n_max_2)
    return CoherenceBlock(order=0, trunc=trunc, values=np.outer(pop1, pop2).astype(complex))


def correction(params: SystemParams, p: int, lower: CoherenceBlock) -> CoherenceBlock:
    """Stripe p from stripe p-1 via the stationary source/decay balance."""
    if p < 1:
        raise ValueError(f"correction order must be >= 1, got {p}")
    if lower.order != p - 1:
        raise ValueError(f"need stripe {p - 1} to build stripe {p}, got {lower.order}")
    trunc = params.trunc
    coupling = params.coupling

    def read(n, m):
        if 0 <= n < trunc.dim_1 and 0 <= m < trunc.dim_2:
            return lower.values[n, m]
        return 0.0

    values = np.zeros((trunc.dim_1, trunc.dim_2), dtype=complex)
    for n in range(trunc.dim_1 - p):
        for m in range(trunc.dim_2 - p):
            nu = 1j * coupling * (
                np.sqrt((n + 1) * (m + p)) * read(n + 1, m)
                - np.sqrt((n + p) * (m + 1)) * read(n, m + 1)
            )
            lam = stripe_eigenvalue(n, m, p, params)
            if abs(lam) < 1e-14:
                raise ResonanceError(
                    f"stripe eigenvalue vanished at (n={n}, m={m}, p={p})"
                )
            values[n, m] = nu / lam
    return CoherenceBlock(order=p, trunc=trunc, values=values)


def coherence_blocks(params: SystemParams, max_order: int) -> list[CoherenceBlock]:
    """Stripes 0..max_order of the perturbative steady state."""
    if not 0 <= max_order <= MAX_ORDER:
        raise ValueError(f"max_order must be in 0..{MAX_ORDER}, got {max_order}")
    blocks = [zeroth_order(params)]
    for p in range(1, max_order + 1):
        blocks.append(correction(params, p, blocks[-1]))
    return blocks


def _check_regime(params: SystemParams):
    window = 0.1 * (params.gamma1 + params.gamma2)
    if params.coupling > window or params.drive > window:
        warnings.warn(
            f"coupling/drive ({params.coupling}, {params.drive}) outside the "
            f"weak-perturbation window {window:.3g} = 0.1*(gamma1+gamma2)",
            PerturbationRegimeWarning,
            stacklevel=3,
        )


def perturbative_phase_distribution(
    params: SystemParams, max_order: int = MAX_ORDER, grid_size: int = 256
):
    """Relative-phase distribution assembled from stripes up to max_order.

    Returns (PhaseDistribution, coefficients) where the coefficients are the
    Fourier projections of the assembled distribution onto sin(phi) (fed by
    order 1) and cos(2 phi) (fed by order 2).
    """
    if not 1 <= max_order <= MAX_ORDER:
        raise ValueError(f"max_order must be 1 or {MAX_ORDER}, got {max_order}")
    _check_regime(params)
    blocks = coherence_blocks(params, max_order)
    grid = _phase_grid(grid_size)
    stripes = {block.order: block.stripe_sum() for block in blocks[1:]}
    values = assemble_relative_distribution(stripes, grid)
    dist = PhaseDistribution(grid=grid, values=values, kind="relative")
    cell = dist.cell
    coefficients = {
        "sin_phi": float(np.sum(values * np.sin(grid)) * cell / np.pi),
        "cos_2phi": float(np.sum(values * np.cos(2.0 * grid)) * cell / np.pi),
    }
    return dist, coefficients


def fit_form_coefficients(
    gamma2: float,
    gamma1: float = 1.0,
    trunc: TruncationSpec | None = None,
    design=(0.02, 0.04, 0.06),
    grid_size: int = 256,
) -> dict:
    """Damping-dependent constants of the analytic phase-distribution forms.

    Over a small (V, E) design grid the sin(phi) projection is fit to
    c0*V + c1*E and the cos(2 phi) projection to c2*V^2 + c3*E*V + c4*E^2.
    Both fits are exact up to roundoff because the stripes are polynomial
    in (V, E) by construction.
    """
    trunc = trunc or TruncationSpec(5, 5)
    rows_lin, rows_quad, sin_proj, cos_proj = [], [], [], []
    for coupling in design:
        for drive in design:
            params = SystemParams(
                gamma1=gamma1, gamma2=gamma2, coupling=coupling, drive=drive,
                trunc=trunc,
            )
            _, coeff = perturbative_phase_distribution(params, MAX_ORDER, grid_size)
            rows_lin.append([coupling, drive])
            rows_quad.append([coupling**2, drive * coupling, drive**2])
            sin_proj.append(coeff["sin_phi"])
            cos_proj.append(coeff["cos_2phi"])
    lin, lin_res = np.linalg.lstsq(np.array(rows_lin), np.array(sin_proj), rcond=None)[:2]
    quad, quad_res = np.linalg.lstsq(np.array(rows_quad), np.array(cos_proj), rcond=None)[:2]
    return {
        "c0": float(lin[0]),
        "c1": float(lin[1]),
        "c2": float(quad[0]),
        "c3": float(quad[1]),
        "c4": float(quad[2]),
        "sin_fit_residual": float(lin_res[0]) if lin_res.size else 0.0,
        "cos_fit_residual": float(quad_res[0]) if quad_res.size else 0.0,
    }
