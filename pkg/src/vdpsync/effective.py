"""Non-Hermitian effective model on the lowest excitation manifolds.

Restricted to the six states {|00>, |10>, |01>, |20>, |11>, |02>}, the
effective Hamiltonian adds to the coherent part anti-Hermitian gain/loss
terms -i(gamma1/2) a_i a_i^dag - i(gamma2/2) a_i^dag^2 a_i^2 per mode.  Note
the gain term uses a a^dag (not a^dag a): acting on |n> it contributes
(n+1), which is what produces the 3/2 gamma1 width of the one-phonon
states.

Stationary amplitudes are computed in the weak-drive hierarchy: the ground
state is an undepleted source (c00 = 1), the one-phonon amplitudes solve a
2x2 system fed by c00, and the two-phonon amplitudes solve a 3x3 system fed
by the one-phonon pair.  Within each manifold the amplitude ratios are then
exact, e.g. c01/c10 = -V / (delta2 - 1.5i*gamma1) for every drive strength.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NearSingularityError
from .liouvillian import SystemParams

ANSATZ_STATES = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))

_COND_LIMIT = 1e12


@dataclass
class AmplitudeVector:
    """Stationary amplitudes of the six-state ansatz (c00 pinned to 1)."""

    c00: complex
    c10: complex
    c01: complex
    c20: complex
    c11: complex
    c02: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.c00, self.c10, self.c01, self.c20, self.c11, self.c02])

    @property
    def ratio_01_10(self) -> complex:
        """Amplitude ratio c01 / c10 of the one-phonon manifold."""
        return self.c01 / self.c10


@dataclass
class NormalModeSet:
    """Eigenpairs of the Hermitian (drive-free) block of one phonon manifold."""

    subspace: int
    energies: np.ndarray  # ascending
    vectors: np.ndarray  # columns match energies
    basis: tuple  # (n, m) labels of the block rows


def build_effective_hamiltonian(params: SystemParams) -> np.ndarray:
    """6x6 complex matrix on the ansatz states, ordered as ANSATZ_STATES."""
    index = {state: k for k, state in enumerate(ANSATZ_STATES)}
    g1, g2 = params.gamma1, params.gamma2
    h = np.zeros((6, 6), dtype=complex)
    for (n, m), k in index.items():
        h[k, k] = (
            params.delta1 * n
            + params.delta2 * m
            - 0.5j * g1 * ((n + 1) + (m + 1))
            - 0.5j * g2 * (n * (n - 1) + m * (m - 1))
        )
        # E(a1 + a1^dag): |n,m> couples to |n-1,m> and |n+1,m>.
        if (n - 1, m) in index:
            h[index[(n - 1, m)], k] += params.drive * np.sqrt(n)
        if (n + 1, m) in index:
            h[index[(n + 1, m)], k] += params.drive * np.sqrt(n + 1)
        # V(a1^dag a2 + a1 a2^dag): excitation exchange within a manifold.
        if (n + 1, m - 1) in index:
            h[index[(n + 1, m - 1)], k] += params.coupling * np.sqrt((n + 1) * m)
        if (n - 1, m + 1) in index:
            h[index[(n - 1, m + 1)], k] += params.coupling * np.sqrt(n * (m + 1))
    return h


def _solve_block(block: np.ndarray, source: np.ndarray) -> np.ndarray:
    cond = np.linalg.cond(block)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise NearSingularityError(
            f"effective-model block is numerically singular (cond ~ {cond:.3e})",
            condition=float(cond),
        )
    return np.linalg.solve(block, source)


def solve_amplitudes(params: SystemParams) -> AmplitudeVector:
    """Weak-drive stationary amplitudes with the ground state as source."""
    if params.drive <= 0:
        raise ValueError("solve_amplitudes needs drive > 0 (the drive is the source)")
    h = build_effective_hamiltonian(params)
    # One-phonon manifold fed by c00 = 1.
    one = slice(1, 3)
    c1 = _solve_block(h[one, one], -h[one, 0])
    # Two-phonon manifold fed by the one-phonon amplitudes.
    two = slice(3, 6)
    c2 = _solve_block(h[two, two], -h[two, one] @ c1)
    return AmplitudeVector(1.0 + 0.0j, c1[0], c1[1], c2[0], c2[1], c2[2])


def normal_modes(params: SystemParams, subspace: int) -> NormalModeSet:
    """Eigensystem of the drive-free Hermitian coupling block (N = 1 or 2)."""
    d1, d2, v = params.delta1, params.delta2, params.coupling
    if subspace == 1:
        basis = ((1, 0), (0, 1))
        block = np.array([[d1, v], [v, d2]])
    elif subspace == 2:
        basis = ((2, 0), (1, 1), (0, 2))
        s2v = np.sqrt(2.0) * v
        block = np.array(
            [[2 * d1, s2v, 0.0], [s2v, d1 + d2, s2v], [0.0, s2v, 2 * d2]]
        )
    else:
        raise ValueError(f"subspace must be 1 or 2, got {subspace}")
    energies, vectors = np.linalg.eigh(block)
    return NormalModeSet(subspace=subspace, energies=energies, vectors=vectors, basis=basis)
