"""Hamiltonian and Lindblad generator of the driven, coupled oscillator pair.

The generator is

    d(rho)/dt = -i[H, rho] + sum_i gamma1*D[a_i^dag]rho + gamma2*D[a_i^2]rho,
    H = delta1*n1 + delta2*n2 + E*(a1 + a1^dag) + V*(a1^dag a2 + a1 a2^dag),

with D[X]rho = X rho X^dag - (X^dag X rho + rho X^dag X)/2.  Rates are in
units of the linear gain gamma1, which fixes the time scale.

Superoperators act on column-stacked density matrices: vec stacks columns,
so vec(X rho Y) = (Y^T kron X) vec(rho).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .fock import TruncationSpec, mode_annihilation, number_operator


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters in units of gamma1 plus the Fock truncation.

    delta1, delta2 are rotating-frame detunings (oscillator minus drive
    frequency); coupling is the excitation-exchange strength V and drive is
    the resonant force E on oscillator 1.  Both are taken real and
    non-negative (phases are a frame choice).
    """

    delta1: float = 0.0
    delta2: float = 0.0
    gamma2: float = 10.0
    coupling: float = 0.0
    drive: float = 0.0
    gamma1: float = 1.0
    trunc: TruncationSpec = field(default_factory=lambda: TruncationSpec(5, 5))

    def __post_init__(self):
        if self.gamma1 <= 0:
            raise ValueError(f"gamma1 must be positive, got {self.gamma1}")
        if self.gamma2 < 0:
            raise ValueError(f"gamma2 must be non-negative, got {self.gamma2}")
        if self.coupling < 0:
            raise ValueError(f"coupling must be non-negative, got {self.coupling}")
        if self.drive < 0:
            raise ValueError(f"drive must be non-negative, got {self.drive}")

    def replace(self, **changes) -> "SystemParams":
        from dataclasses import replace as _replace

        return _replace(self, **changes)


@dataclass(frozen=True)
class Liouvillian:
    """Sparse superoperator acting on column-stacked density matrices."""

    params: SystemParams
    matrix: sp.csr_matrix
    convention: str = "column-stacking"

    @property
    def dim(self) -> int:
        return self.params.trunc.dim


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stack a D x D matrix into a D^2 vector."""
    return np.asarray(rho, dtype=complex).flatten(order="F")


def unvectorize(vec: np.ndarray, dim: int) -> np.ndarray:
    """Inverse of :func:`vectorize`."""
    return np.asarray(vec, dtype=complex).reshape((dim, dim), order="F")


def build_hamiltonian(params: SystemParams) -> sp.csr_matrix:
    """Rotating-frame Hamiltonian (detunings, drive, excitation exchange)."""
    trunc = params.trunc
    a1 = mode_annihilation(1, trunc)
    a2 = mode_annihilation(2, trunc)
    h = params.delta1 * number_operator(1, trunc)
    h = h + params.delta2 * number_operator(2, trunc)
    h = h + params.drive * (a1 + a1.conj().T)
    h = h + params.coupling * (a1.conj().T @ a2 + a1 @ a2.conj().T)
    h = sp.csr_matrix(h)
    h.eliminate_zeros()
    return h


def _dissipator(x: sp.spmatrix) -> sp.csr_matrix:
    """Superoperator of D[X] under column stacking."""
    dim = x.shape[0]
    eye = sp.identity(dim, dtype=complex, format="csr")
    xdx = (x.conj().T @ x).tocsr()
    out = sp.kron(x.conj(), x) - 0.5 * (sp.kron(eye, xdx) + sp.kron(xdx.T, eye))
    return sp.csr_matrix(out)


def _hamiltonian_superop(ham: sp.spmatrix, dim: int) -> sp.csr_matrix:
    eye = sp.identity(dim, dtype=complex, format="csr")
    return sp.csr_matrix(-1j * (sp.kron(eye, ham) - sp.kron(ham.T, eye)))


@lru_cache(maxsize=8)
def _superop_components(trunc: TruncationSpec):
    """Parameter-independent superoperator pieces; the generator is their
    linear combination with coefficients (delta1, delta2, E, V, gamma1, gamma2)."""
    dim = trunc.dim
    a1 = mode_annihilation(1, trunc)
    a2 = mode_annihilation(2, trunc)
    gain = _dissipator(a1.conj().T.tocsr()) + _dissipator(a2.conj().T.tocsr())
    loss = _dissipator((a1 @ a1).tocsr()) + _dissipator((a2 @ a2).tocsr())
    return (
        _hamiltonian_superop(number_operator(1, trunc), dim),
        _hamiltonian_superop(number_operator(2, trunc), dim),
        _hamiltonian_superop((a1 + a1.conj().T).tocsr(), dim),
        _hamiltonian_superop((a1.conj().T @ a2 + a1 @ a2.conj().T).tocsr(), dim),
        sp.csr_matrix(gain),
        sp.csr_matrix(loss),
    )


def build_liouvillian(params: SystemParams) -> Liouvillian:
    """Assemble the full generator as a sparse D^2 x D^2 superoperator."""
    k1, k2, kd, kc, gain, loss = _superop_components(params.trunc)
    mat = (
        params.delta1 * k1
        + params.delta2 * k2
        + params.drive * kd
        + params.coupling * kc
        + params.gamma1 * gain
        + params.gamma2 * loss
    )
    mat = sp.csr_matrix(mat)
    mat.eliminate_zeros()
    return Liouvillian(params=params, matrix=mat)


def apply(liou: Liouvillian, rho: np.ndarray) -> np.ndarray:
    """Evaluate L(rho) as a matrix: de-vectorized matrix-vector product."""
    rho = np.asarray(rho, dtype=complex)
    dim = liou.dim
    if rho.shape != (dim, dim):
        raise ValueError(f"state shape {rho.shape} does not match dimension {dim}")
    return unvectorize(liou.matrix @ vectorize(rho), dim)
