"""Truncated Fock-space ladder operators for the two-oscillator system.

All operators are sparse complex CSR matrices.  The two-mode basis is
oscillator-1 major: the composite index of |n,m> is k = n*(n_max_2+1) + m,
and every module in the package shares this ordering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import InvalidTruncationError


@dataclass(frozen=True)
class TruncationSpec:
    """Per-mode Fock cutoffs; mode i keeps the number states |0..n_max_i>."""

    n_max_1: int
    n_max_2: int

    def __post_init__(self):
        if self.n_max_1 < 1 or self.n_max_2 < 1:
            raise InvalidTruncationError(
                f"n_max must be >= 1 per mode, got ({self.n_max_1}, {self.n_max_2})"
            )

    @property
    def dim_1(self) -> int:
        return self.n_max_1 + 1

    @property
    def dim_2(self) -> int:
        return self.n_max_2 + 1

    @property
    def dim(self) -> int:
        """Total Hilbert-space dimension (n_max_1+1)*(n_max_2+1)."""
        return self.dim_1 * self.dim_2

    def index(self, n: int, m: int) -> int:
        """Composite basis index of |n,m> under oscillator-1-major ordering."""
        if not (0 <= n <= self.n_max_1 and 0 <= m <= self.n_max_2):
            raise IndexError(f"state |{n},{m}> outside truncation {self}")
        return n * self.dim_2 + m

    def labels(self):
        """All (n, m) pairs in composite-index order."""
        return [(n, m) for n in range(self.dim_1) for m in range(self.dim_2)]

    def basis_state(self, n: int, m: int) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=complex)
        vec[self.index(n, m)] = 1.0
        return vec


def annihilation(n_max: int) -> sp.csr_matrix:
    """Single-mode annihilation operator on |0..n_max>: a[n-1, n] = sqrt(n)."""
    if n_max < 1:
        raise InvalidTruncationError(f"n_max must be >= 1, got {n_max}")
    offdiag = np.sqrt(np.arange(1, n_max + 1, dtype=float))
    return sp.diags(offdiag, offsets=1, dtype=complex, format="csr")


def creation(n_max: int) -> sp.csr_matrix:
    """Adjoint of :func:`annihilation` on the same truncated ladder."""
    return annihilation(n_max).conj().T.tocsr()


def lift(op: sp.spmatrix, which: int, trunc: TruncationSpec) -> sp.csr_matrix:
    """Embed a single-mode operator into the two-mode space.

    which=1 returns op (x) I, which=2 returns I (x) op, in the fixed
    oscillator-1-major basis ordering.
    """
    if which not in (1, 2):
        raise ValueError(f"which must be 1 or 2, got {which}")
    expected = trunc.dim_1 if which == 1 else trunc.dim_2
    if op.shape != (expected, expected):
        raise ValueError(
            f"operator shape {op.shape} does not match mode-{which} dimension {expected}"
        )
    if which == 1:
        out = sp.kron(op, sp.identity(trunc.dim_2, dtype=complex), format="csr")
    else:
        out = sp.kron(sp.identity(trunc.dim_1, dtype=complex), op, format="csr")
    out.eliminate_zeros()
    return out


def mode_annihilation(which: int, trunc: TruncationSpec) -> sp.csr_matrix:
    """Two-mode annihilation operator a_1 or a_2."""
    n_max = trunc.n_max_1 if which == 1 else trunc.n_max_2
    return lift(annihilation(n_max), which, trunc)


def number_operator(which: int, trunc: TruncationSpec) -> sp.csr_matrix:
    """Two-mode number operator, diagonal with eigenvalue n (m) on |n,m>."""
    n_max = trunc.n_max_1 if which == 1 else trunc.n_max_2
    diag = np.arange(n_max + 1, dtype=float)
    return lift(sp.diags(diag, dtype=complex, format="csr"), which, trunc)
