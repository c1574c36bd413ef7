"""Complex linear-algebra kernels: permanents, unitarity checks, Haar sampling.

Everything here is a pure function over immutable inputs; safe to call
concurrently.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import DimensionError, UnitarityError

UNITARITY_TOL = 1e-10

# Ryser has 2^n subsets; past this the kernel is the wrong tool anyway.
MAX_PERMANENT_DIM = 20


def as_complex_matrix(matrix) -> np.ndarray:
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got array of shape {a.shape}")
    return a


def _require_square(a: np.ndarray) -> int:
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got {a.shape[0]}x{a.shape[1]}")
    return a.shape[0]


def permanent(matrix) -> complex:
    """Permanent of a square matrix via Ryser's formula with Gray-code updates.

    Runs in O(2^n * n); the empty matrix has permanent 1.
    """
    a = as_complex_matrix(matrix)
    n = _require_square(a)
    if n == 0:
        return 1 + 0j
    if n > MAX_PERMANENT_DIM:
        raise DimensionError(f"permanent supports n <= {MAX_PERMANENT_DIM}, got {n}")
    row_sums = np.zeros(n, dtype=complex)
    total = 0 + 0j
    gray = 0
    for k in range(1, 1 << n):
        new_gray = k ^ (k >> 1)
        bit = gray ^ new_gray
        j = bit.bit_length() - 1
        if new_gray & bit:
            row_sums += a[:, j]
        else:
            row_sums -= a[:, j]
        if bin(new_gray).count("1") & 1:
            total -= np.prod(row_sums)
        else:
            total += np.prod(row_sums)
        gray = new_gray
    if n & 1:
        total = -total
    return complex(total)


def permanent_naive(matrix) -> complex:
    """Permutation-sum definition of the permanent; O(n * n!).

    Kept as an independent oracle for the Ryser kernel.
    """
    a = as_complex_matrix(matrix)
    n = _require_square(a)
    total = 0 + 0j
    for sigma in itertools.permutations(range(n)):
        prod = 1 + 0j
        for i, j in enumerate(sigma):
            prod *= a[i, j]
        total += prod
    return complex(total)


def is_unitary(matrix, tol: float = UNITARITY_TOL) -> bool:
    """True iff max-norm of U†U - I is within tol. Non-square input is not unitary."""
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    m = a.shape[0]
    return bool(np.max(np.abs(a.conj().T @ a - np.eye(m))) <= tol)


def require_unitary(matrix, tol: float = UNITARITY_TOL, what: str = "matrix") -> np.ndarray:
    a = as_complex_matrix(matrix)
    _require_square(a)
    if not is_unitary(a, tol):
        dev = float(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))))
        raise UnitarityError(f"{what} is not unitary at tol {tol:g} (max deviation {dev:.3e})")
    return a


def random_unitary(m: int, seed: int) -> np.ndarray:
    """Haar-distributed m x m unitary, deterministic per seed.

    QR of a complex Gaussian matrix with the R diagonal phase folded back in
    (Mezzadri's construction).
    """
    if m < 1:
        raise DimensionError(f"mode count must be >= 1, got {m}")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def normalize_global_phase(matrix) -> np.ndarray:
    """Rotate a matrix so its first non-negligible entry of column 0 is real positive."""
    a = as_complex_matrix(matrix).copy()
    col = a[:, 0]
    idx = np.flatnonzero(np.abs(col) > 1e-12)
    if idx.size:
        a *= np.exp(-1j * np.angle(col[idx[0]]))
    return a
