"""Dense complex linear algebra kernel.

Small, self-contained layer the rest of the package builds on: Kronecker
products, Hermitian eigendecomposition, positivity tests, and the
package-wide numerical tolerances.  Matrices are plain square
``numpy.ndarray`` values of dtype complex, stored row-major.
"""

from __future__ import annotations

from typing import TypeAlias

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotHermitian, ValidationError

#: Square complex matrix carrier used throughout the package.
ComplexMatrix: TypeAlias = np.ndarray

# Centralized tolerances; every validation accepts an override.
HERMITIAN_ATOL = 1e-10
RECONSTRUCTION_ATOL = 1e-9
PSD_ATOL = 1e-9
TRACE_ATOL = 1e-9


def as_matrix(m, what: str = "matrix") -> ComplexMatrix:
    """Coerce ``m`` to a square complex matrix with finite entries."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{what} must be square, got shape {a.shape}")
    if a.shape[0] < 1:
        raise DimensionMismatch(f"{what} must be at least 1x1")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{what} has non-finite entries")
    return a


def dagger(m: ComplexMatrix) -> ComplexMatrix:
    """Conjugate transpose."""
    return np.asarray(m).conj().T


def hermiticity_residual(m: ComplexMatrix) -> float:
    """Largest entrywise deviation of ``m`` from its conjugate transpose."""
    return float(np.max(np.abs(m - dagger(m))))


def require_hermitian(m: ComplexMatrix, tol: float = HERMITIAN_ATOL, what: str = "matrix") -> ComplexMatrix:
    """Validate Hermiticity within ``tol``; returns the coerced matrix."""
    a = as_matrix(m, what)
    residual = hermiticity_residual(a)
    if residual > tol:
        raise NotHermitian(f"{what} is not Hermitian: max |m - m^dag| = {residual:.3e} > {tol:.1e}")
    return a


def matrix_unit(n: int, i: int, j: int) -> ComplexMatrix:
    """The n-by-n matrix with a single 1 at row ``i``, column ``j`` (0-based)."""
    if not (0 <= i < n and 0 <= j < n):
        raise DimensionMismatch(f"matrix unit indices ({i}, {j}) out of range for n={n}")
    out = np.zeros((n, n), dtype=complex)
    out[i, j] = 1.0
    return out


def kron(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    """Kronecker product of two square complex matrices.

    Entry convention: ``kron(a, b)[p*db + q, r*db + s] = a[p, r] * b[q, s]``
    where ``db = dim(b)``.  In particular the product of two matrix units is
    again a matrix unit of the combined index.
    """
    return np.kron(as_matrix(a, "kron operand a"), as_matrix(b, "kron operand b"))


def hermitian_eigen(m: ComplexMatrix, tol: float = HERMITIAN_ATOL) -> tuple[np.ndarray, ComplexMatrix]:
    """Eigendecomposition of a Hermitian matrix.

    Args:
        m: Hermitian matrix (checked within ``tol``).
        tol: Hermiticity tolerance.

    Returns:
        ``(eigenvalues, eigenvectors)`` with real eigenvalues sorted in
        descending order and eigenvectors as the matching columns of a
        unitary matrix.  Within degenerate eigenvalue groups the column
        order is unspecified.

    Raises:
        NotHermitian: if the input fails the Hermiticity check.
        NoConvergence: if the underlying iterative diagonalization fails.
    """
    a = require_hermitian(m, tol)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"eigendecomposition did not converge: {exc}") from exc
    return w[::-1].copy(), v[:, ::-1].copy()


def min_eigenvalue(m: ComplexMatrix, tol: float = HERMITIAN_ATOL) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    w, _ = hermitian_eigen(m, tol)
    return float(w[-1])


def is_psd(m: ComplexMatrix, tol: float = PSD_ATOL) -> bool:
    """True iff the Hermitian matrix ``m`` has min eigenvalue >= -tol."""
    return min_eigenvalue(m) >= -tol
