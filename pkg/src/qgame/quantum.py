"""Quantum primitives: states, channels, chi matrices, and measurements.

A physical operation on n-dimensional states is carried either as a set of
Kraus operators ``{E_k}`` with ``sum_k E_k^dag E_k = I`` or as its chi matrix
over the matrix-unit operator basis.  The basis label pair ``(i, j)`` is
flattened 0-based row-major to ``a = i*n + j`` everywhere, so the chi matrix
of a channel on n-dimensional operators is an n^2-by-n^2 positive Hermitian
matrix obeying the trace-preservation sums

    sum_i chi[(i,j), (i,l)] = delta_jl

i.e. the partial trace of chi over the first index factor is the identity.
The set of all such matrices ("Omega") is exactly the set of completely
positive trace-preserving maps; it is compact and convex.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    CompletenessViolation,
    DimensionMismatch,
    NotInOmega,
    NotPositive,
    TraceConditionViolation,
    TraceNotOne,
    ValidationError,
)
from .linalg import ComplexMatrix


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class DensityMatrix:
    """A validated quantum state: positive Hermitian matrix of trace 1."""

    matrix: ComplexMatrix

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class KrausChannel:
    """A physical operation given by Kraus operators stacked along axis 0."""

    operators: np.ndarray  # shape (k, dim, dim)

    def __post_init__(self):
        object.__setattr__(self, "operators", _frozen(self.operators))

    @property
    def dim(self) -> int:
        return self.operators.shape[1]

    @property
    def n_operators(self) -> int:
        return self.operators.shape[0]


@dataclass(frozen=True)
class ChiMatrix:
    """A strategy in the chi representation over the matrix-unit basis.

    ``matrix`` has dimension n^2 with rows/columns labelled by the flattened
    basis index ``(i, j) -> i*n + j``.
    """

    matrix: ComplexMatrix
    n: int

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Povm:
    """A measurement: operators ``{M_k}`` with ``sum_k M_k^dag M_k = I``."""

    elements: np.ndarray  # shape (L, dim, dim)

    def __post_init__(self):
        object.__setattr__(self, "elements", _frozen(self.elements))

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    @property
    def outcome_count(self) -> int:
        return self.elements.shape[0]


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def validate_density(m: ComplexMatrix, tol: float | None = None) -> DensityMatrix:
    """Validate a candidate state; checks trace, Hermiticity, positivity.

    A single ``tol`` overrides all three per-check defaults.  The raised
    diagnostic names the first violated condition and carries the measured
    residual.
    """
    trace_tol = tol if tol is not None else linalg.TRACE_ATOL
    herm_tol = tol if tol is not None else linalg.HERMITIAN_ATOL
    psd_tol = tol if tol is not None else linalg.PSD_ATOL

    a = linalg.as_matrix(m, "density matrix")
    trace_residual = abs(complex(np.trace(a)) - 1.0)
    if trace_residual > trace_tol:
        raise TraceNotOne(f"trace(rho) differs from 1 by {trace_residual:.3e} > {trace_tol:.1e}")
    linalg.require_hermitian(a, herm_tol, "density matrix")
    lo = linalg.min_eigenvalue(a, herm_tol)
    if lo < -psd_tol:
        raise NotPositive(f"density matrix has eigenvalue {lo:.3e} < -{psd_tol:.1e}")
    return DensityMatrix(a)


def validate_kraus(ops, tol: float | None = None) -> KrausChannel:
    """Validate a set of Kraus operators.

    Args:
        ops: iterable of equal-dimension square complex matrices, or a
            stacked array of shape (k, n, n).
        tol: completeness tolerance, default 1e-9 per entry.

    Raises:
        DimensionMismatch: operators are not square or not all of equal size.
        CompletenessViolation: ``sum_k E_k^dag E_k`` deviates from identity.
    """
    tol = tol if tol is not None else linalg.TRACE_ATOL
    mats = [linalg.as_matrix(op, "Kraus operator") for op in ops]
    if not mats:
        raise DimensionMismatch("channel needs at least one Kraus operator")
    dim = mats[0].shape[0]
    if any(m.shape[0] != dim for m in mats):
        raise DimensionMismatch(f"Kraus operators have mixed dimensions {[m.shape[0] for m in mats]}")
    stacked = np.stack(mats)
    completeness = np.einsum("kai,kaj->ij", stacked.conj(), stacked)
    residual = float(np.max(np.abs(completeness - np.eye(dim))))
    if residual > tol:
        raise CompletenessViolation(
            f"sum_k E_k^dag E_k deviates from identity by {residual:.3e} > {tol:.1e}"
        )
    return KrausChannel(stacked)


def validate_chi(m: ComplexMatrix, n: int, tol: float | None = None) -> ChiMatrix:
    """Validate membership of ``m`` in the strategy set over n-dim operators.

    Checks, in order: Hermiticity, positivity, the trace-preservation sums
    ``sum_i chi[(i,j),(i,l)] = delta_jl``, and the necessary principal-minor
    condition ``chi_aa * chi_bb >= |chi_ab|^2`` (implied by positivity but
    asserted independently).
    """
    herm_tol = tol if tol is not None else linalg.HERMITIAN_ATOL
    psd_tol = tol if tol is not None else linalg.PSD_ATOL
    sum_tol = tol if tol is not None else linalg.TRACE_ATOL

    a = linalg.as_matrix(m, "chi matrix")
    if a.shape[0] != n * n:
        raise DimensionMismatch(f"chi matrix for n={n} must have dimension {n * n}, got {a.shape[0]}")
    linalg.require_hermitian(a, herm_tol, "chi matrix")
    lo = linalg.min_eigenvalue(a, herm_tol)
    if lo < -psd_tol:
        raise NotPositive(f"chi matrix has eigenvalue {lo:.3e} < -{psd_tol:.1e}")
    partial = np.einsum("ijil->jl", a.reshape(n, n, n, n))
    residual = float(np.max(np.abs(partial - np.eye(n))))
    if residual > sum_tol:
        raise TraceConditionViolation(
            f"trace-preservation sums deviate from identity by {residual:.3e} > {sum_tol:.1e}"
        )
    diag = np.real(np.diag(a))
    minor = np.min(np.outer(diag, diag) - np.abs(a) ** 2)
    if minor < -psd_tol:
        raise NotPositive(f"principal-minor condition violated by {-float(minor):.3e}")
    return ChiMatrix(a, n)


def validate_povm(elements, tol: float | None = None) -> Povm:
    """Validate a measurement; only the completeness sum is required."""
    tol = tol if tol is not None else linalg.TRACE_ATOL
    mats = [linalg.as_matrix(m, "POVM element") for m in elements]
    if not mats:
        raise DimensionMismatch("measurement needs at least one element")
    dim = mats[0].shape[0]
    if any(m.shape[0] != dim for m in mats):
        raise DimensionMismatch("POVM elements have mixed dimensions")
    stacked = np.stack(mats)
    completeness = np.einsum("kai,kaj->ij", stacked.conj(), stacked)
    residual = float(np.max(np.abs(completeness - np.eye(dim))))
    if residual > tol:
        raise CompletenessViolation(
            f"sum_k M_k^dag M_k deviates from identity by {residual:.3e} > {tol:.1e}"
        )
    return Povm(stacked)


# ---------------------------------------------------------------------------
# channel action
# ---------------------------------------------------------------------------

def apply_channel(ch: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    """Apply ``rho -> sum_k E_k rho E_k^dag``; output is re-validated."""
    if ch.dim != rho.dim:
        raise DimensionMismatch(f"channel dim {ch.dim} != state dim {rho.dim}")
    out = np.einsum("kij,jl,kml->im", ch.operators, rho.matrix, ch.operators.conj())
    return validate_density(out, tol=1e-8)


def apply_product_channel(ch_a: KrausChannel, ch_b: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    """Apply the product operation ``{E_k (x) F_l}`` to a joint state."""
    if ch_a.dim * ch_b.dim != rho.dim:
        raise DimensionMismatch(
            f"joint channel dim {ch_a.dim}*{ch_b.dim} != state dim {rho.dim}"
        )
    joint = np.stack([
        np.kron(e, f) for e in ch_a.operators for f in ch_b.operators
    ])
    out = np.einsum("kij,jl,kml->im", joint, rho.matrix, joint.conj())
    return validate_density(out, tol=1e-8)


def apply_chi(chi: ChiMatrix, rho: DensityMatrix) -> DensityMatrix:
    """Apply a chi-matrix strategy directly: ``sum_ab chi_ab E_a rho E_b^dag``.

    In the matrix-unit basis this reduces to
    ``out[p, q] = sum_jl chi[(p,j), (q,l)] rho[j, l]``.
    """
    n = chi.n
    if n != rho.dim:
        raise DimensionMismatch(f"chi acts on dim {n} but state has dim {rho.dim}")
    chi4 = chi.matrix.reshape(n, n, n, n)
    out = np.einsum("pjql,jl->pq", chi4, rho.matrix)
    return validate_density(out, tol=1e-8)


# ---------------------------------------------------------------------------
# representation conversions
# ---------------------------------------------------------------------------

def kraus_to_chi(ch: KrausChannel) -> ChiMatrix:
    """Chi matrix of a Kraus channel over the matrix-unit basis.

    The expansion coefficient of ``E_k`` on the basis element with label
    ``(i, j)`` is just the entry ``E_k[i, j]``, so
    ``chi[a, b] = sum_k e_k[a] * conj(e_k[b])`` with ``e_k`` the row-major
    flattening of ``E_k``.  The result is positive by construction.
    """
    n = ch.dim
    flat = ch.operators.reshape(ch.n_operators, n * n)
    chi = np.einsum("ka,kb->ab", flat, flat.conj())
    chi = 0.5 * (chi + chi.conj().T)
    return ChiMatrix(chi, n)


def chi_to_kraus(chi: ChiMatrix, rank_tol: float = 1e-10) -> KrausChannel:
    """Extract a minimal Kraus set from a chi matrix.

    Eigendecomposes chi and keeps eigenvalues above ``rank_tol``; operator k
    is ``sqrt(lambda_k)`` times the un-flattened eigenvector.  Kraus sets are
    unique only up to unitary mixing, so callers should compare channels by
    their action, not operator-by-operator.

    Raises:
        NotInOmega: if the chi matrix fails its invariants.
    """
    try:
        chi = validate_chi(chi.matrix, chi.n)
    except ValidationError as exc:
        raise NotInOmega(f"not a valid strategy: {exc}") from exc
    w, v = linalg.hermitian_eigen(chi.matrix)
    keep = w > rank_tol
    if not np.any(keep):
        raise NotInOmega("chi matrix has no eigenvalue above the rank tolerance")
    ops = [np.sqrt(w[k]) * v[:, k].reshape(chi.n, chi.n) for k in np.nonzero(keep)[0]]
    return KrausChannel(np.stack(ops))


# ---------------------------------------------------------------------------
# measurement
# ---------------------------------------------------------------------------

def measure_probs(povm: Povm, rho: DensityMatrix) -> np.ndarray:
    """Outcome distribution ``p_m = tr(M_m^dag M_m rho)`` as a real vector."""
    if povm.dim != rho.dim:
        raise DimensionMismatch(f"POVM dim {povm.dim} != state dim {rho.dim}")
    effects = np.einsum("kai,kaj->kij", povm.elements.conj(), povm.elements)
    probs = np.einsum("kij,ji->k", effects, rho.matrix)
    return np.real(probs)


def sample_outcome(povm: Povm, rho: DensityMatrix, rng: np.random.Generator) -> int:
    """Draw one outcome index from the POVM distribution on ``rho``.

    Determinism is scoped to the caller-owned ``rng``: identical generator
    states give identical draws.
    """
    probs = np.clip(measure_probs(povm, rho), 0.0, None)
    probs = probs / probs.sum()
    return int(rng.choice(povm.outcome_count, p=probs))


# ---------------------------------------------------------------------------
# common channels
# ---------------------------------------------------------------------------

def identity_channel(n: int) -> KrausChannel:
    """The do-nothing operation on n-dimensional states."""
    return KrausChannel(np.eye(n, dtype=complex)[None, :, :])


def cyclic_shift(n: int, s: int) -> ComplexMatrix:
    """Cyclic-shift unitary of order n raised to the power ``s``.

    For n=2 the powers are the identity and the bit flip.
    """
    out = np.zeros((n, n), dtype=complex)
    for k in range(n):
        out[(k + s) % n, k] = 1.0
    return out


def shift_channel(n: int, s: int) -> KrausChannel:
    """Single-unitary channel applying the order-n cyclic shift ``s`` times."""
    return KrausChannel(cyclic_shift(n, s)[None, :, :])


def identity_chi(n: int) -> ChiMatrix:
    """Chi matrix of the identity channel."""
    return kraus_to_chi(identity_channel(n))


def maximally_mixing_chi(n: int) -> ChiMatrix:
    """Chi matrix of the channel sending every state to the maximally mixed one."""
    return ChiMatrix(np.eye(n * n, dtype=complex) / n, n)
