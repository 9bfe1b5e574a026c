"""The two-player game formalism: payoff operators, tensors and evaluation.

A static quantum game is fixed by an initial joint state ``rho`` on
``C^{n1} (x) C^{n2}`` and one Hermitian payoff operator per player.  Player
strategies are physical operations on their own factor; expected payoffs are
obtained either by applying the product channel and tracing against the
payoff operator, or by contracting the rank-4 payoff tensor

    A[alpha, beta, gamma, delta] = tr[ R (B_alpha (x) B_gamma) rho
                                       (B_beta (x) B_delta)^dag ]

with the players' chi matrices.  Over the matrix-unit basis the tensor has
the closed form (0-based labels alpha=(a,b), beta=(c,d), gamma=(i,j),
delta=(k,l))

    A = R[c*n2 + k, a*n2 + i] * rho[b*n2 + j, d*n2 + l]

which this module keeps alongside the literal trace construction; the two
are mutual cross-checks and must agree entrywise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatch,
    InconsistentMeasurement,
    LengthMismatch,
    NonRealPayoff,
    UnsupportedDimension,
    ValidationError,
)
from .linalg import ComplexMatrix
from .quantum import (
    ChiMatrix,
    DensityMatrix,
    KrausChannel,
    Povm,
    _frozen,
    apply_product_channel,
    measure_probs,
    shift_channel,
    validate_density,
)

PLAYER_I = "I"
PLAYER_II = "II"

PAIRING_ATOL = 1e-10
IMAG_ATOL = 1e-9


def normalize_player(player) -> str:
    key = str(player).strip().upper()
    if key in ("I", "1"):
        return PLAYER_I
    if key in ("II", "2"):
        return PLAYER_II
    raise ValueError(f"unknown player {player!r}; expected 'I' or 'II'")


@dataclass(frozen=True)
class QuantumGame:
    """A static two-player game: initial state plus payoff operators."""

    rho: DensityMatrix
    payoff_op_i: ComplexMatrix
    payoff_op_ii: ComplexMatrix
    n1: int
    n2: int

    def __post_init__(self):
        object.__setattr__(self, "payoff_op_i", _frozen(self.payoff_op_i))
        object.__setattr__(self, "payoff_op_ii", _frozen(self.payoff_op_ii))

    def payoff_op(self, player) -> ComplexMatrix:
        return self.payoff_op_i if normalize_player(player) == PLAYER_I else self.payoff_op_ii


def build_game(rho, payoff_i, payoff_ii, n1: int, n2: int, tol: float | None = None) -> QuantumGame:
    """Validate and assemble a game.

    Payoff operators must be Hermitian (payoffs must be real) and the state
    dimension must equal ``n1 * n2``.
    """
    state = rho if isinstance(rho, DensityMatrix) else validate_density(rho, tol)
    if state.dim != n1 * n2:
        raise DimensionMismatch(f"state dim {state.dim} != n1*n2 = {n1 * n2}")
    herm_tol = tol if tol is not None else linalg.HERMITIAN_ATOL
    r1 = linalg.require_hermitian(payoff_i, herm_tol, "payoff operator I")
    r2 = linalg.require_hermitian(payoff_ii, herm_tol, "payoff operator II")
    if r1.shape[0] != state.dim or r2.shape[0] != state.dim:
        raise DimensionMismatch("payoff operators must match the state dimension")
    return QuantumGame(state, r1, r2, n1, n2)


@dataclass(frozen=True)
class PayoffTensor:
    """Rank-4 payoff tensor for one player.

    ``entries[alpha, beta, gamma, delta]`` with alpha, beta flattened
    matrix-unit labels of player I (range n1^2) and gamma, delta of player II
    (range n2^2).  ``grid`` is the flattened 2-D view with row
    ``alpha*n1^2 + beta`` and column ``gamma*n2^2 + delta``.
    """

    entries: np.ndarray
    player: str

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen(self.entries))
        object.__setattr__(self, "player", normalize_player(self.player))
        d1, d1b, d2, d2b = self.entries.shape
        if d1 != d1b or d2 != d2b:
            raise DimensionMismatch(f"tensor has inconsistent shape {self.entries.shape}")
        pairing = float(np.max(np.abs(self.entries - self.entries.conj().transpose(1, 0, 3, 2))))
        if pairing > PAIRING_ATOL:
            raise ValidationError(
                f"tensor breaks the Hermiticity pairing A[a,b,c,d] = conj(A[b,a,d,c]) "
                f"by {pairing:.3e}; payoffs would not be real"
            )

    @property
    def n1(self) -> int:
        return int(round(np.sqrt(self.entries.shape[0])))

    @property
    def n2(self) -> int:
        return int(round(np.sqrt(self.entries.shape[2])))

    @property
    def grid(self) -> np.ndarray:
        s1, s2 = self.entries.shape[0], self.entries.shape[2]
        return self.entries.reshape(s1 * s1, s2 * s2)


@dataclass(frozen=True)
class ClassicalBimatrix:
    """Classical payoff grid: entry (s, t) holds both players' payoffs."""

    payoff_i: np.ndarray
    payoff_ii: np.ndarray

    def __post_init__(self):
        pi = np.array(self.payoff_i, dtype=float)
        pii = np.array(self.payoff_ii, dtype=float)
        if pi.shape != pii.shape or pi.ndim != 2:
            raise DimensionMismatch("bimatrix halves must share a 2-D shape")
        if not (np.all(np.isfinite(pi)) and np.all(np.isfinite(pii))):
            raise ValidationError("bimatrix has non-finite entries")
        pi.setflags(write=False)
        pii.setflags(write=False)
        object.__setattr__(self, "payoff_i", pi)
        object.__setattr__(self, "payoff_ii", pii)

    def entry(self, s: int, t: int) -> tuple[float, float]:
        return float(self.payoff_i[s, t]), float(self.payoff_ii[s, t])


# ---------------------------------------------------------------------------
# payoff operators and tensors
# ---------------------------------------------------------------------------

def payoff_operator(povm: Povm, payoffs) -> ComplexMatrix:
    """Fold a measurement and its payoff assignment into one observable.

    Returns ``sum_k a_k M_k^dag M_k``; by construction
    ``tr(R rho) = sum_k a_k p_k`` for every state.
    """
    a = np.asarray(payoffs, dtype=float)
    if a.ndim != 1 or a.shape[0] != povm.outcome_count:
        raise LengthMismatch(
            f"got {a.shape[0] if a.ndim == 1 else a.shape} payoffs for {povm.outcome_count} outcomes"
        )
    effects = np.einsum("kai,kaj->kij", povm.elements.conj(), povm.elements)
    return np.einsum("k,kij->ij", a, effects)


def matrix_unit_basis(n: int) -> np.ndarray:
    """All n^2 matrix units stacked in flattened-label order (i*n + j)."""
    basis = np.zeros((n * n, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            basis[i * n + j, i, j] = 1.0
    return basis


def payoff_tensor_general(game: QuantumGame, player, basis1: np.ndarray | None = None,
                          basis2: np.ndarray | None = None) -> PayoffTensor:
    """Build the payoff tensor by literal evaluation of the trace formula.

    Works for an arbitrary operator basis per player (defaults to matrix
    units).  Batched as a Gram matrix: with ``B[ag] = basis1_a (x) basis2_g``
    the tensor entry is the Frobenius inner product of ``B[bd]`` with
    ``R B[ag] rho``.
    """
    player = normalize_player(player)
    r = game.payoff_op(player)
    b1 = matrix_unit_basis(game.n1) if basis1 is None else np.asarray(basis1, dtype=complex)
    b2 = matrix_unit_basis(game.n2) if basis2 is None else np.asarray(basis2, dtype=complex)
    s1, s2 = b1.shape[0], b2.shape[0]
    dim = game.rho.dim
    joint = np.stack([np.kron(e, f) for e in b1 for f in b2])  # (s1*s2, dim, dim)
    lhs = np.einsum("pq,kqr,rs->kps", r, joint, game.rho.matrix)
    flat_lhs = lhs.reshape(s1 * s2, dim * dim)
    flat_rhs = joint.reshape(s1 * s2, dim * dim)
    gram = flat_lhs @ flat_rhs.conj().T  # [ag, bd] = tr(R B_ag rho B_bd^dag)
    entries = gram.reshape(s1, s2, s1, s2).transpose(0, 2, 1, 3)
    return PayoffTensor(entries, player)


def payoff_tensor_matrix_unit(game: QuantumGame, player) -> PayoffTensor:
    """Build the payoff tensor from its matrix-unit closed form.

    Algebraically identical to :func:`payoff_tensor_general` with the default
    basis; kept permanently as the fast path and as an independent
    cross-check of the trace construction.
    """
    player = normalize_player(player)
    n1, n2 = game.n1, game.n2
    r4 = game.payoff_op(player).reshape(n1, n2, n1, n2)
    rho4 = game.rho.matrix.reshape(n1, n2, n1, n2)
    entries = np.einsum("ckai,bjdl->abcdijkl", r4, rho4)
    entries = entries.reshape(n1 * n1, n1 * n1, n2 * n2, n2 * n2)
    return PayoffTensor(entries, player)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def payoff_contract(tensor: PayoffTensor, chi: ChiMatrix, xi: ChiMatrix,
                    imag_tol: float = IMAG_ATOL) -> float:
    """Expected payoff ``sum chi_ab xi_gd A[a,b,g,d]``.

    The imaginary part must vanish within ``imag_tol``; a violation signals a
    corrupted tensor or strategy and raises ``NonRealPayoff``.
    """
    if chi.dim != tensor.entries.shape[0] or xi.dim != tensor.entries.shape[2]:
        raise DimensionMismatch(
            f"tensor expects strategy dims ({tensor.entries.shape[0]}, {tensor.entries.shape[2]}), "
            f"got ({chi.dim}, {xi.dim})"
        )
    value = np.einsum("ab,cd,abcd->", chi.matrix, xi.matrix, tensor.entries)
    if abs(value.imag) > imag_tol:
        raise NonRealPayoff(f"payoff has imaginary part {value.imag:.3e} > {imag_tol:.1e}")
    return float(value.real)


def payoff_direct(game: QuantumGame, ch_a: KrausChannel, ch_b: KrausChannel, player) -> float:
    """Expected payoff by direct channel application: ``tr(R pi)``."""
    player = normalize_player(player)
    pi = apply_product_channel(ch_a, ch_b, game.rho)
    value = complex(np.trace(game.payoff_op(player) @ pi.matrix))
    if abs(value.imag) > IMAG_ATOL:
        raise NonRealPayoff(f"payoff has imaginary part {value.imag:.3e}")
    return float(value.real)


def classical_reduction(game: QuantumGame) -> ClassicalBimatrix:
    """Restrict both players to powers of the cyclic shift.

    For qubit strategies the allowed operations are exactly the identity and
    the bit flip, which reduces the game to a classical bimatrix.  Requires
    ``n1 == n2``; pure strategies only (mixtures are recoverable as convex
    combinations of chi matrices).
    """
    if game.n1 != game.n2:
        raise UnsupportedDimension(
            f"classical reduction needs equal per-player dimensions, got {game.n1} != {game.n2}"
        )
    n = game.n1
    channels = [shift_channel(n, s) for s in range(n)]
    pay_i = np.zeros((n, n))
    pay_ii = np.zeros((n, n))
    for s in range(n):
        for t in range(n):
            pay_i[s, t] = payoff_direct(game, channels[s], channels[t], PLAYER_I)
            pay_ii[s, t] = payoff_direct(game, channels[s], channels[t], PLAYER_II)
    return ClassicalBimatrix(pay_i, pay_ii)


# ---------------------------------------------------------------------------
# Monte Carlo play
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimulationResult:
    mean_i: float
    mean_ii: float
    stderr_i: float
    stderr_ii: float
    rounds: int


def simulate_play(game: QuantumGame, povm: Povm, payoffs_i, payoffs_ii,
                  ch_a: KrausChannel, ch_b: KrausChannel, rounds: int,
                  rng: np.random.Generator) -> SimulationResult:
    """Monte Carlo realization of the refereed game.

    Each round the players' channels act on a fresh copy of the initial
    state, the referee measures, and payoffs are assigned per outcome.  The
    supplied measurement and payoff vectors must reproduce the game's payoff
    operators within 1e-9 (consistency guard).

    Reported standard error is the sample standard deviation over sqrt(rounds).
    """
    if rounds < 1:
        raise ValueError("rounds must be a positive integer")
    a_i = np.asarray(payoffs_i, dtype=float)
    a_ii = np.asarray(payoffs_ii, dtype=float)
    for label, vec, op in (("I", a_i, game.payoff_op_i), ("II", a_ii, game.payoff_op_ii)):
        rebuilt = payoff_operator(povm, vec)
        residual = float(np.max(np.abs(rebuilt - op)))
        if residual > 1e-9:
            raise InconsistentMeasurement(
                f"measurement + payoffs {label} deviate from the game's payoff operator "
                f"by {residual:.3e}"
            )
    pi = apply_product_channel(ch_a, ch_b, game.rho)
    probs = np.clip(measure_probs(povm, pi), 0.0, None)
    probs = probs / probs.sum()
    outcomes = rng.choice(povm.outcome_count, size=rounds, p=probs)
    samples_i = a_i[outcomes]
    samples_ii = a_ii[outcomes]

    def stderr(x: np.ndarray) -> float:
        if rounds < 2:
            return 0.0
        return float(np.std(x, ddof=1) / np.sqrt(rounds))

    return SimulationResult(
        mean_i=float(samples_i.mean()),
        mean_ii=float(samples_ii.mean()),
        stderr_i=stderr(samples_i),
        stderr_ii=stderr(samples_ii),
        rounds=rounds,
    )
