"""Best responses over the full strategy set and epsilon-Nash verification.

Fixing the opponent's chi matrix makes one player's expected payoff linear
in their own strategy, ``payoff = tr(G chi)``, so the best response is the
maximum of a linear functional over the spectrahedron

    Omega_n = { chi >= 0 : partial-trace over the first index factor = I }.

That is a small semidefinite program.  It is solved here without an external
SDP solver:

* primal: projected gradient ascent, with Dykstra alternating projections
  onto {PSD} and the trace-preservation affine subspace supplying the
  projection onto their intersection;
* certificate: weak duality.  For any Hermitian Y with (I (x) Y) - H >= 0
  (H the Hermitian part of G), tr(Y) bounds the optimum from above, and for
  an arbitrary Hermitian Y the shifted matrix Y + max(0, -lambda_min) I is
  feasible, so every candidate yields the certified bound
  tr(Y) + n * max(0, -lambda_min(I (x) Y - H)).  The bound is tightened by
  Polyak subgradient steps plus a least-squares candidate built from the
  primal support;
* refinement: on the face where (I (x) Y) - H vanishes the objective is
  constant and equal to tr(Y), so once a near-optimal Y is known, any
  feasible point supported on that near-kernel attains the optimum; such a
  point is found by alternating projections and used to close the gap.

A brute-force grid over single-qubit unitary strategies serves as an
independent lower-bound oracle for cross-checking the solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    InfeasibleProjection,
    NoConvergence,
    NonRealPayoff,
    UnsupportedDimension,
)
from .game import (
    PLAYER_I,
    PayoffTensor,
    QuantumGame,
    normalize_player,
    payoff_contract,
    payoff_tensor_matrix_unit,
)
from .quantum import ChiMatrix, maximally_mixing_chi, validate_chi

WEAK_DUALITY_ATOL = 1e-8


@dataclass(frozen=True)
class ResponseProblem:
    """Linear payoff functional ``tr(matrix @ chi)`` over Omega_n."""

    matrix: np.ndarray
    n: int
    player: str


@dataclass(frozen=True)
class BestResponseResult:
    value: float
    chi_opt: ChiMatrix
    dual_bound: float
    gap: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class SolverOptions:
    """Tuning knobs for the projected-gradient best-response solver."""

    step_scale: float = 0.5
    chunk: int = 250
    stall_limit: int = 30
    dual_iters: int = 400
    projection_sweeps: int = 500
    projection_tol: float = 1e-11
    refine: bool = True


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def _spectral_norm(m: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvalsh(_hermitize(m)))))


def partial_trace_first(m: np.ndarray, n: int) -> np.ndarray:
    """Partial trace over the first factor of the flattened (i, j) label."""
    return np.einsum("ijil->jl", m.reshape(n, n, n, n))


def project_trace_affine(m: np.ndarray, n: int) -> np.ndarray:
    """Orthogonal projection onto the affine set {partial trace = identity}."""
    delta = partial_trace_first(m, n) - np.eye(n)
    return m - np.kron(np.eye(n), delta) / n


def project_psd(m: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto the PSD cone (eigenvalue clipping)."""
    w, v = np.linalg.eigh(_hermitize(m))
    w = np.clip(w, 0.0, None)
    return (v * w) @ v.conj().T


def project_omega(point: np.ndarray, n: int,
                  tol: float = 1e-11, max_sweeps: int = 500) -> np.ndarray:
    """Dykstra projection onto Omega_n = PSD cone intersect affine set.

    The affine projection needs no correction term; the PSD step carries the
    usual Dykstra correction.  Omega_n is never empty (the maximally mixing
    chi matrix I/n always belongs to it), so failure to converge indicates a
    bug and raises ``InfeasibleProjection``.
    """
    x = _hermitize(point)
    correction = np.zeros_like(x)
    delta = np.inf
    for _ in range(max_sweeps):
        y = project_psd(x + correction)
        correction = x + correction - y
        x = project_trace_affine(y, n)
        delta = float(np.max(np.abs(x - y)))
        if delta <= tol:
            return x
    if delta <= 1e-6:
        return x
    raise InfeasibleProjection(
        f"Dykstra projection stalled with residual {delta:.3e} after {max_sweeps} sweeps"
    )


# ---------------------------------------------------------------------------
# response problems
# ---------------------------------------------------------------------------

def response_problem(tensor: PayoffTensor, opponent: ChiMatrix, player) -> ResponseProblem:
    """Contract the opponent's strategy out of the payoff tensor.

    For player I the opponent is player II's xi and
    ``G[b, a] = sum_gd A[a, b, g, d] xi[g, d]``; for player II the roles of
    the index pairs swap.  Either way ``tr(G chi)`` is the responder's
    payoff, and G is Hermitian whenever the tensor satisfies its pairing
    invariant (symmetrized here against floating-point noise).
    """
    player = normalize_player(player)
    if player == PLAYER_I:
        if opponent.dim != tensor.entries.shape[2]:
            raise DimensionMismatch(
                f"opponent strategy dim {opponent.dim} != tensor dim {tensor.entries.shape[2]}"
            )
        g = np.einsum("abcd,cd->ba", tensor.entries, opponent.matrix)
        n = tensor.n1
    else:
        if opponent.dim != tensor.entries.shape[0]:
            raise DimensionMismatch(
                f"opponent strategy dim {opponent.dim} != tensor dim {tensor.entries.shape[0]}"
            )
        g = np.einsum("abcd,ab->dc", tensor.entries, opponent.matrix)
        n = tensor.n2
    return ResponseProblem(_hermitize(g), n, player)


def response_value(problem: ResponseProblem, chi: ChiMatrix,
                   imag_tol: float = 1e-9) -> float:
    """Evaluate ``tr(G chi)`` for a validated strategy."""
    if chi.dim != problem.matrix.shape[0]:
        raise DimensionMismatch(f"strategy dim {chi.dim} != problem dim {problem.matrix.shape[0]}")
    value = complex(np.trace(problem.matrix @ chi.matrix))
    if abs(value.imag) > imag_tol:
        raise NonRealPayoff(f"response value has imaginary part {value.imag:.3e}")
    return float(value.real)


# ---------------------------------------------------------------------------
# dual certificates
# ---------------------------------------------------------------------------

def _certified_bound(y: np.ndarray, h: np.ndarray, n: int) -> tuple[float, np.ndarray]:
    """Certified upper bound from a Hermitian candidate Y.

    Returns ``(bound, y_feasible)`` where ``y_feasible`` satisfies
    ``(I (x) y_feasible) - h >= 0`` exactly up to eigensolver accuracy and
    ``tr(y_feasible) = bound``.
    """
    m = _hermitize(np.kron(np.eye(n), y) - h)
    lam_min = float(np.linalg.eigvalsh(m)[0])
    shift = max(0.0, -lam_min)
    y_feasible = y + shift * np.eye(n)
    return float(np.trace(y).real + n * shift), y_feasible


def _ls_dual_candidate(h: np.ndarray, n: int, chi: np.ndarray) -> np.ndarray | None:
    """Least-squares Y from complementary slackness on the primal support.

    At an optimal pair, ``(I (x) Y) w = H w`` for every vector w in the
    support of chi; solving that linear system in Y for the support of a
    near-optimal iterate gives an excellent dual seed.
    """
    w, v = np.linalg.eigh(_hermitize(chi))
    cut = max(1e-8, 1e-8 * float(w[-1]))
    support = v[:, w > cut]
    if support.shape[1] == 0:
        support = v[:, -1:]
    r = support.shape[1]
    blocks = support.reshape(n, n, r)          # blocks[i] has entries w_c[(i, l)]
    target = (h @ support).reshape(n, n, r)
    a = np.concatenate([blocks[i] for i in range(n)], axis=1)    # (n, n*r)
    b = np.concatenate([target[i] for i in range(n)], axis=1)
    try:
        yt, *_ = np.linalg.lstsq(a.T, b.T, rcond=None)
    except np.linalg.LinAlgError:
        return None
    return _hermitize(yt.T)


def _dual_tr1_rank1(v: np.ndarray, n: int) -> np.ndarray:
    v4 = v.reshape(n, n)
    return np.einsum("ij,il->jl", v4, v4.conj())


def _dual_bound(h: np.ndarray, n: int, target: float, chi: np.ndarray | None,
                warm: np.ndarray | None, iters: int) -> tuple[float, np.ndarray]:
    """Best certified upper bound on ``max tr(H chi)`` over Omega_n.

    Seeds from ``lambda_max(H) I``, a warm start, and the least-squares
    complementary-slackness candidate, then runs Polyak subgradient steps on
    the certified-bound function (convex, minimized at the dual optimum).
    Every iterate yields a valid bound; the best one is returned together
    with its feasible Y.
    """
    lam_max = float(np.linalg.eigvalsh(h)[-1])
    candidates = [lam_max * np.eye(n, dtype=complex)]
    if warm is not None:
        candidates.append(warm)
    if chi is not None:
        ls = _ls_dual_candidate(h, n, chi)
        if ls is not None:
            candidates.append(ls)

    best_bound = np.inf
    best_y = candidates[0]
    start = candidates[0]
    for cand in candidates:
        bound, y_feas = _certified_bound(cand, h, n)
        if bound < best_bound:
            best_bound, best_y, start = bound, y_feas, cand

    y = start.copy()
    eye = np.eye(n, dtype=complex)
    for _ in range(iters):
        m = _hermitize(np.kron(eye, y) - h)
        w, v = np.linalg.eigh(m)
        lam_min = float(w[0])
        g_val = float(np.trace(y).real) + n * max(0.0, -lam_min)
        if g_val < best_bound:
            best_bound = g_val
            best_y = y + max(0.0, -lam_min) * eye
        grad = eye - n * _dual_tr1_rank1(v[:, 0], n) if lam_min < 0 else eye.copy()
        gap_est = g_val - target
        if gap_est <= 0:
            break
        step = gap_est / max(float(np.sum(np.abs(grad) ** 2)), 1e-30)
        y = _hermitize(y - step * grad)
    return best_bound, best_y


def _face_refine(h: np.ndarray, n: int, y_feasible: np.ndarray,
                 opts: SolverOptions) -> np.ndarray | None:
    """Feasible point supported on the near-kernel of (I (x) Y) - H.

    On that face the objective equals tr(Y), the certified bound, so a
    feasible point there is optimal to within the kernel cutoff.  Found by
    alternating projections between the trace affine set and the PSD cone
    restricted to the kernel subspace; returns None when the attempt fails.
    """
    m = _hermitize(np.kron(np.eye(n), y_feasible) - h)
    w, v = np.linalg.eigh(m)
    w = w - min(0.0, float(w[0]))
    scale = max(float(w[-1]), 1e-12)
    for cut_mult in (1e-7, 1e-5, 1e-3):
        kernel = v[:, w <= cut_mult * scale]
        r = kernel.shape[1]
        if r == 0:
            continue
        chi = kernel @ (kernel.conj().T @ kernel) @ kernel.conj().T / n
        ok = False
        for _ in range(opts.projection_sweeps):
            chi = project_trace_affine(chi, n)
            s = kernel.conj().T @ chi @ kernel
            sw, sv = np.linalg.eigh(_hermitize(s))
            s = (sv * np.clip(sw, 0.0, None)) @ sv.conj().T
            chi = kernel @ s @ kernel.conj().T
            residual = float(np.max(np.abs(partial_trace_first(chi, n) - np.eye(n))))
            if residual <= 1e-12:
                ok = True
                break
        if ok:
            return project_omega(chi, n, opts.projection_tol, opts.projection_sweeps)
    return None


# ---------------------------------------------------------------------------
# primal solver
# ---------------------------------------------------------------------------

def _ascend(h: np.ndarray, x: np.ndarray, step: float, iters: int, n: int,
            opts: SolverOptions) -> tuple[np.ndarray, int]:
    val = float(np.trace(h @ x).real)
    stall = 0
    for t in range(iters):
        x = project_omega(x + step * h, n, opts.projection_tol, opts.projection_sweeps)
        new_val = float(np.trace(h @ x).real)
        if new_val <= val + 1e-15 * max(1.0, abs(val)):
            stall += 1
            if stall >= opts.stall_limit:
                return x, t + 1
        else:
            stall = 0
        val = new_val
    return x, iters


def best_response(problem: ResponseProblem, max_iters: int = 5000, tol: float = 1e-7,
                  options: SolverOptions | None = None) -> BestResponseResult:
    """Maximize ``tr(G chi)`` over the strategy set with a duality certificate.

    Returns the best feasible iterate, the certified upper bound, and the
    duality gap.  ``converged`` is set iff the gap closed to within ``tol``;
    an unconverged result still carries the best feasible strategy found
    (callers decide whether to treat that as an error).
    """
    opts = options if options is not None else SolverOptions()
    n = problem.n
    h = _hermitize(problem.matrix)
    scale = _spectral_norm(h)
    if scale <= 1e-14:
        chi = maximally_mixing_chi(n)
        value = response_value(problem, chi)
        return BestResponseResult(value, chi, value, 0.0, 0, True)

    step = opts.step_scale / scale
    x = np.eye(n * n, dtype=complex) / n
    best_x = x
    best_val = float(np.trace(h @ x).real)
    iterations = 0
    bound = np.inf
    y_feasible: np.ndarray | None = None

    while iterations < max_iters:
        chunk = min(opts.chunk, max_iters - iterations)
        x, used = _ascend(h, x, step, chunk, n, opts)
        iterations += used
        val = float(np.trace(h @ x).real)
        if val > best_val:
            best_x, best_val = x, val
        bound, y_feasible = _dual_bound(h, n, best_val, best_x, y_feasible, opts.dual_iters)
        if bound - best_val <= tol:
            break
        if opts.refine:
            candidate = _face_refine(h, n, y_feasible, opts)
            if candidate is not None:
                cand_val = float(np.trace(h @ candidate).real)
                if cand_val > best_val:
                    best_x, best_val = candidate, cand_val
                    x = candidate
            if bound - best_val <= tol:
                break
        if used < chunk:
            # ascent stalled and refinement did not close the gap; a longer
            # run will not move the primal iterate any further
            break

    chi_opt = validate_chi(best_x, n, tol=1e-7)
    value = response_value(problem, chi_opt)
    raw_gap = bound - value
    if raw_gap < -WEAK_DUALITY_ATOL:
        raise InfeasibleProjection(
            f"primal value {value!r} exceeds certified bound {bound!r}; solver bug"
        )
    # bound can dip below value by eigensolver noise; the reported gap is
    # clamped but convergence is judged on the raw difference
    return BestResponseResult(value, chi_opt, float(bound), max(0.0, float(raw_gap)),
                              iterations, raw_gap <= tol)


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------

def unitary_oracle(tensor: PayoffTensor, opponent: ChiMatrix, player,
                   resolution: int = 24) -> tuple[float, np.ndarray]:
    """Exhaustive grid search over single-qubit unitary strategies.

    Unitaries are parametrized axis-angle as
    ``U = cos(t) I - i sin(t) (n . sigma)`` with t and the axis polar angle
    on ``pi * k / resolution`` grids and the azimuth on a ``2 pi k /
    resolution`` grid, so the identity (t = 0) and the bit flip
    (t = pi/2, axis x) lie exactly on the default grid.  Returns the best
    contraction value over the rank-1 unitary strategies and the maximizing
    unitary; a lower bound on the best response over all physical
    operations.
    """
    problem = response_problem(tensor, opponent, player)
    if problem.n != 2:
        raise UnsupportedDimension(
            f"unitary oracle grid only covers dimension 2, got {problem.n}"
        )
    res = int(resolution)
    if res < 1:
        raise ValueError("resolution must be positive")
    h = problem.matrix

    t = np.pi * np.arange(res) / res
    theta = np.pi * np.arange(res) / res
    phi = 2.0 * np.pi * np.arange(res) / res
    tg, thg, phg = (a.ravel() for a in np.meshgrid(t, theta, phi, indexing="ij"))

    nx = np.sin(thg) * np.cos(phg)
    ny = np.sin(thg) * np.sin(phg)
    nz = np.cos(thg)
    c, s = np.cos(tg), np.sin(tg)
    # row-major flattening (U00, U01, U10, U11) matches the chi-basis label
    vectors = np.stack(
        [c - 1j * s * nz, -1j * s * (nx - 1j * ny), -1j * s * (nx + 1j * ny), c + 1j * s * nz],
        axis=1,
    )
    values = np.einsum("ka,ab,kb->k", vectors.conj(), h, vectors).real
    best = int(np.argmax(values))
    return float(values[best]), vectors[best].reshape(2, 2)


# ---------------------------------------------------------------------------
# Nash verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NashReport:
    is_equilibrium: bool
    gap_i: float
    gap_ii: float
    payoff_i: float
    payoff_ii: float
    response_i: BestResponseResult
    response_ii: BestResponseResult


def verify_nash(game: QuantumGame, chi: ChiMatrix, xi: ChiMatrix, epsilon: float,
                solver_tol: float = 1e-7, max_iters: int = 5000) -> NashReport:
    """Check the epsilon-Nash property of a strategy profile.

    ``gap_j`` is the certified best-response value for player j against the
    opponent's fixed strategy, minus j's current payoff; the profile is an
    epsilon-equilibrium iff both gaps are at most epsilon.  Gaps are
    reported even when the verdict is negative.

    Raises:
        NoConvergence: if either best-response solve fails to certify; the
            exception's ``partial`` attribute carries the report so far.
    """
    tensor_i = payoff_tensor_matrix_unit(game, "I")
    tensor_ii = payoff_tensor_matrix_unit(game, "II")
    payoff_i = payoff_contract(tensor_i, chi, xi)
    payoff_ii = payoff_contract(tensor_ii, chi, xi)
    br_i = best_response(response_problem(tensor_i, xi, "I"), max_iters, solver_tol)
    br_ii = best_response(response_problem(tensor_ii, chi, "II"), max_iters, solver_tol)
    gap_i = br_i.value - payoff_i
    gap_ii = br_ii.value - payoff_ii
    report = NashReport(
        is_equilibrium=bool(gap_i <= epsilon and gap_ii <= epsilon),
        gap_i=float(gap_i),
        gap_ii=float(gap_ii),
        payoff_i=payoff_i,
        payoff_ii=payoff_ii,
        response_i=br_i,
        response_ii=br_ii,
    )
    if not (br_i.converged and br_ii.converged):
        raise NoConvergence(
            "best-response certification did not converge; gaps are lower bounds only",
            partial=report,
        )
    return report
