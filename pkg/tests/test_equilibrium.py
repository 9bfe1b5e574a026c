import numpy as np
import pytest

from qgame.equilibrium import (
    best_response,
    partial_trace_first,
    project_omega,
    response_problem,
    response_value,
    unitary_oracle,
    verify_nash,
)
from qgame.errors import DimensionMismatch, UnsupportedDimension
from qgame.game import build_game, payoff_contract, payoff_tensor_matrix_unit
from qgame.quantum import identity_chi, kraus_to_chi, shift_channel, validate_chi
from qgame.random_ops import random_chi, random_density, random_hermitian


def random_game(n1, n2, rng):
    rho = random_density(n1 * n2, rng)
    return build_game(rho, random_hermitian(n1 * n2, rng), random_hermitian(n1 * n2, rng), n1, n2)


# ---------------------------------------------------------------------------
# response problems
# ---------------------------------------------------------------------------

def test_response_problem_reproduces_contraction(ewl_game, ewl_stars):
    chi_star, xi_star = ewl_stars
    tensor = payoff_tensor_matrix_unit(ewl_game, "I")
    problem = response_problem(tensor, xi_star, "I")
    assert response_value(problem, chi_star) == pytest.approx(2.5, abs=1e-12)


def test_response_problem_agrees_on_random_strategies(rng):
    for _ in range(5):
        game = random_game(2, 2, rng)
        for player, opponent_first in (("I", False), ("II", True)):
            tensor = payoff_tensor_matrix_unit(game, player)
            opponent = random_chi(2, rng)
            problem = response_problem(tensor, opponent, player)
            for _ in range(10):
                mine = random_chi(2, rng)
                if player == "I":
                    full = payoff_contract(tensor, mine, opponent)
                else:
                    full = payoff_contract(tensor, opponent, mine)
                assert abs(response_value(problem, mine) - full) <= 1e-10


def test_response_problem_constant_game(rng):
    rho = random_density(4, rng)
    game = build_game(rho, np.eye(4), np.eye(4), 2, 2)
    problem = response_problem(payoff_tensor_matrix_unit(game, "I"), random_chi(2, rng), "I")
    for _ in range(5):
        assert response_value(problem, random_chi(2, rng)) == pytest.approx(1.0, abs=1e-10)


def test_response_problem_matrix_is_hermitian(rng):
    game = random_game(2, 2, rng)
    problem = response_problem(payoff_tensor_matrix_unit(game, "I"), random_chi(2, rng), "I")
    np.testing.assert_allclose(problem.matrix, problem.matrix.conj().T, atol=1e-12)


def test_response_problem_dimension_mismatch(ewl_game):
    tensor = payoff_tensor_matrix_unit(ewl_game, "I")
    with pytest.raises(DimensionMismatch):
        response_problem(tensor, identity_chi(3), "I")


# ---------------------------------------------------------------------------
# projections
# ---------------------------------------------------------------------------

def test_project_omega_returns_valid_strategy(rng):
    for _ in range(5):
        n = int(rng.integers(2, 4))
        point = random_hermitian(n * n, rng)
        projected = project_omega(point, n)
        validate_chi(projected, n, tol=1e-8)


def test_project_omega_fixes_valid_points(rng):
    chi = random_chi(2, rng)
    np.testing.assert_allclose(project_omega(chi.matrix, 2), chi.matrix, atol=1e-9)


def test_partial_trace_identity():
    chi = identity_chi(2)
    np.testing.assert_allclose(partial_trace_first(chi.matrix, 2), np.eye(2), atol=1e-14)


# ---------------------------------------------------------------------------
# best_response
# ---------------------------------------------------------------------------

def test_best_response_against_equilibrium(ewl_game, ewl_stars):
    _, xi_star = ewl_stars
    problem = response_problem(payoff_tensor_matrix_unit(ewl_game, "I"), xi_star, "I")
    result = best_response(problem)
    assert result.converged
    assert result.value == pytest.approx(2.5, abs=1e-6)
    assert result.dual_bound <= 2.5 + 1e-6
    assert result.gap <= 1e-6


def test_best_response_against_identity(ewl_game):
    problem = response_problem(payoff_tensor_matrix_unit(ewl_game, "I"), identity_chi(2), "I")
    result = best_response(problem)
    assert result.converged
    assert result.value == pytest.approx(5.0, abs=1e-6)


def test_best_response_constant_game(rng):
    rho = random_density(4, rng)
    game = build_game(rho, 2.0 * np.eye(4), 2.0 * np.eye(4), 2, 2)
    problem = response_problem(payoff_tensor_matrix_unit(game, "I"), random_chi(2, rng), "I")
    result = best_response(problem)
    assert result.value == pytest.approx(2.0, abs=1e-7)
    assert result.converged


def test_best_response_zero_objective(rng):
    rho = random_density(4, rng)
    game = build_game(rho, np.zeros((4, 4)), np.zeros((4, 4)), 2, 2)
    problem = response_problem(payoff_tensor_matrix_unit(game, "I"), random_chi(2, rng), "I")
    result = best_response(problem)
    assert result.value == pytest.approx(0.0, abs=1e-12)
    assert result.iterations == 0
    # canonical feasible point: the maximally mixing strategy
    np.testing.assert_allclose(result.chi_opt.matrix, np.eye(4) / 2, atol=1e-12)


def test_best_response_weak_duality_and_feasibility(rng):
    for _ in range(6):
        game = random_game(2, 2, rng)
        problem = response_problem(payoff_tensor_matrix_unit(game, "I"), random_chi(2, rng), "I")
        result = best_response(problem)
        assert result.value <= result.dual_bound + 1e-8
        assert result.gap >= 0.0
        validate_chi(result.chi_opt.matrix, 2, tol=1e-7)


def test_best_response_monotone_certificates(rng):
    game = random_game(2, 2, rng)
    problem = response_problem(payoff_tensor_matrix_unit(game, "I"), random_chi(2, rng), "I")
    loose = best_response(problem, tol=1e-4)
    tight = best_response(problem, tol=1e-8)
    assert tight.value >= loose.value - (1e-4 - 1e-8)


def test_best_response_qutrit_dimension(rng):
    # the strategy set is a 9x9 spectrahedron here; the certificate must
    # still close and dominate random extreme points
    game = random_game(3, 3, rng)
    tensor = payoff_tensor_matrix_unit(game, "I")
    opponent = random_chi(3, rng)
    problem = response_problem(tensor, opponent, "I")
    result = best_response(problem)
    assert result.converged
    validate_chi(result.chi_opt.matrix, 3, tol=1e-7)
    from qgame.random_ops import random_kraus_channel

    extreme = max(
        response_value(problem, kraus_to_chi(random_kraus_channel(3, rng)))
        for _ in range(100)
    )
    assert result.value >= extreme - 1e-8
    assert result.value <= result.dual_bound + 1e-8


def test_best_response_starved_budget_reports_unconverged(ewl_game, rng):
    from qgame.equilibrium import SolverOptions

    opponent = random_chi(2, rng)
    problem = response_problem(payoff_tensor_matrix_unit(ewl_game, "I"), opponent, "I")
    result = best_response(problem, max_iters=1, tol=1e-30,
                           options=SolverOptions(refine=False, dual_iters=0, chunk=1))
    assert not result.converged
    assert result.gap > 0
    validate_chi(result.chi_opt.matrix, 2, tol=1e-7)  # best iterate still feasible


def test_verify_nash_propagates_no_convergence(ewl_game, ewl_stars):
    from qgame.errors import NoConvergence

    chi_star, xi_star = ewl_stars
    with pytest.raises(NoConvergence) as err:
        verify_nash(ewl_game, chi_star, xi_star, epsilon=1e-5,
                    solver_tol=1e-30, max_iters=1)
    partial = err.value.partial
    assert partial is not None
    assert abs(partial.gap_i) < 1e-3  # partial gaps still reported


def test_best_response_player_two(ewl_game, ewl_stars):
    chi_star, _ = ewl_stars
    problem = response_problem(payoff_tensor_matrix_unit(ewl_game, "II"), chi_star, "II")
    result = best_response(problem)
    assert result.converged
    assert result.value == pytest.approx(2.5, abs=1e-6)


# ---------------------------------------------------------------------------
# unitary oracle
# ---------------------------------------------------------------------------

def test_oracle_reaches_spectral_bound_via_bit_flip(ewl_game):
    tensor = payoff_tensor_matrix_unit(ewl_game, "I")
    value, unitary = unitary_oracle(tensor, identity_chi(2), "I")
    assert value == pytest.approx(5.0, abs=1e-9)
    # the maximizer acts like the bit flip on the payoff
    chi_u = kraus_to_chi(shift_channel(2, 1))
    problem = response_problem(tensor, identity_chi(2), "I")
    assert response_value(problem, chi_u) == pytest.approx(value, abs=1e-9)


def test_oracle_never_beats_certified_best_response(ewl_game, ewl_stars):
    _, xi_star = ewl_stars
    tensor = payoff_tensor_matrix_unit(ewl_game, "I")
    value, _ = unitary_oracle(tensor, xi_star, "I")
    assert value <= 2.5 + 1e-9


def test_oracle_constant_game(rng):
    rho = random_density(4, rng)
    game = build_game(rho, 1.5 * np.eye(4), 1.5 * np.eye(4), 2, 2)
    tensor = payoff_tensor_matrix_unit(game, "I")
    value, _ = unitary_oracle(tensor, random_chi(2, rng), "I", resolution=6)
    assert value == pytest.approx(1.5, abs=1e-10)


def test_oracle_grid_size_and_unitarity(ewl_game):
    tensor = payoff_tensor_matrix_unit(ewl_game, "I")
    _, unitary = unitary_oracle(tensor, identity_chi(2), "I", resolution=8)
    np.testing.assert_allclose(unitary @ unitary.conj().T, np.eye(2), atol=1e-12)


def test_oracle_rejects_large_dimension(rng):
    game = random_game(3, 3, rng)
    tensor = payoff_tensor_matrix_unit(game, "I")
    with pytest.raises(UnsupportedDimension):
        unitary_oracle(tensor, identity_chi(3), "I")


def test_oracle_dominated_by_solver_on_random_opponents(rng):
    for _ in range(4):
        game = random_game(2, 2, rng)
        tensor = payoff_tensor_matrix_unit(game, "I")
        opponent = random_chi(2, rng)
        oracle_value, _ = unitary_oracle(tensor, opponent, "I")
        result = best_response(response_problem(tensor, opponent, "I"))
        assert result.value >= oracle_value - 1e-8
        assert result.value <= result.dual_bound + 1e-8


# ---------------------------------------------------------------------------
# verify_nash
# ---------------------------------------------------------------------------

def test_verify_nash_equilibrium(ewl_game, ewl_stars):
    chi_star, xi_star = ewl_stars
    report = verify_nash(ewl_game, chi_star, xi_star, epsilon=1e-6)
    assert report.is_equilibrium
    assert report.gap_i <= 1e-6 and report.gap_ii <= 1e-6
    assert report.payoff_i == pytest.approx(2.5, abs=1e-10)
    assert report.response_i.converged and report.response_ii.converged


def test_verify_nash_detects_classical_defection(ewl_game):
    chi_id = identity_chi(2)
    report = verify_nash(ewl_game, chi_id, chi_id, epsilon=1e-6)
    assert not report.is_equilibrium
    assert report.gap_i >= 2 - 1e-6
    assert report.gap_ii >= 2 - 1e-6


def test_verify_nash_large_epsilon(ewl_game, ewl_stars):
    chi_star, xi_star = ewl_stars
    report = verify_nash(ewl_game, chi_star, xi_star, epsilon=10.0)
    assert report.is_equilibrium


def test_verify_nash_gap_self_consistency(ewl_game):
    chi_id = identity_chi(2)
    report = verify_nash(ewl_game, chi_id, chi_id, epsilon=1e-6)
    again = verify_nash(ewl_game, chi_id, chi_id,
                        epsilon=max(report.gap_i, report.gap_ii) + 1e-9)
    assert again.is_equilibrium
