import numpy as np
import pytest

from qgame.games_builtin import ewl_equilibrium_strategies, ewl_prisoners_dilemma


@pytest.fixture(scope="session")
def ewl():
    return ewl_prisoners_dilemma()


@pytest.fixture(scope="session")
def ewl_game(ewl):
    return ewl.game


@pytest.fixture(scope="session")
def ewl_stars():
    return ewl_equilibrium_strategies()


@pytest.fixture
def rng():
    return np.random.default_rng(20260811)


def paper_rho() -> np.ndarray:
    """The built-in game's initial state, transcribed independently."""
    return np.array(
        [
            [0.5, 0, 0, -0.5j],
            [0, 0, 0, 0],
            [0, 0, 0, 0],
            [0.5j, 0, 0, 0.5],
        ],
        dtype=complex,
    )


def densities_spanning_basis(n: int) -> list[np.ndarray]:
    """Rank-1 projector states whose span is the full Hermitian matrix space.

    Two channels agreeing on all of them agree on every state by linearity.
    """
    states = []
    for j in range(n):
        e = np.zeros(n, dtype=complex)
        e[j] = 1.0
        states.append(np.outer(e, e.conj()))
    for j in range(n):
        for k in range(j + 1, n):
            for phase in (1.0, 1.0j):
                v = np.zeros(n, dtype=complex)
                v[j] = 1 / np.sqrt(2)
                v[k] = phase / np.sqrt(2)
                states.append(np.outer(v, v.conj()))
    return states


def channel_action_distance(apply_a, apply_b, n: int) -> float:
    """Largest entrywise deviation of two channel actions over the state basis."""
    worst = 0.0
    for state in densities_spanning_basis(n):
        out_a = apply_a(state)
        out_b = apply_b(state)
        worst = max(worst, float(np.max(np.abs(out_a - out_b))))
    return worst
