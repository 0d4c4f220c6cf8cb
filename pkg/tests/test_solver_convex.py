import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from lipfree.solver.convex import (
    EmptyEvidence,
    Feasible,
    Indeterminate,
    euclidean_feasibility,
    minimax,
    minmax_ball,
)


def _oracle(C, w, o):
    """Grid scan over the bounding box, then Nelder-Mead from the best cells."""
    def phi(y):
        return float(np.max(np.linalg.norm(y - C, axis=1) / w - o))

    lo, hi = C.min(0), C.max(0)
    axes = [np.linspace(a, b, 61) for a, b in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*axes), -1).reshape(-1, C.shape[1])
    vals = np.max(np.linalg.norm(grid[:, None, :] - C[None], axis=2) / w - o, axis=1)
    best = np.inf
    for y0 in grid[np.argsort(vals)[:5]]:
        r = minimize(phi, y0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 20000})
        best = min(best, r.fun)
    return best


def test_examples():
    r = minmax_ball([[0.0, 0.0], [2.0, 0.0]])
    assert r.value == pytest.approx(1.0, abs=1e-7)
    assert np.allclose(r.point, [1.0, 0.0], atol=1e-6)

    tri = np.array([[0.0, 0.0], [2.0, 0.0], [1.0, np.sqrt(3.0)]])
    r = minmax_ball(tri)
    assert r.certified
    assert r.value == pytest.approx(2 / np.sqrt(3.0), abs=1e-7)
    assert r.lower_bound <= r.value

    r = minimax([[3.0, 4.0]], None, [0.5])
    assert r.value == -0.5 and r.certified


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_matches_grid_oracle(seed, n):
    rng = np.random.default_rng(seed)
    C = rng.uniform(-1, 1, size=(n, 2))
    w = rng.uniform(0.5, 2.0, size=n)
    o = rng.uniform(0.0, 0.5, size=n)
    r = minimax(C, w, o)
    ref = _oracle(C, w, o)
    assert r.certified
    assert r.lower_bound <= ref + 1e-9
    assert abs(r.value - ref) <= 1e-5


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6), st.integers(2, 4))
def test_bracket_is_sound(seed, n, d):
    rng = np.random.default_rng(seed)
    C = rng.standard_normal((n, d))
    w = rng.uniform(0.5, 2.0, n)
    r = minimax(C, w)
    # no point can beat the certified lower bound
    Y = rng.standard_normal((2000, d))
    vals = np.max(np.linalg.norm(Y[:, None] - C[None], axis=2) / w, axis=1)
    assert np.all(vals >= r.lower_bound - 1e-12)
    assert r.value == pytest.approx(np.max(np.linalg.norm(r.point - C, axis=1) / w))


def test_feasibility_outcomes():
    C = np.array([[0.0, 0.0], [2.0, 0.0]])
    assert isinstance(euclidean_feasibility(C, [1.5, 1.5]), Feasible)
    ev = euclidean_feasibility(C, [0.5, 0.5])
    assert isinstance(ev, EmptyEvidence)
    assert ev.lower_bound == pytest.approx(0.5, abs=1e-7)
    # a gap of 1e-7 sits between the feasibility and emptiness tolerances
    res = euclidean_feasibility(C, [1.0 - 5e-8, 1.0 - 5e-8])
    assert isinstance(res, Indeterminate)
    assert res.lower_bound < 1e-6


def test_deterministic():
    C = np.random.default_rng(3).standard_normal((5, 3))
    a, b = minimax(C, seed=7), minimax(C, seed=7)
    assert np.array_equal(a.point, b.point) and a.value == b.value


def test_bad_input():
    with pytest.raises(ValueError):
        minimax([[0.0], [1.0]], [1.0, 0.0])
