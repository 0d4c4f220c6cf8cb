import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lipfree.errors import NotScalar, SingletonDomain
from lipfree.extension import optimal_extension
from lipfree.lipschitz import (
    LipschitzMap,
    compose_linear,
    difference_quotient_set,
    lip_norm,
    mcshane_extend,
    transfer_extension,
)
from lipfree.metric import validate_metric
from lipfree.norms import distortion, l1, l2, linf, operator_norm

from conftest import random_metric

ISO = np.array([[1.0, 1.0], [1.0, -1.0]])  # l1^2 -> linf^2 isometry


def brute_lip(f):
    n = f.domain.n
    best = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                diff = f.values[i] - f.values[j]
                nd = abs(diff) if f.is_scalar else f.codomain(diff)
                best = max(best, nd / f.domain.dist[i, j])
    return best


def test_lip_examples(path3):
    two = validate_metric([[0, 1], [1, 0]])
    assert lip_norm(LipschitzMap(two, None, [0, 1])) == 1
    assert lip_norm(LipschitzMap(path3, None, [5, 5, 5])) == 0
    assert lip_norm(LipschitzMap(path3, None, [0, 1, 3])) == 2
    assert lip_norm(LipschitzMap(validate_metric([[0]]), None, [4.0])) == 0


def test_quotient_examples(path3):
    two = validate_metric([[0, 2], [2, 0]])
    q = difference_quotient_set(LipschitzMap(two, l2(2), [[0, 0], [2, 0]]))
    assert sorted(map(tuple, q)) == [(-1.0, 0.0), (1.0, 0.0)]
    assert np.all(difference_quotient_set(LipschitzMap(path3, None, [2, 2, 2])) == 0)
    q = difference_quotient_set(LipschitzMap(path3, None, [0, 1, 3]))
    assert sorted(q) == sorted([1, -1, 1.5, -1.5, 2, -2])
    with pytest.raises(SingletonDomain):
        difference_quotient_set(LipschitzMap(validate_metric([[0]]), None, [1.0]))


def test_mcshane_example():
    N = validate_metric([[0, 2], [2, 0]])
    M = validate_metric([[0, 2, 1], [2, 0, 1], [1, 1, 0]])
    f = LipschitzMap(N, None, [0, 2])
    F = mcshane_extend(f, M, variant="inf")
    assert F.values[2] == 1
    assert np.array_equal(mcshane_extend(f, N).values, f.values)
    c = LipschitzMap(N, None, [3, 3])
    for variant in ("inf", "sup"):
        assert np.all(mcshane_extend(c, M, variant=variant).values == 3)
    with pytest.raises(NotScalar):
        mcshane_extend(LipschitzMap(N, l2(1), [[0], [1]]), M)


@given(st.integers(0, 2**32 - 1), st.integers(2, 6), st.integers(1, 3))
def test_mcshane_envelopes(seed, n, extra):
    rng = np.random.default_rng(seed)
    M = random_metric(rng, n + extra)
    N = validate_metric(M.dist[:n, :n])
    f = LipschitzMap(N, None, rng.standard_normal(n))
    L = lip_norm(f)
    hi = mcshane_extend(f, M, variant="inf")
    lo = mcshane_extend(f, M, variant="sup")
    for F in (hi, lo):
        assert np.array_equal(F.values[:n], f.values)
        assert abs(lip_norm(F) - L) <= 1e-12 * max(1.0, L)
    # the smallest extension never exceeds the largest
    assert np.all(lo.values <= hi.values + 1e-12)
    # and every optimal extension is squeezed between them
    mid = optimal_extension(f, M)
    assert np.all(lo.values - 1e-9 <= mid.extension.values)
    assert np.all(mid.extension.values <= hi.values + 1e-9)


@given(st.integers(0, 2**32 - 1), st.floats(-3, 3))
def test_lip_properties(seed, lam):
    rng = np.random.default_rng(seed)
    M = random_metric(rng, 5)
    f = LipschitzMap(M, linf(3), rng.standard_normal((5, 3)))
    L = lip_norm(f)
    assert L == pytest.approx(brute_lip(f), rel=1e-12)
    assert lip_norm(f.scaled(lam)) == pytest.approx(abs(lam) * L, rel=1e-12, abs=1e-15)
    q = difference_quotient_set(f)
    assert q.shape == (20, 3)
    assert np.max(linf(3).evaluate_many(q)) == L
    A = rng.standard_normal((2, 3))
    g = compose_linear(A, f, l2(2))
    assert lip_norm(g) <= operator_norm(A, linf(3), l2(2)).value * L + 1e-12


def _four_point_map(rng, target):
    M = random_metric(rng, 5)
    N = validate_metric(M.dist[:4, :4])
    f = LipschitzMap(N, target, rng.standard_normal((4, target.dim)))
    return f, M


def test_transfer_through_isometry(rng):
    f, M = _four_point_map(rng, linf(2))
    F = transfer_extension(ISO, l1(2), f, M)
    assert np.array_equal(F.values[:4], f.values)
    assert lip_norm(F) / lip_norm(f) <= 1 + 1e-7


def test_transfer_identity_matches_direct(rng):
    f, M = _four_point_map(rng, l2(2))
    direct = optimal_extension(f, M)
    F = transfer_extension(np.eye(2), l2(2), f, M)
    assert np.allclose(F.values, direct.extension.values, atol=1e-12)


def test_transfer_scaling_cancels(rng):
    f, M = _four_point_map(rng, linf(2))
    assert distortion(2 * np.eye(2), linf(2), linf(2)).value == pytest.approx(1.0)
    F = transfer_extension(2 * np.eye(2), linf(2), f, M)
    direct = optimal_extension(f, M).constant
    assert lip_norm(F) / lip_norm(f) == pytest.approx(direct, abs=1e-9)


@given(st.integers(0, 2**32 - 1))
def test_transfer_bound(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((2, 2)) + 2 * np.eye(2)
    f, M = _four_point_map(rng, l2(2))
    F = transfer_extension(A, linf(2), f, M)
    dist = distortion(A, linf(2), l2(2))
    assert dist.certified
    assert lip_norm(F) <= dist.value * (1 + 1e-7) * lip_norm(f) + 1e-12
