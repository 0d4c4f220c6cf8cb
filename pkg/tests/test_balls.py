import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lipfree.balls import (
    BallSystem,
    all_pairwise,
    ball_extension_bridge,
    canonical_ball_systems,
    joint_intersection,
    linf_interval_point,
    pairwise_intersections,
    random_ball_system,
    verify_empty,
    weak_intersection_sampler,
)
from lipfree.errors import DimensionMismatch, PairwiseFailure
from lipfree.solver.convex import EmptyEvidence, Feasible
from lipfree.norms import PolyhedralNorm, l1, l2, linf

HEXAGON = PolyhedralNorm([[1, 0], [0.5, np.sqrt(3) / 2], [-0.5, np.sqrt(3) / 2]], name="hex")


def test_examples():
    S = BallSystem(linf(2), [[0, 0], [2, 0]], [1, 1])
    assert all_pairwise(S)
    res = joint_intersection(S)
    assert isinstance(res, Feasible) and S.contains(res.point)
    far = BallSystem(linf(2), [[0, 0], [3, 0]], [1, 1])
    assert not pairwise_intersections(far)[0, 1]
    ev = joint_intersection(far)
    assert isinstance(ev, EmptyEvidence)
    assert ev.value == pytest.approx(0.5)
    assert verify_empty(far, ev) <= -1e-9
    with pytest.raises(DimensionMismatch):
        BallSystem(linf(2), [[0, 0, 0]], [1])


def test_euclidean_cap_is_empty():
    (S,) = canonical_ball_systems(l2(2))
    assert all_pairwise(S)
    ev = joint_intersection(S)
    assert isinstance(ev, EmptyEvidence)
    assert ev.lower_bound >= 0.154
    (T,) = canonical_ball_systems(linf(2))
    assert isinstance(joint_intersection(T), Feasible)


@settings(max_examples=60)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(2, 5))
def test_linf_interval_oracle(seed, d, k):
    rng = np.random.default_rng(seed)
    C = rng.uniform(-1, 1, (k, d))
    r = rng.uniform(0.1, 1.0, k)
    S = BallSystem(linf(d), C, r)
    res = joint_intersection(S)
    z = linf_interval_point(C, r)
    assert (z is None) == isinstance(res, EmptyEvidence)
    if z is not None:
        assert S.contains(z) and S.contains(res.point)
    else:
        assert verify_empty(S, res) <= -1e-9
        # LP violation value equals the interval oracle's half-gap
        gap = np.max(np.max(C - r[:, None], 0) - np.min(C + r[:, None], 0))
        assert res.value == pytest.approx(gap / 2, abs=1e-9)


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["l1", "hex"]))
def test_polyhedral_evidence_certified(seed, kind):
    X = l1(2) if kind == "l1" else HEXAGON
    rng = np.random.default_rng(seed)
    S = BallSystem(X, rng.uniform(-1, 1, (4, 2)), rng.uniform(0.05, 0.6, 4))
    res = joint_intersection(S)
    if isinstance(res, Feasible):
        assert S.contains(res.point)
    else:
        assert verify_empty(S, res) <= -1e-9
        assert res.value > 0


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["l1", "linf", "hex"]))
def test_bridge_agrees_with_lp(seed, kind):
    X = {"l1": l1(2), "linf": linf(2), "hex": HEXAGON}[kind]
    S, _ = random_ball_system(np.random.default_rng(seed), X, 4)
    br = ball_extension_bridge(S)
    lp = joint_intersection(S)
    if kind == "hex":
        # not injective: the bridge may need to inflate, but never lies
        assert br.max_violation <= (br.constant - 1) * S.radii.max() + 1e-7
        return
    assert isinstance(lp, Feasible)
    assert br.verified and br.constant <= 1 + 1e-7
    assert S.contains(br.point, 1e-7)


def test_bridge_special_cases():
    same = BallSystem(linf(2), [[1, 1], [1, 1]], [0.5, 0.3])
    br = ball_extension_bridge(same)
    assert br.verified and np.allclose(br.point, [1, 1])
    with pytest.raises(PairwiseFailure):
        ball_extension_bridge(BallSystem(linf(2), [[0, 0], [5, 0]], [1, 1]))
    with pytest.raises(TypeError):
        ball_extension_bridge(BallSystem(l2(2), [[0, 0]], [1]))
    diamond = BallSystem(l1(2), [[0, 0], [2, 0], [1, 1]], [1, 1, 1])
    assert ball_extension_bridge(diamond).verified


def test_sampler():
    ok = weak_intersection_sampler(linf(3), trials=50, seed=1)
    assert ok.checked == 50 and ok.violations == [] and ok.indeterminate == 0
    bad = weak_intersection_sampler(l2(2), trials=10, seed=1, seeded=canonical_ball_systems(l2(2)))
    assert bad.violations and bad.violations[0]["source"] == "seeded"
    again = weak_intersection_sampler(l2(2), trials=10, seed=1, seeded=canonical_ball_systems(l2(2)))
    assert again.to_json() == bad.to_json()
