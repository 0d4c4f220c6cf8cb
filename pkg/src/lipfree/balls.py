"""Ball systems: pairwise and joint intersection, the four-ball sampler,
and the bridge that finds a common point through a Lipschitz extension.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DimensionMismatch, EngineFailure, PairwiseFailure, SolverFailure
from .instances import equilateral_cap_balls
from .lipschitz import LipschitzMap
from .metric import metric_from_points, validate_metric
from .norms import EuclideanNorm, NormedSpace, PolyhedralNorm, linf_embedding
from .solver.convex import EmptyEvidence, Feasible, Indeterminate, euclidean_feasibility
from .solver.lp import LinearProgram, farkas_value, solve_lp
from .tolerances import EMPTY_EVIDENCE_TOL, EXTENSION_TOL, FEAS_TOL


@dataclass(frozen=True, eq=False)
class BallSystem:
    norm: NormedSpace
    centers: np.ndarray
    radii: np.ndarray

    def __post_init__(self):
        C = np.atleast_2d(np.array(self.centers, dtype=float))
        r = np.array(self.radii, dtype=float).ravel()
        if C.shape[1] != self.norm.dim:
            raise DimensionMismatch(f"centers of dimension {C.shape[1]} for a {self.norm.dim}-dim norm")
        if r.shape != (C.shape[0],):
            raise DimensionMismatch("one radius per center")
        if np.any(r < 0) or not np.all(np.isfinite(r)):
            raise ValueError("radii must be finite and nonnegative")
        C.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "centers", C)
        object.__setattr__(self, "radii", r)

    def __len__(self):
        return self.centers.shape[0]

    def violation(self, y) -> np.ndarray:
        """``norm(y - x_i) - r_i`` for every ball."""
        return self.norm.evaluate_many(np.asarray(y, dtype=float)[None, :] - self.centers) - self.radii

    def contains(self, y, tol: float = FEAS_TOL) -> bool:
        return bool(np.all(self.violation(y) <= tol))

    def to_json(self) -> dict:
        return {
            "norm": self.norm.to_json(),
            "balls": [{"center": c.tolist(), "radius": float(r)} for c, r in zip(self.centers, self.radii)],
        }


def pairwise_intersections(S: BallSystem, tol: float = FEAS_TOL) -> np.ndarray:
    """``M[i, j]`` is true iff ``norm(x_i - x_j) <= r_i + r_j + tol``.

    Exact in every normed space: go along the segment from ``x_i`` to ``x_j``.
    """
    C = S.centers
    k = len(S)
    D = S.norm.evaluate_many((C[:, None, :] - C[None, :, :]).reshape(-1, C.shape[1])).reshape(k, k)
    return D <= S.radii[:, None] + S.radii[None, :] + tol


def all_pairwise(S: BallSystem, tol: float = FEAS_TOL) -> bool:
    return bool(np.all(pairwise_intersections(S, tol)))


def _polyhedral_lp(S: BallSystem, minimise_violation: bool) -> LinearProgram:
    G = S.norm.signed_functionals
    d = S.norm.dim
    rows, rhs = [], []
    for x, r in zip(S.centers, S.radii):
        for g in G:
            rows.append(np.append(g, -1.0) if minimise_violation else g)
            rhs.append(r + g @ x)
    A = np.array(rows)
    if minimise_violation:
        c = np.zeros(d + 1)
        c[-1] = 1.0
        return LinearProgram(c, A, rhs, ["<="] * len(rows), [(None, None)] * (d + 1))
    return LinearProgram(np.zeros(d), A, rhs, ["<="] * len(rows), [(None, None)] * d)


def joint_intersection(S: BallSystem, *, feas_tol: float = FEAS_TOL, empty_tol: float = EMPTY_EVIDENCE_TOL,
                       seed: int = 0):
    """Common point of all balls, or evidence that none exists.

    Polyhedral norms are exact LPs; an empty intersection comes with a Farkas
    certificate. Euclidean systems use the certified min-max kernel and can
    come back :class:`Indeterminate`.
    """
    if len(S) == 0:
        raise ValueError("empty ball system")
    if isinstance(S.norm, EuclideanNorm):
        return euclidean_feasibility(S.centers, S.radii, feas_tol=feas_tol, empty_tol=empty_tol, seed=seed)
    lp = _polyhedral_lp(S, False)
    out = solve_lp(lp)
    if out.optimal:
        return Feasible(out.x, float(np.max(S.violation(out.x))))
    if out.status != "infeasible":
        raise SolverFailure(f"ball feasibility LP ended {out.status}")
    v = solve_lp(_polyhedral_lp(S, True))
    if not v.optimal:
        raise SolverFailure(f"ball violation LP ended {v.status}")
    return EmptyEvidence(float(v.value), float(v.value), farkas=out.farkas)


def verify_empty(S: BallSystem, ev: EmptyEvidence) -> float:
    """Re-check polyhedral emptiness evidence; negative means certified."""
    return farkas_value(_polyhedral_lp(S, False), ev.farkas)


def linf_interval_point(centers_inf, radii) -> Optional[np.ndarray]:
    """Per-coordinate interval intersection of ``l_inf`` balls (midpoint), or None."""
    lo = np.max(centers_inf - radii[:, None], axis=0)
    hi = np.min(centers_inf + radii[:, None], axis=0)
    if np.any(lo > hi + FEAS_TOL):
        return None
    return 0.5 * (lo + np.maximum(lo, hi))


# -- sampler ------------------------------------------------------------------


@dataclass
class SamplerResult:
    norm: dict
    n_balls: int
    trials: int
    seed: int
    checked: int = 0
    rejected: int = 0
    indeterminate: int = 0
    violations: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def random_ball_system(rng, norm: NormedSpace, n_balls: int, max_tries: int = 1000) -> tuple[BallSystem, int]:
    """Pairwise-intersecting system near the tangent regime; returns it with the rejection count."""
    for tries in range(max_tries):
        C = rng.uniform(-1.0, 1.0, size=(n_balls, norm.dim))
        D = norm.evaluate_many((C[:, None, :] - C[None, :, :]).reshape(-1, norm.dim)).reshape(n_balls, n_balls)
        r = D.max(axis=1) / 2.0 * rng.uniform(0.9, 1.1, size=n_balls)
        S = BallSystem(norm, C, r)
        if all_pairwise(S, 0.0):
            return S, tries
    raise RuntimeError("could not sample a pairwise-intersecting system")


def canonical_ball_systems(norm: NormedSpace) -> list:
    if norm.dim < 2:
        return []
    C, r = equilateral_cap_balls(norm.dim)
    return [BallSystem(norm, C, r)]


def weak_intersection_sampler(norm: NormedSpace, n_balls: int = 4, trials: int = 1000, seed: int = 0,
                              seeded=()) -> SamplerResult:
    """Look for pairwise-intersecting balls with no common point.

    ``seeded`` systems are checked before the random ones (those without all
    pairwise intersections count as rejected). Only certified empty
    intersections become violations; indeterminate ones are counted apart.
    """
    out = SamplerResult(norm.to_json(), n_balls, trials, seed)
    systems = []
    for S in seeded:
        if all_pairwise(S):
            systems.append(("seeded", S))
        else:
            out.rejected += 1
    if trials < 0:
        raise ValueError("trials must be nonnegative")
    for t, child in enumerate(np.random.SeedSequence(seed).spawn(trials)):
        S, rej = random_ball_system(np.random.default_rng(child), norm, n_balls)
        out.rejected += rej
        systems.append((f"trial:{t}", S))
    for label, S in systems:
        res = joint_intersection(S, seed=seed)
        out.checked += 1
        if isinstance(res, EmptyEvidence):
            entry = S.to_json()
            entry.update(source=label, value=res.value, lower_bound=res.lower_bound)
            if res.farkas is not None:
                entry["farkas"] = np.asarray(res.farkas).tolist()
            out.violations.append(entry)
        elif isinstance(res, Indeterminate):
            out.indeterminate += 1
    return out


# -- bridge -------------------------------------------------------------------


@dataclass(frozen=True)
class BridgeResult:
    point: np.ndarray
    constant: float
    z: Optional[np.ndarray]
    verified: bool
    max_violation: float


def ball_extension_bridge(S: BallSystem, extend: Optional[Callable] = None,
                          tol: float = EXTENSION_TOL) -> BridgeResult:
    """Common point of pairwise-intersecting polyhedral balls via a Lipschitz extension.

    The centers are embedded isometrically in ``l_inf^k``; there the balls
    meet (per-coordinate intervals), say at ``z``. The map sending each
    embedded center back to its center has constant 1; extending it to ``z``
    with constant ``c`` lands in every ``B(x_i, c r_i)``.
    """
    if not isinstance(S.norm, PolyhedralNorm):
        raise TypeError("the bridge needs a polyhedral norm")
    if not all_pairwise(S):
        raise PairwiseFailure("balls do not intersect pairwise")
    if extend is None:
        from .extension import optimal_extension as extend
    # identical centers: keep the smallest radius
    C, r = [], []
    for x, rad in zip(S.centers, S.radii):
        for i, y in enumerate(C):
            if S.norm(x - y) <= 1e-12:
                r[i] = min(r[i], rad)
                break
        else:
            C.append(x)
            r.append(rad)
    C, r = np.array(C), np.array(r)
    E = linf_embedding(S.norm)
    phi = C @ E.T
    z = linf_interval_point(phi, r)
    if z is None:
        raise PairwiseFailure("embedded l_inf balls have no common point")
    gaps = np.max(np.abs(phi - z), axis=1)
    if C.shape[0] == 1 or np.min(gaps) <= 1e-12:
        y = C[int(np.argmin(gaps))]
        const = 1.0
    else:
        linf_k = PolyhedralNorm(np.eye(E.shape[0]), name=f"linf:{E.shape[0]}")
        M = metric_from_points(np.vstack([phi, z]), linf_k, 0)
        N = validate_metric(M.dist[:-1, :-1], 0)
        f = LipschitzMap(N, S.norm, C)
        try:
            res = extend(f, M, None)
        except SolverFailure as exc:
            raise EngineFailure(str(exc)) from exc
        y = np.asarray(res.extension.values[-1])
        const = float(res.constant)
    viol = S.violation(y)
    return BridgeResult(y, const, z, bool(np.all(viol <= FEAS_TOL) and const <= 1.0 + tol),
                        float(np.max(viol)))
