"""Euclidean min-max kernels.

Both public problems are instances of ``min_y max_i ||y - c_i|| / w_i - o_i``:
weighted distance (``o = 0``) for one-point Euclidean extension, and
radius-offset distance (``w = 1``, ``o = r``) for ball intersection.

The solve is a batched Polyak subgradient warm start followed by an SLSQP
polish of the epigraph form.  Every answer carries a lower bound built from a
nonnegative combination of active subgradients, so the reported bracket
``[lower_bound, value]`` is a certificate, not an estimate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize, nnls

from ..errors import DimensionMismatch
from ..tolerances import EMPTY_EVIDENCE_TOL, EUCLID_TOL, FEAS_TOL


@dataclass(frozen=True)
class MinimaxResult:
    point: np.ndarray
    value: float  # objective at ``point`` (an upper bound on the minimum)
    lower_bound: float
    certified: bool
    iterations: int

    @property
    def gap(self) -> float:
        return self.value - self.lower_bound


@dataclass(frozen=True)
class Feasible:
    point: np.ndarray
    value: float = 0.0

    status = "feasible"


@dataclass(frozen=True)
class EmptyEvidence:
    """Proof that a ball system has no common point.

    ``value`` is the minimised max violation, ``lower_bound`` its certified
    lower bound (positive); ``farkas`` is set for polyhedral LP evidence.
    """

    value: float
    lower_bound: float
    farkas: Optional[np.ndarray] = None

    status = "empty"


@dataclass(frozen=True)
class Indeterminate:
    value: float
    lower_bound: float

    status = "indeterminate"


def _objective(Y, C, w, o):
    # Y: (R, d) batch of points -> (R, n) matrix of phi_i
    diff = Y[:, None, :] - C[None, :, :]
    dist = np.linalg.norm(diff, axis=2)
    return dist / w - o, diff, dist


def _subgradient_phase(C, w, o, starts, iters):
    Y = starts.copy()
    R = Y.shape[0]
    scale = 1.0 + float(np.max(np.linalg.norm(C - C.mean(0), axis=1)) / np.min(w))
    best_val = np.full(R, np.inf)
    best_Y = Y.copy()
    rows = np.arange(R)
    for k in range(iters):
        phi, diff, dist = _objective(Y, C, w, o)
        i = np.argmax(phi, axis=1)
        val = phi[rows, i]
        better = val < best_val
        best_val[better] = val[better]
        best_Y[better] = Y[better]
        di = np.maximum(dist[rows, i], 1e-300)
        g = diff[rows, i] / (di * w[i])[:, None]
        gn2 = np.maximum(np.sum(g * g, axis=1), 1e-300)
        # Polyak step towards an adaptive target below the best value so far
        target = best_val - 0.1 * scale / np.sqrt(k + 1.0)
        Y = Y - ((val - target) / gn2)[:, None] * g
    j = int(np.argmin(best_val))
    return best_Y[j], iters


def _polish(C, w, o, y0):
    n, d = C.shape
    t0 = float(np.max(np.linalg.norm(y0 - C, axis=1) / w - o))

    def cons(z):
        y, t = z[:d], z[d]
        diff = y - C
        return (w * (t + o)) ** 2 - np.sum(diff * diff, axis=1)

    def cons_jac(z):
        y, t = z[:d], z[d]
        J = np.empty((n, d + 1))
        J[:, :d] = -2.0 * (y - C)
        J[:, d] = 2.0 * w * w * (t + o)
        return J

    lin = np.zeros((n, d + 1))
    lin[:, d] = 1.0
    res = minimize(
        lambda z: z[d],
        np.append(y0, t0),
        jac=lambda z: np.eye(d + 1)[d],
        method="SLSQP",
        constraints=[
            {"type": "ineq", "fun": cons, "jac": cons_jac},
            {"type": "ineq", "fun": lambda z: z[d] + o, "jac": lambda z: lin},
        ],
        options={"ftol": 1e-15, "maxiter": 500},
    )
    return np.asarray(res.x[:d])


def _certificate(C, w, o, y):
    """Certified lower bound on ``min_y max_i phi_i`` from the point ``y``."""
    n, d = C.shape
    dist = np.linalg.norm(y - C, axis=1)
    phi = dist / w - o
    v = float(phi.max())
    trivial = float(np.max(-o))
    active = np.flatnonzero(phi >= v - 1e-6 * (1.0 + abs(v)))
    cols, owner = [], []
    for i in active:
        if dist[i] > 1e-12:
            cols.append((y - C[i]) / (dist[i] * w[i]))
            owner.append(i)
        else:
            # at a center the subdifferential contains the scaled cross-polytope
            for k in range(d):
                for s in (1.0, -1.0):
                    e = np.zeros(d)
                    e[k] = s / w[i]
                    cols.append(e)
                    owner.append(i)
    G = np.array(cols).T
    rho = 1e3
    M = np.vstack([G, np.full((1, G.shape[1]), rho)])
    rhs = np.append(np.zeros(d), rho)
    lam, _ = nnls(M, rhs, maxiter=50 * M.shape[1])
    if lam.sum() <= 0:
        return max(trivial, -np.inf)
    lam = lam / lam.sum()
    resid = float(np.linalg.norm(G @ lam))
    radius = float(dist.max())
    bound = float(sum(l * phi[i] for l, i in zip(lam, owner))) - resid * radius
    return max(trivial, bound)


def minimax(centers, weights=None, offsets=None, *, seed: int = 0, restarts: int = 10,
            max_iter: int = 50_000, tol: float = EUCLID_TOL) -> MinimaxResult:
    """Minimise ``max_i ||y - c_i|| / w_i - o_i`` over ``y``."""
    C = np.atleast_2d(np.asarray(centers, dtype=float))
    n, d = C.shape
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    o = np.zeros(n) if offsets is None else np.asarray(offsets, dtype=float)
    if w.shape != (n,) or o.shape != (n,):
        raise DimensionMismatch("one weight and one offset per center")
    if np.any(w <= 0):
        raise ValueError("weights must be positive")
    if n == 1:
        return MinimaxResult(C[0].copy(), float(-o[0]), float(-o[0]), True, 0)

    rng = np.random.default_rng(seed)
    lo, hi = C.min(0), C.max(0)
    starts = np.vstack([C.mean(0), rng.uniform(lo, hi, size=(max(restarts - 1, 0), d))])
    best: Optional[MinimaxResult] = None
    spent, chunk = 0, 60
    while spent < max_iter:
        y, k = _subgradient_phase(C, w, o, starts, chunk)
        spent += k
        for y_try in (_polish(C, w, o, y), y):
            val = float(np.max(np.linalg.norm(y_try - C, axis=1) / w - o))
            lb = _certificate(C, w, o, y_try)
            cand = MinimaxResult(y_try, val, min(lb, val), val - lb <= tol, spent)
            if best is None or (cand.certified, -cand.gap) > (best.certified, -best.gap):
                best = cand
        if best.certified:
            return best
        starts = np.vstack([best.point, rng.uniform(lo, hi, size=(max(restarts - 1, 0), d))])
        chunk = min(2 * chunk, max_iter - spent) or 1
    return best


def minmax_ball(centers, weights=None, **kw) -> MinimaxResult:
    """Point minimising the largest weighted distance ``||y - c_i|| / w_i``."""
    return minimax(centers, weights, None, **kw)


def euclidean_feasibility(centers, radii, *, feas_tol: float = FEAS_TOL,
                          empty_tol: float = EMPTY_EVIDENCE_TOL, **kw):
    """Decide whether Euclidean balls ``B(c_i, r_i)`` share a point.

    Returns :class:`Feasible`, :class:`EmptyEvidence`, or
    :class:`Indeterminate` when the certified bracket straddles the band
    ``(feas_tol, empty_tol)``.
    """
    r = np.asarray(radii, dtype=float)
    res = minimax(centers, None, r, **kw)
    if res.value <= feas_tol:
        return Feasible(res.point, res.value)
    if res.lower_bound >= empty_tol:
        return EmptyEvidence(res.value, res.lower_bound)
    return Indeterminate(res.value, res.lower_bound)
