"""Canonical small configurations used as seeded witnesses.

The equilateral configuration: four points at mutual distance 2 plus a fifth
at distance 1 from each (the corners and centre of a square in ``l_inf^2``).
Sending three corners to an equilateral triangle of side 2 and the fourth to
its circumcentre gives a 1-Lipschitz map whose best extension to the centre
costs the circumradius ``2/sqrt(3)`` in the Euclidean plane, but costs
nothing in ``l_inf^n``.
"""

from __future__ import annotations

import numpy as np

from .lipschitz import LipschitzMap, lip_norm
from .metric import FiniteMetricSpace, validate_metric
from .norms import NormedSpace

SQRT3 = float(np.sqrt(3.0))
TRIANGLE = np.array([[0.0, 0.0], [2.0, 0.0], [1.0, SQRT3]])
CIRCUMCENTER = np.array([1.0, 1.0 / SQRT3])


def equilateral_metric(n_domain: int = 4) -> FiniteMetricSpace:
    """``n_domain`` (3 or 4) points at mutual distance 2, then one at distance 1 from all."""
    if n_domain not in (3, 4):
        raise ValueError("equilateral configuration has 3 or 4 domain points")
    n = n_domain + 1
    d = np.full((n, n), 2.0)
    d[-1, :] = d[:, -1] = 1.0
    np.fill_diagonal(d, 0.0)
    return validate_metric(d, 0)


def _pad(P, dim):
    if dim < 2:
        raise ValueError("equilateral witness needs a target of dimension >= 2")
    out = np.zeros((P.shape[0], dim))
    out[:, :2] = P
    return out


def equilateral_map(target: NormedSpace, n_domain: int = 4) -> tuple[LipschitzMap, FiniteMetricSpace]:
    """The map ``N -> target`` of the equilateral configuration and the superspace ``M``.

    Values are rescaled so the map has Lipschitz constant exactly 1 under
    ``target``'s norm.
    """
    M = equilateral_metric(n_domain)
    N = validate_metric(M.dist[:n_domain, :n_domain], 0)
    pts = TRIANGLE if n_domain == 3 else np.vstack([TRIANGLE, CIRCUMCENTER])
    f = LipschitzMap(N, target, _pad(pts, target.dim))
    return f.scaled(1.0 / lip_norm(f)), M


def equilateral_cap_balls(dim: int = 2):
    """Unit balls on an equilateral triangle of side 2 and a radius-1.2 ball at its centre.

    Returns ``(centers, radii)``. In the Euclidean plane the balls meet
    pairwise but have no common point.
    """
    centers = _pad(np.vstack([TRIANGLE, CIRCUMCENTER]), dim)
    return centers, np.array([1.0, 1.0, 1.0, 1.2])


def circumradius(a, b, c) -> float:
    """Circumradius ``|ab| |bc| |ca| / (4 area)`` of a Euclidean triangle."""
    a, b, c = (np.asarray(p, dtype=float) for p in (a, b, c))
    x, y, z = np.linalg.norm(b - c), np.linalg.norm(c - a), np.linalg.norm(a - b)
    s = 0.5 * (x + y + z)
    area = np.sqrt(max(s * (s - x) * (s - y) * (s - z), 0.0))
    return float(x * y * z / (4.0 * area))
