"""Lipschitz maps out of finite metric spaces.

Every map on a finite domain is Lipschitz, and its set of difference
quotients is finite, so it is automatically Lipschitz compact;
:func:`difference_quotient_set` exposes that set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DimensionMismatch, NotScalar, SingletonDomain, SingularMap
from .metric import FiniteMetricSpace, SubsetEmbedding
from .norms import NormedSpace, distortion


@dataclass(frozen=True, eq=False)
class LipschitzMap:
    """``f: domain -> codomain`` as a table of values.

    ``codomain=None`` marks a real-valued map; its ``values`` has shape
    ``(n,)``. Otherwise ``values`` has shape ``(n, codomain.dim)``.
    """

    domain: FiniteMetricSpace
    codomain: Optional[NormedSpace]
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        n = self.domain.n
        if self.codomain is None:
            if v.shape != (n,):
                raise DimensionMismatch(f"scalar map needs {n} values, got shape {v.shape}")
        else:
            v = v.reshape(n, -1) if v.size == n * self.codomain.dim else v
            if v.shape != (n, self.codomain.dim):
                raise DimensionMismatch(
                    f"map into dim {self.codomain.dim} needs shape ({n}, {self.codomain.dim}), got {v.shape}"
                )
        if not np.all(np.isfinite(v)):
            raise ValueError("map values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def is_scalar(self) -> bool:
        return self.codomain is None

    def _norms(self, diffs) -> np.ndarray:
        if self.is_scalar:
            return np.abs(diffs)
        return self.codomain.evaluate_many(diffs)

    def base_normalized(self) -> "LipschitzMap":
        return LipschitzMap(self.domain, self.codomain, self.values - self.values[self.domain.base_index])

    def scaled(self, lam: float) -> "LipschitzMap":
        return LipschitzMap(self.domain, self.codomain, lam * self.values)

    def to_json(self) -> dict:
        return {
            "space": self.domain.to_json(),
            "codomain": "scalar" if self.is_scalar else self.codomain.to_json(),
            "values": self.values.tolist(),
        }


def _pairs(n):
    i, j = np.nonzero(~np.eye(n, dtype=bool))
    return i, j


def lip_norm(f: LipschitzMap) -> float:
    """Best Lipschitz constant ``max_{x != y} ||f(x) - f(y)|| / d(x, y)``; 0 on a singleton."""
    n = f.domain.n
    if n < 2:
        return 0.0
    i, j = np.triu_indices(n, 1)
    num = f._norms(f.values[i] - f.values[j])
    return float(np.max(num / f.domain.dist[i, j]))


def difference_quotient_set(f: LipschitzMap) -> np.ndarray:
    """All ``(f(x) - f(y)) / d(x, y)`` over ordered pairs ``x != y``.

    Rows are ordered by ``(x, y)`` lexicographically; the result has
    ``n(n-1)`` rows.
    """
    n = f.domain.n
    if n < 2:
        raise SingletonDomain("difference quotients need at least two points")
    i, j = _pairs(n)
    d = f.domain.dist[i, j]
    diff = f.values[i] - f.values[j]
    return diff / (d if f.is_scalar else d[:, None])


def compose_linear(A, f: LipschitzMap, codomain: NormedSpace) -> LipschitzMap:
    """The map ``x -> A f(x)`` into ``codomain``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if f.is_scalar:
        raise NotScalar("compose_linear expects a vector-valued map")
    return LipschitzMap(f.domain, codomain, f.values @ A.T)


def mcshane_extend(f: LipschitzMap, M: FiniteMetricSpace, indices=None, variant: str = "inf") -> LipschitzMap:
    """Extend a real-valued ``f`` from ``N`` to ``M`` without raising its constant.

    ``variant="inf"`` gives ``F(x) = min_y f(y) + L d(x, y)``, the largest
    ``L``-Lipschitz extension; ``"sup"`` gives ``max_y f(y) - L d(x, y)``, the
    smallest. ``indices`` locates ``N`` inside ``M`` (default: the first
    ``|N|`` points).
    """
    if not f.is_scalar:
        raise NotScalar("McShane extension is for real-valued maps")
    emb = embedding_for(f.domain, M, indices)
    idx = np.array(emb.indices)
    L = lip_norm(f)
    D = M.dist[:, idx]
    if variant == "inf":
        F = np.min(f.values[None, :] + L * D, axis=1)
    elif variant == "sup":
        F = np.max(f.values[None, :] - L * D, axis=1)
    else:
        raise ValueError(f"variant must be 'inf' or 'sup', not {variant!r}")
    F[idx] = f.values
    return LipschitzMap(M, None, F)


def embedding_for(N: FiniteMetricSpace, M: FiniteMetricSpace, indices=None, tol: float = 1e-12) -> SubsetEmbedding:
    """Check that ``N`` sits isometrically in ``M`` at ``indices``."""
    if indices is None:
        indices = range(N.n)
    emb = SubsetEmbedding(M, tuple(indices))
    idx = list(emb.indices)
    if len(idx) != N.n:
        raise DimensionMismatch(f"{len(idx)} indices for a {N.n}-point domain")
    if not np.all(np.abs(M.dist[np.ix_(idx, idx)] - N.dist) <= tol * (1.0 + N.dist)):
        raise ValueError("domain distances do not match the superspace restricted to indices")
    if idx.index(M.base_index) != N.base_index:
        raise ValueError("base points of the domain and superspace do not correspond")
    return emb


def transfer_extension(
    phi,
    source: NormedSpace,
    f: LipschitzMap,
    M: FiniteMetricSpace,
    indices=None,
    extend: Optional[Callable] = None,
) -> LipschitzMap:
    """Extend ``f: N -> Y`` through a linear bi-Lipschitz ``phi: X -> Y``.

    The map ``phi^-1 o f`` is extended inside ``source`` (``X``) by the
    engine ``extend(g, M, indices)`` and pushed forward by ``phi``. The
    result's constant is at most ``distortion(phi)`` times the engine's.
    """
    if f.is_scalar:
        raise NotScalar("transfer_extension expects a vector-valued map")
    A = np.asarray(phi, dtype=float)
    if A.shape != (f.codomain.dim, source.dim):
        raise DimensionMismatch(f"phi has shape {A.shape}, expected ({f.codomain.dim}, {source.dim})")
    if np.linalg.matrix_rank(A) < source.dim or A.shape[0] != A.shape[1]:
        raise SingularMap("phi must be square and invertible")
    if extend is None:
        from .extension import optimal_extension as extend
    g = compose_linear(np.linalg.inv(A), f, source)
    G = extend(g, M, indices)
    G = getattr(G, "extension", G)
    F = compose_linear(A, G, f.codomain)
    # pin the original values on N exactly
    emb = embedding_for(f.domain, M, indices)
    vals = np.array(F.values)
    vals[list(emb.indices)] = f.values
    return LipschitzMap(M, f.codomain, vals)


def transfer_bound(phi, source: NormedSpace, target: NormedSpace) -> float:
    return distortion(phi, source, target).value
