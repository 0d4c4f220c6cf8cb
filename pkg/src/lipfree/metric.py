"""Finite pointed metric spaces and their subspaces."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange, InvalidMetric, MissingBasePoint
from .tolerances import METRIC_TOL


@dataclass(frozen=True)
class Violation:
    """One failed metric axiom, naming the offending indices."""

    kind: str  # Asymmetry | NegativeDistance | ZeroOffDiagonal | NonZeroDiagonal | TriangleViolation | ...
    indices: tuple[int, ...]
    detail: str = ""

    def __str__(self):
        return f"{self.kind} at {self.indices}" + (f": {self.detail}" if self.detail else "")


def metric_violations(dist, tol: float = METRIC_TOL) -> list[Violation]:
    """Return every violated metric axiom of ``dist`` (empty list when valid)."""
    d = np.asarray(dist, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] == 0:
        return [Violation("NotSquare", tuple(d.shape))]
    if not np.all(np.isfinite(d)):
        bad = tuple(int(i) for i in np.argwhere(~np.isfinite(d))[0])
        return [Violation("NonFinite", bad)]
    n = d.shape[0]
    out = []
    for i in range(n):
        if d[i, i] != 0.0:
            out.append(Violation("NonZeroDiagonal", (i, i), f"d={d[i, i]:.17g}"))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if i < j and abs(d[i, j] - d[j, i]) > tol:
                out.append(Violation("Asymmetry", (i, j), f"{d[i, j]:.17g} != {d[j, i]:.17g}"))
            if d[i, j] < 0:
                out.append(Violation("NegativeDistance", (i, j), f"d={d[i, j]:.17g}"))
            elif d[i, j] == 0 and i < j:
                out.append(Violation("ZeroOffDiagonal", (i, j)))
    # d[i,k] <= d[i,j] + d[j,k], checked for every triple
    slack = d[:, None, :] - d[:, :, None] - d[None, :, :]
    for i, j, k in np.argwhere(slack > tol):
        if i < k and j != i and j != k:
            out.append(
                Violation(
                    "TriangleViolation",
                    (int(i), int(j), int(k)),
                    f"d({i},{k})={d[i, k]:.17g} > d({i},{j})+d({j},{k})={d[i, j] + d[j, k]:.17g}",
                )
            )
    return out


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """A finite metric space with a distinguished base point.

    Construct through :func:`validate_metric` (or the constructor, which
    validates as well). ``dist`` is stored as a read-only array.
    """

    dist: np.ndarray
    base_index: int = 0
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        d = np.array(self.dist, dtype=float)
        violations = metric_violations(d)
        if violations:
            raise InvalidMetric(violations)
        n = d.shape[0]
        if not 0 <= self.base_index < n:
            raise IndexOutOfRange(f"base_index {self.base_index} not in [0, {n})")
        d.setflags(write=False)
        object.__setattr__(self, "dist", d)
        labels = tuple(str(x) for x in self.labels) if self.labels else tuple(str(i) for i in range(n))
        if len(labels) != n:
            raise DimensionMismatch(f"{len(labels)} labels for {n} points")
        if len(set(labels)) != n:
            raise ValueError("point labels must be unique")
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    def __len__(self):
        return self.n

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise IndexOutOfRange(f"unknown point label {label!r}") from None

    def non_base(self) -> list[int]:
        return [i for i in range(self.n) if i != self.base_index]

    def same_as(self, other: "FiniteMetricSpace", tol: float = 0.0) -> bool:
        return (
            self.n == other.n
            and self.base_index == other.base_index
            and bool(np.all(np.abs(self.dist - other.dist) <= tol))
        )

    def to_json(self) -> dict:
        return {"labels": list(self.labels), "dist": self.dist.tolist(), "base": self.base_index}

    def __repr__(self):
        return f"FiniteMetricSpace(n={self.n}, base={self.base_index})"


def validate_metric(dist, base_index: int = 0, labels: Sequence[str] = ()) -> FiniteMetricSpace:
    """Validate ``dist`` and wrap it as a pointed metric space.

    Raises :class:`InvalidMetric` listing all violated axioms.
    """
    return FiniteMetricSpace(np.asarray(dist, dtype=float), int(base_index), tuple(labels))


def shortest_path_closure(dist) -> np.ndarray:
    """All-pairs shortest-path closure (Floyd-Warshall) of a symmetric weight matrix."""
    d = np.array(dist, dtype=float)
    d = np.minimum(d, d.T)
    np.fill_diagonal(d, 0.0)
    for k in range(d.shape[0]):
        d = np.minimum(d, d[:, k : k + 1] + d[k : k + 1, :])
    return d


@dataclass(frozen=True, eq=False)
class SubsetEmbedding:
    """The inclusion of an induced subspace into its parent."""

    parent: FiniteMetricSpace
    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if not idx:
            raise ValueError("empty index set")
        if any(i < 0 or i >= self.parent.n for i in idx):
            raise IndexOutOfRange(f"indices {idx} out of range for {self.parent.n} points")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("indices must be strictly increasing")
        if self.parent.base_index not in idx:
            raise MissingBasePoint(f"base point {self.parent.base_index} not among {idx}")
        object.__setattr__(self, "indices", idx)

    @property
    def new_points(self) -> list[int]:
        s = set(self.indices)
        return [i for i in range(self.parent.n) if i not in s]


def induced_subspace(M: FiniteMetricSpace, indices) -> tuple[FiniteMetricSpace, SubsetEmbedding]:
    """Restrict ``M`` to ``indices`` (sorted); the base point must be kept."""
    idx = sorted({int(i) for i in indices})
    if not idx:
        raise ValueError("empty index set")
    if idx[0] < 0 or idx[-1] >= M.n:
        raise IndexOutOfRange(f"indices {idx} out of range for {M.n} points")
    if M.base_index not in idx:
        raise MissingBasePoint(f"base point {M.base_index} not among {idx}")
    emb = SubsetEmbedding(M, tuple(idx))
    sub = FiniteMetricSpace(
        M.dist[np.ix_(idx, idx)],
        idx.index(M.base_index),
        tuple(M.labels[i] for i in idx),
    )
    return sub, emb


def metric_from_points(points, norm, base_index: int = 0, labels: Sequence[str] = ()) -> FiniteMetricSpace:
    """Metric space of ``points`` under the distance induced by ``norm``."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.shape[1] != norm.dim:
        raise DimensionMismatch(f"points have dimension {P.shape[1]}, norm has {norm.dim}")
    diff = P[:, None, :] - P[None, :, :]
    d = norm.evaluate_many(diff.reshape(-1, norm.dim)).reshape(P.shape[0], P.shape[0])
    d = 0.5 * (d + d.T)
    np.fill_diagonal(d, 0.0)
    return validate_metric(d, base_index, labels)
