"""Finite-dimensional normed spaces used as Lipschitz targets.

Polyhedral norms are stored by their dual functionals: ``norm(x) = max_g
|<g, x>|``.  This makes every Lipschitz or ball constraint in the LPs a plain
linear inequality, and the isometric embedding into ``l_inf^k`` is the matrix
of functionals itself.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np

from .errors import DimensionMismatch, InvalidNorm

MAX_LINF_VERTEX_DIM = 16


@dataclass(frozen=True, eq=False)
class PolyhedralNorm:
    """``x -> max_g |<g, x>|`` over a finite spanning family of functionals."""

    functionals: np.ndarray
    unit_ball_vertices: Optional[np.ndarray] = None
    name: str = "polyhedral"

    def __post_init__(self):
        G = np.atleast_2d(np.array(self.functionals, dtype=float))
        if G.size == 0 or not np.all(np.isfinite(G)):
            raise InvalidNorm("functionals must be a nonempty finite matrix")
        if np.linalg.matrix_rank(G) < G.shape[1]:
            raise InvalidNorm(
                f"functionals have rank {np.linalg.matrix_rank(G)} < dim {G.shape[1]}; not a norm"
            )
        G.setflags(write=False)
        object.__setattr__(self, "functionals", G)
        # both signs folded in, so norm(x) = max over rows of <g, x>
        signed = np.vstack([G, -G])
        signed.setflags(write=False)
        object.__setattr__(self, "signed_functionals", signed)
        if self.unit_ball_vertices is not None:
            V = np.atleast_2d(np.array(self.unit_ball_vertices, dtype=float))
            if V.shape[1] != G.shape[1]:
                raise InvalidNorm("vertex dimension differs from functional dimension")
            vals = self.evaluate_many(V)
            if np.any(np.abs(vals - 1.0) > 1e-9):
                raise InvalidNorm("unit_ball_vertices must all have norm 1")
            V.setflags(write=False)
            object.__setattr__(self, "unit_ball_vertices", V)

    @property
    def dim(self) -> int:
        return self.functionals.shape[1]

    @property
    def kind(self) -> str:
        return "polyhedral"

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionMismatch(f"vector of shape {x.shape} for a {self.dim}-dim norm")
        return float(np.max(np.abs(self.functionals @ x)))

    def evaluate_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise DimensionMismatch(f"array of shape {X.shape} for a {self.dim}-dim norm")
        return np.max(np.abs(X @ self.functionals.T), axis=1)

    def to_json(self) -> dict:
        out = {"kind": "polyhedral", "dim": self.dim, "functionals": self.functionals.tolist()}
        if self.unit_ball_vertices is not None:
            out["vertices"] = self.unit_ball_vertices.tolist()
        return out

    def __repr__(self):
        return f"PolyhedralNorm({self.name}, dim={self.dim}, k={self.functionals.shape[0]})"


@dataclass(frozen=True, eq=False)
class EuclideanNorm:
    dim: int
    name: str = "l2"

    def __post_init__(self):
        if int(self.dim) < 1:
            raise InvalidNorm("dim must be >= 1")

    @property
    def kind(self) -> str:
        return "euclidean"

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionMismatch(f"vector of shape {x.shape} for a {self.dim}-dim norm")
        return float(np.linalg.norm(x))

    def evaluate_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise DimensionMismatch(f"array of shape {X.shape} for a {self.dim}-dim norm")
        return np.linalg.norm(X, axis=1)

    def to_json(self) -> dict:
        return {"kind": "euclidean", "dim": self.dim}

    def __repr__(self):
        return f"EuclideanNorm(dim={self.dim})"


NormedSpace = Union[PolyhedralNorm, EuclideanNorm]


def linf(n: int) -> PolyhedralNorm:
    V = None
    if n <= MAX_LINF_VERTEX_DIM:
        V = np.array(list(itertools.product((1.0, -1.0), repeat=n)))
    return PolyhedralNorm(np.eye(n), V, name=f"linf:{n}")


def l1(n: int) -> PolyhedralNorm:
    """l1^n via its 2^(n-1) sign functionals (one per +-pair)."""
    if n > MAX_LINF_VERTEX_DIM + 1:
        raise InvalidNorm(f"l1^{n} needs 2^{n - 1} functionals; dimension capped")
    signs = np.array([(1.0,) + s for s in itertools.product((1.0, -1.0), repeat=n - 1)])
    V = np.vstack([np.eye(n), -np.eye(n)])
    return PolyhedralNorm(signs, V, name=f"l1:{n}")


def l2(n: int) -> EuclideanNorm:
    return EuclideanNorm(n)


def scalar_norm() -> PolyhedralNorm:
    """The real line as a 1-dim polyhedral norm."""
    return PolyhedralNorm(np.array([[1.0]]), np.array([[1.0], [-1.0]]), name="scalar")


def norm_eval(X: NormedSpace, x) -> float:
    return X(x)


def parse_norm(spec) -> NormedSpace:
    """Build a norm from ``"linf:3"``-style shorthand or its JSON object form."""
    if isinstance(spec, (PolyhedralNorm, EuclideanNorm)):
        return spec
    if isinstance(spec, str):
        try:
            kind, dim = spec.split(":")
            dim = int(dim)
        except ValueError:
            raise InvalidNorm(f"bad norm shorthand {spec!r}; expected <kind>:<dim>") from None
        return _from_kind(kind, dim)
    if isinstance(spec, dict):
        kind = spec.get("kind")
        if kind in ("linf", "l1", "l2"):
            return _from_kind(kind, int(spec["dim"]))
        if kind == "euclidean":
            return EuclideanNorm(int(spec["dim"]))
        if kind == "polyhedral":
            G = np.array(spec["functionals"], dtype=float)
            if "dim" in spec and G.shape[1] != int(spec["dim"]):
                raise DimensionMismatch("functionals disagree with declared dim")
            return PolyhedralNorm(G, spec.get("vertices"))
        raise InvalidNorm(f"unknown norm kind {kind!r}")
    raise InvalidNorm(f"cannot interpret norm {spec!r}")


def _from_kind(kind: str, dim: int) -> NormedSpace:
    if dim < 1:
        raise InvalidNorm("dim must be >= 1")
    if kind == "linf":
        return linf(dim)
    if kind == "l1":
        return l1(dim)
    if kind == "l2":
        return l2(dim)
    raise InvalidNorm(f"unknown norm kind {kind!r}")


def linf_embedding(X: PolyhedralNorm) -> np.ndarray:
    """Linear isometry of ``X`` into ``l_inf^k``: one row per functional."""
    if not isinstance(X, PolyhedralNorm):
        raise InvalidNorm("only polyhedral norms embed isometrically into a finite l_inf")
    return np.array(X.functionals)


class OperatorNorm(NamedTuple):
    value: float
    certified: bool


def operator_norm(A, source: NormedSpace, target: NormedSpace, samples: int = 20000, seed: int = 0) -> OperatorNorm:
    """Norm of the linear map ``A: source -> target``.

    Exact when the source unit ball is known by its vertices, or when the
    source is Euclidean and the target is polyhedral or Euclidean. Otherwise
    a sampled lower bound is returned with ``certified=False``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape != (target.dim, source.dim):
        raise DimensionMismatch(f"matrix {A.shape} for map {source.dim} -> {target.dim}")
    if isinstance(source, PolyhedralNorm) and source.unit_ball_vertices is not None:
        return OperatorNorm(float(np.max(target.evaluate_many(source.unit_ball_vertices @ A.T))), True)
    if isinstance(source, EuclideanNorm):
        if isinstance(target, EuclideanNorm):
            return OperatorNorm(float(np.linalg.norm(A, 2)), True)
        # |<h, A x>| <= ||A^T h||_2 with equality at x = A^T h / ||A^T h||
        return OperatorNorm(float(np.max(np.linalg.norm(target.functionals @ A, axis=1))), True)
    rng = np.random.default_rng(seed)
    X = np.vstack([np.eye(source.dim), rng.standard_normal((samples, source.dim))])
    nx = source.evaluate_many(X)
    best = np.max(target.evaluate_many(X @ A.T) / nx)
    return OperatorNorm(float(best), False)


def distortion(A, source: NormedSpace, target: NormedSpace) -> OperatorNorm:
    """``||A|| * ||A^-1||`` for an invertible linear map."""
    from .errors import SingularMap

    A = np.asarray(A, dtype=float)
    if A.shape[0] != A.shape[1] or abs(np.linalg.det(A)) < 1e-14:
        raise SingularMap("map is not invertible")
    fwd = operator_norm(A, source, target)
    inv = operator_norm(np.linalg.inv(A), target, source)
    return OperatorNorm(fwd.value * inv.value, fwd.certified and inv.certified)
