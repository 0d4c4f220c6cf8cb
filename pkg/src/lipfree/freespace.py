"""The Lipschitz-free space over a finite pointed metric space.

An element ``mu = sum_i a_i delta_{x_i}`` is stored by its coefficients on
the non-base points (``delta`` of the base point is zero). Its norm is
computed two independent ways:

* primal: cheapest transshipment ``min sum c_ij d(i, j)`` over flows ``c >= 0``
  whose net outflow at each non-base node ``k`` is ``a_k`` (the base node is
  free to absorb or supply mass);
* dual: ``max sum a_k f(x_k)`` over 1-Lipschitz ``f`` with ``f(0) = 0``.

LP duality makes the two agree, which the test-suite uses as the
correctness certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange, NonPolyhedralCodomain, SolverFailure
from .lipschitz import LipschitzMap
from .metric import FiniteMetricSpace
from .norms import PolyhedralNorm
from .solver.lp import LinearProgram, solve_lp


@dataclass(frozen=True, eq=False)
class FreeVector:
    space: FiniteMetricSpace
    coeffs: np.ndarray

    def __post_init__(self):
        a = np.array(self.coeffs, dtype=float).ravel()
        if a.size != self.space.n - 1:
            raise DimensionMismatch(f"need {self.space.n - 1} coefficients, got {a.size}")
        a.setflags(write=False)
        object.__setattr__(self, "coeffs", a)

    @classmethod
    def from_labels(cls, space: FiniteMetricSpace, coeffs: Mapping[str, float]) -> "FreeVector":
        full = np.zeros(space.n)
        for label, v in coeffs.items():
            full[space.index_of(label)] += float(v)
        return cls(space, full[space.non_base()])

    def full(self) -> np.ndarray:
        """Coefficients over all points, with 0 at the base."""
        out = np.zeros(self.space.n)
        out[self.space.non_base()] = self.coeffs
        return out

    def pair(self, f: LipschitzMap) -> float:
        """``<f, mu> = sum_i a_i (f(x_i) - f(0))``."""
        if not f.is_scalar:
            raise TypeError("pairing is with real-valued maps")
        g = f.values - f.values[self.space.base_index]
        return float(self.full() @ g)

    def _check(self, other):
        if other.space is not self.space and not other.space.same_as(self.space):
            raise ValueError("free vectors live over different spaces")

    def __add__(self, other):
        self._check(other)
        return FreeVector(self.space, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return FreeVector(self.space, self.coeffs - other.coeffs)

    def __mul__(self, lam):
        return FreeVector(self.space, float(lam) * self.coeffs)

    __rmul__ = __mul__

    def __neg__(self):
        return FreeVector(self.space, -self.coeffs)


def delta(space: FiniteMetricSpace, point_index: int) -> FreeVector:
    if not 0 <= point_index < space.n:
        raise IndexOutOfRange(f"point {point_index} not in [0, {space.n})")
    full = np.zeros(space.n)
    full[point_index] = 1.0
    full[space.base_index] = 0.0
    return FreeVector(space, full[space.non_base()])


def zero(space: FiniteMetricSpace) -> FreeVector:
    return FreeVector(space, np.zeros(space.n - 1))


def _transshipment_lp(mu: FreeVector) -> LinearProgram:
    M = mu.space
    n = M.n
    i, j = np.nonzero(~np.eye(n, dtype=bool))
    cost = M.dist[i, j]
    rows = M.non_base()
    A = np.zeros((len(rows), i.size))
    for r, k in enumerate(rows):
        A[r, i == k] = 1.0
        A[r, j == k] = -1.0
    return LinearProgram(cost, A, mu.coeffs, ["="] * len(rows))


def kr_norm_primal(mu: FreeVector, with_flow: bool = False):
    """Kantorovich-Rubinstein norm by min-cost transshipment.

    With ``with_flow=True`` also returns the optimal flow as an ``n x n``
    matrix.
    """
    if mu.space.n == 1 or not np.any(mu.coeffs):
        val = 0.0
        return (val, np.zeros((mu.space.n, mu.space.n))) if with_flow else val
    out = solve_lp(_transshipment_lp(mu))
    if not out.optimal:
        raise SolverFailure(f"transshipment LP ended {out.status}")
    if with_flow:
        n = mu.space.n
        i, j = np.nonzero(~np.eye(n, dtype=bool))
        flow = np.zeros((n, n))
        flow[i, j] = out.x
        return out.value, flow
    return out.value


def kr_norm_dual(mu: FreeVector) -> tuple[float, LipschitzMap]:
    """Kantorovich-Rubinstein norm by maximising against 1-Lipschitz maps.

    Returns the optimal value and one optimal witness ``f`` (``f(0) = 0``).
    """
    M = mu.space
    n = M.n
    nb = M.non_base()
    if n == 1:
        return 0.0, LipschitzMap(M, None, np.zeros(1))
    pos = {k: r for r, k in enumerate(nb)}
    rows, rhs = [], []
    for p in range(n):
        for q in range(n):
            if p == q:
                continue
            row = np.zeros(len(nb))
            if p in pos:
                row[pos[p]] += 1.0
            if q in pos:
                row[pos[q]] -= 1.0
            rows.append(row)
            rhs.append(M.dist[p, q])
    lp = LinearProgram(mu.coeffs, np.array(rows), np.array(rhs), ["<="] * len(rows),
                       bounds=[(None, None)] * len(nb), maximize=True)
    out = solve_lp(lp)
    if not out.optimal:
        raise SolverFailure(f"dual KR LP ended {out.status}")
    f = np.zeros(n)
    f[nb] = out.x
    return out.value, LipschitzMap(M, None, f)


def kr_norm(mu: FreeVector) -> float:
    return kr_norm_primal(mu)


def molecule(space: FiniteMetricSpace, x: int, y: int) -> FreeVector:
    """``(delta_x - delta_y) / d(x, y)``, a unit vector of the free space."""
    return (delta(space, x) - delta(space, y)) * (1.0 / space.dist[x, y])


def _scalar_operator_norm_lp(h: np.ndarray, space: FiniteMetricSpace) -> float:
    """``sup { <h, mu> : ||mu||_KR <= 1 }`` as an LP over transport flows."""
    n = space.n
    i, j = np.nonzero(~np.eye(n, dtype=bool))
    gain = h[i] - h[j]
    lp = LinearProgram(gain, space.dist[i, j][None, :], [1.0], ["<="], maximize=True)
    out = solve_lp(lp)
    if not out.optimal:
        raise SolverFailure(f"operator-norm LP ended {out.status}")
    return out.value


def linearization_norm(f: LipschitzMap, method: str = "lp") -> float:
    """Operator norm of the linearisation ``T_f: F(N) -> X``, ``T_f(delta_m) = f(m)``.

    For a polyhedral target ``||T_f|| = max_g ||g o T_f||`` over the dual
    functionals; each scalar norm is taken over the free-space unit ball,
    either by an LP over unit-cost transport plans (``"lp"``) or over its
    extreme points, the molecules (``"molecules"``). ``f`` is
    base-normalised first.
    """
    if f.is_scalar:
        G = np.array([[1.0], [-1.0]])
        vals = f.values[:, None]
    elif isinstance(f.codomain, PolyhedralNorm):
        G = f.codomain.signed_functionals
        vals = f.values
    else:
        raise NonPolyhedralCodomain("linearization_norm needs a polyhedral codomain")
    N = f.domain
    if N.n < 2:
        return 0.0
    vals = vals - vals[N.base_index]
    best = 0.0
    if method == "lp":
        for g in G:
            best = max(best, _scalar_operator_norm_lp(vals @ g, N))
    elif method == "molecules":
        mols = [molecule(N, x, y) for x in range(N.n) for y in range(N.n) if x != y]
        for g in G:
            h = LipschitzMap(N, None, vals @ g)
            best = max(best, max(m.pair(h) for m in mols))
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(best)

