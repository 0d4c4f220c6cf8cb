"""Dense two-phase revised simplex with infeasibility certificates.

Problems in this package have at most a few hundred variables, so the basis
is refactorised from scratch every iteration: slower than product-form
updates, but numerically steady and fully deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from ..errors import NumericalBreakdown
from ..tolerances import FEAS_TOL

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_SENSES = ("<=", "=", ">=")


@dataclass
class LinearProgram:
    """``min (or max) c.x  s.t.  A x (<=|=|>=) b,  lo <= x <= hi``.

    ``bounds`` defaults to ``x >= 0``; use ``(None, None)`` for a free
    variable.
    """

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    senses: Sequence[str]
    bounds: Optional[Sequence[tuple]] = None
    maximize: bool = False

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        n = self.c.size
        self.A = np.asarray(self.A, dtype=float).reshape(-1, n)
        self.b = np.asarray(self.b, dtype=float).ravel()
        m = self.A.shape[0]
        if self.b.size != m:
            raise ValueError(f"b has {self.b.size} entries for {m} rows")
        self.senses = tuple(self.senses)
        if len(self.senses) != m or any(s not in _SENSES for s in self.senses):
            raise ValueError("need one sense in {'<=', '=', '>='} per row")
        if self.bounds is None:
            self.bounds = [(0.0, None)] * n
        if len(self.bounds) != n:
            raise ValueError("need one (lo, hi) pair per variable")
        lo = np.array([-np.inf if l is None else float(l) for l, _ in self.bounds])
        hi = np.array([np.inf if h is None else float(h) for _, h in self.bounds])
        if np.any(lo > hi):
            raise ValueError("lower bound above upper bound")
        self.lo, self.hi = lo, hi
        for arr in (self.c, self.A, self.b):
            if not np.all(np.isfinite(arr)):
                raise ValueError("LP coefficients must be finite")

    @property
    def shape(self):
        return self.A.shape


@dataclass
class LPOutcome:
    status: str
    x: Optional[np.ndarray] = None
    value: Optional[float] = None
    farkas: Optional[np.ndarray] = None
    residual: float = 0.0
    iterations: int = 0
    bland_engaged: bool = False
    pivots: list = field(default_factory=list, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def farkas_value(lp: LinearProgram, lam) -> float:
    """Evaluate an infeasibility certificate for ``lp``; negative means proven.

    ``lam`` holds one multiplier per row (``>= 0`` on ``<=`` rows, ``<= 0`` on
    ``>=`` rows, free on ``=`` rows).  Every feasible ``x`` satisfies
    ``(A^T lam).x <= b.lam``, so ``b.lam - min_box (A^T lam).x < 0`` rules
    feasibility out.  Sign-violating multipliers give ``+inf``.
    """
    lam = np.asarray(lam, dtype=float)
    for s, v in zip(lp.senses, lam):
        if (s == "<=" and v < -1e-12) or (s == ">=" and v > 1e-12):
            return np.inf
    r = lp.A.T @ lam
    scale = max(1.0, float(np.max(np.abs(lam))) if lam.size else 1.0)
    box_min = 0.0
    for rj, lo, hi in zip(r, lp.lo, lp.hi):
        if abs(rj) <= 1e-12 * scale:
            continue
        bound = lo if rj > 0 else hi
        if not np.isfinite(bound):
            return np.inf
        box_min += rj * bound
    return float(lp.b @ lam - box_min)


def primal_residual(lp: LinearProgram, x) -> float:
    """Largest violation of any row or bound at ``x``."""
    ax = lp.A @ x
    viol = [0.0]
    for s, lhs, rhs in zip(lp.senses, ax, lp.b):
        if s == "<=":
            viol.append(lhs - rhs)
        elif s == ">=":
            viol.append(rhs - lhs)
        else:
            viol.append(abs(lhs - rhs))
    viol.append(float(np.max(lp.lo - x, initial=0.0)))
    viol.append(float(np.max(x - lp.hi, initial=0.0)))
    return float(max(viol))


class _StandardForm:
    """``min c.z  s.t.  A z = b, z >= 0, b >= 0`` plus the map back to ``x``."""

    def __init__(self, lp: LinearProgram):
        m, n = lp.A.shape
        cols = []  # (var index, coefficient) generating x = shift + T z
        shift = np.zeros(n)
        ub_rows = []
        for j in range(n):
            lo, hi = lp.lo[j], lp.hi[j]
            if np.isfinite(lo):
                shift[j] = lo
                cols.append((j, 1.0))
                if np.isfinite(hi):
                    ub_rows.append((len(cols) - 1, hi - lo))
            elif np.isfinite(hi):
                shift[j] = hi
                cols.append((j, -1.0))
            else:
                cols.append((j, 1.0))
                cols.append((j, -1.0))
        T = np.zeros((n, len(cols)))
        for k, (j, s) in enumerate(cols):
            T[j, k] = s
        n_struct = len(cols)
        n_slack = sum(1 for s in lp.senses if s != "=") + len(ub_rows)
        rows = m + len(ub_rows)
        A = np.zeros((rows, n_struct + n_slack))
        b = np.zeros(rows)
        A[:m, :n_struct] = lp.A @ T
        b[:m] = lp.b - lp.A @ shift
        slack_of_row = [-1] * rows
        k = n_struct
        for i, s in enumerate(lp.senses):
            if s != "=":
                A[i, k] = 1.0 if s == "<=" else -1.0
                slack_of_row[i] = k
                k += 1
        for r, (col, width) in enumerate(ub_rows):
            A[m + r, col] = 1.0
            A[m + r, k] = 1.0
            b[m + r] = width
            slack_of_row[m + r] = k
            k += 1
        sign = np.where(b < 0, -1.0, 1.0)
        A *= sign[:, None]
        b *= sign
        c = np.zeros(A.shape[1])
        c[:n_struct] = T.T @ (-lp.c if lp.maximize else lp.c)
        self.A, self.b, self.c = A, b, c
        self.T, self.shift, self.n_struct = T, shift, n_struct
        self.sign = sign
        self.m_orig = m
        self.slack_of_row = slack_of_row

    def to_x(self, z):
        return self.shift + self.T @ z[: self.n_struct]


class _Simplex:
    def __init__(self, A, b, max_iter):
        self.A = A
        self.b = b
        self.m, self.n = A.shape
        self.max_iter = max_iter
        self.degenerate_run = 0
        self.bland = False
        self.iterations = 0
        self.pivots = []

    def solve(self, basis, c, allowed):
        """Run simplex from ``basis`` minimising ``c``; ``allowed`` masks entering columns."""
        bland_after = 3 * (self.m + self.n)
        while True:
            self.iterations += 1
            if self.iterations > self.max_iter:
                raise NumericalBreakdown(f"simplex exceeded {self.max_iter} iterations")
            B = self.A[:, basis]
            try:
                lu = scipy.linalg.lu_factor(B, check_finite=False)
            except (ValueError, np.linalg.LinAlgError) as exc:
                raise NumericalBreakdown(f"basis factorisation failed: {exc}") from exc
            xB = scipy.linalg.lu_solve(lu, self.b, check_finite=False)
            y = scipy.linalg.lu_solve(lu, c[basis], trans=1, check_finite=False)
            red = c - self.A.T @ y
            red[basis] = 0.0
            scale = 1.0 + np.max(np.abs(c))
            cand = np.flatnonzero(allowed & (red < -1e-10 * scale))
            if cand.size == 0:
                return basis, xB, y, OPTIMAL
            if self.bland:
                q = int(cand[0])
            else:
                q = int(cand[np.argmin(red[cand])])
            d = scipy.linalg.lu_solve(lu, self.A[:, q], check_finite=False)
            pos = np.flatnonzero(d > 1e-9)
            if pos.size == 0:
                return basis, xB, y, UNBOUNDED
            ratios = np.maximum(xB[pos], 0.0) / d[pos]
            tmin = ratios.min()
            ties = pos[ratios <= tmin + 1e-12 * (1.0 + tmin)]
            # smallest basic variable index among ties (Bland-compatible)
            r = int(ties[np.argmin([basis[i] for i in ties])])
            self.pivots.append((q, basis[r]))
            if tmin <= 1e-12:
                self.degenerate_run += 1
                if self.degenerate_run >= bland_after:
                    self.bland = True
            else:
                self.degenerate_run = 0
            basis = basis.copy()
            basis[r] = q


def solve_lp(lp: LinearProgram, max_iter: Optional[int] = None, feas_tol: float = FEAS_TOL) -> LPOutcome:
    """Solve ``lp``; deterministic for identical input.

    Returns an :class:`LPOutcome`. On infeasibility ``farkas`` holds row
    multipliers checkable with :func:`farkas_value`. Raises
    :class:`NumericalBreakdown` rather than return an inaccurate answer.
    """
    sf = _StandardForm(lp)
    A, b = sf.A, sf.b
    m, n = A.shape
    if max_iter is None:
        max_iter = 50 * (m + n) + 1000
    if m == 0:
        # only bounds: each variable sits at its cheapest bound
        x = np.empty(lp.c.size)
        sgn = -lp.c if lp.maximize else lp.c
        for j in range(lp.c.size):
            if sgn[j] > 0:
                x[j] = lp.lo[j]
            elif sgn[j] < 0:
                x[j] = lp.hi[j]
            else:
                x[j] = lp.lo[j] if np.isfinite(lp.lo[j]) else (lp.hi[j] if np.isfinite(lp.hi[j]) else 0.0)
        if not np.all(np.isfinite(x)):
            return LPOutcome(UNBOUNDED)
        return LPOutcome(OPTIMAL, x, float(lp.c @ x))

    # phase 1: slacks with +1 coefficient start basic, artificials elsewhere
    basis = np.empty(m, dtype=int)
    art_rows = []
    for i in range(m):
        k = sf.slack_of_row[i]
        if k >= 0 and A[i, k] == 1.0:
            basis[i] = k
        else:
            art_rows.append(i)
    n_art = len(art_rows)
    Afull = np.hstack([A, np.zeros((m, n_art))])
    for a, i in enumerate(art_rows):
        Afull[i, n + a] = 1.0
        basis[i] = n + a
    c1 = np.zeros(n + n_art)
    c1[n:] = 1.0
    sx = _Simplex(Afull, b, max_iter)
    allowed = np.ones(n + n_art, dtype=bool)
    basis, xB, y, status = sx.solve(basis, c1, allowed)
    if status != OPTIMAL:
        raise NumericalBreakdown("phase 1 reported unbounded")
    infeas = float(c1[basis] @ xB)
    if infeas > feas_tol * max(1.0, float(np.max(np.abs(b)))):
        lam = np.zeros(lp.A.shape[0])
        for i in range(sf.m_orig):
            lam[i] = -sf.sign[i] * y[i]
        big = np.max(np.abs(lam)) if lam.size else 0.0
        if big > 0:
            lam = lam / big
        return LPOutcome(INFEASIBLE, farkas=lam, iterations=sx.iterations,
                         bland_engaged=sx.bland, pivots=sx.pivots)

    # drive zero-level artificials out; drop rows that turn out redundant
    keep = np.ones(m, dtype=bool)
    for r in range(m):
        if basis[r] < n:
            continue
        B = Afull[:, basis]
        row = np.linalg.solve(B.T, np.eye(m)[r]) @ A
        row[basis[basis < n]] = 0.0
        j = int(np.argmax(np.abs(row)))
        if abs(row[j]) > 1e-9:
            basis[r] = j
        else:
            keep[r] = False
    A2, b2 = A[keep], b[keep]
    basis2 = basis[keep]
    if np.any(basis2 >= n):
        raise NumericalBreakdown("artificial variable left in basis")
    sx2 = _Simplex(A2, b2, max_iter)
    sx2.iterations = sx.iterations
    sx2.pivots = sx.pivots
    basis2, xB, y, status = sx2.solve(basis2, sf.c, np.ones(n, dtype=bool))
    if status == UNBOUNDED:
        return LPOutcome(UNBOUNDED, iterations=sx2.iterations, bland_engaged=sx.bland or sx2.bland,
                         pivots=sx2.pivots)
    z = np.zeros(n)
    z[basis2] = np.maximum(xB, 0.0)
    x = sf.to_x(z)
    res = primal_residual(lp, x)
    scale = max(1.0, float(np.max(np.abs(lp.b), initial=0.0)),
                float(np.max(np.abs(lp.A), initial=0.0)) * float(np.max(np.abs(x), initial=0.0)))
    if res > feas_tol * scale:
        raise NumericalBreakdown(f"primal residual {res:.3e} exceeds tolerance")
    return LPOutcome(OPTIMAL, x, float(lp.c @ x), residual=res, iterations=sx2.iterations,
                     bland_engaged=sx.bland or sx2.bland, pivots=sx2.pivots)
