"""The majorization lattice on probability vectors.

Distributions are handled through their descending cumulative sums
``c_k = sum of the k largest entries``. Join and meet of finitely many
distributions act pointwise on these sums; the meet over a polytope is the
pointwise minimum of ``c_k`` over the polytope, one linear program per k.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import InvalidState, NoFeasibleSolution, UnboundedProgram
from .lp import LinearProgram, LPStatus, solve

LATTICE_TOL = 1e-10
SUM_TOL = 1e-9


def pad(p, d: int) -> np.ndarray:
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.size > d:
        raise ValueError("cannot pad to a shorter length")
    return np.concatenate([p, np.zeros(d - p.size)])


def as_sorted(p, d: int | None = None) -> np.ndarray:
    """Validate a distribution and return it sorted descending (zero-padded to ``d``)."""
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.size and p.min() < -1e-12:
        raise InvalidState(f"negative entry {p.min():.3e}")
    if abs(p.sum() - 1.0) > SUM_TOL:
        raise InvalidState(f"entries sum to {p.sum()!r}")
    p = np.clip(p, 0.0, None)
    if d is not None:
        p = pad(p, d)
    # stable sort keeps ties in original index order
    return p[np.argsort(-p, kind="stable")]


def cumulative(p) -> np.ndarray:
    return np.cumsum(as_sorted(p))


def from_cumulative(c) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    return np.diff(np.concatenate([[0.0], c]))


def _common(*ps) -> list[np.ndarray]:
    d = max(np.asarray(p).size for p in ps)
    return [as_sorted(p, d) for p in ps]


def majorizes(a, b, tol: float = LATTICE_TOL) -> bool:
    """True iff every prefix sum of sorted ``a`` dominates that of ``b``."""
    a, b = _common(a, b)
    return bool(np.all(np.cumsum(a) >= np.cumsum(b) - tol))


def least_concave_majorant(c) -> np.ndarray:
    """Smallest concave sequence through (0, 0) lying above (k, c_k), k = 1..d."""
    y = np.concatenate([[0.0], np.asarray(c, dtype=float)])
    hull: list[int] = []
    for i in range(y.size):
        while len(hull) >= 2:
            i0, i1 = hull[-2], hull[-1]
            # drop i1 if it lies on or below the chord i0 -> i
            if (y[i1] - y[i0]) * (i - i0) <= (y[i] - y[i0]) * (i1 - i0):
                hull.pop()
            else:
                break
        hull.append(i)
    out = np.interp(np.arange(y.size), hull, y[hull])
    return out[1:]


def join(a, b) -> np.ndarray:
    """Least upper bound: concave majorant of the pointwise max of cumulative sums."""
    a, b = _common(a, b)
    c = np.maximum(np.cumsum(a), np.cumsum(b))
    return from_cumulative(least_concave_majorant(c))


def join_many(ps: Sequence) -> np.ndarray:
    out = ps[0]
    for p in ps[1:]:
        out = join(out, p)
    return as_sorted(out)


def meet_explicit(ps: Sequence) -> np.ndarray:
    """Greatest lower bound of finitely many distributions."""
    if len(ps) == 0:
        raise ValueError("meet of an empty family")
    ps = _common(*ps)
    c = np.min([np.cumsum(p) for p in ps], axis=0)
    return from_cumulative(c)


class ConvexHullPolytope:
    """Convex hull of explicit distributions, as ``p = Q @ w`` with ``w`` in the simplex."""

    def __init__(self, points: Sequence):
        pts = [np.asarray(p, dtype=float).reshape(-1) for p in points]
        d = max(p.size for p in pts)
        self.q = np.column_stack([pad(p, d) for p in pts])
        self.d = d

    def lp_parts(self):
        d, m = self.q.shape
        a_eq = np.zeros((d + 1, d + m))
        a_eq[:d, :d] = np.eye(d)
        a_eq[:d, d:] = -self.q
        a_eq[d, d:] = 1.0
        b_eq = np.zeros(d + 1)
        b_eq[d] = 1.0
        return m, a_eq, b_eq, np.zeros((0, d + m)), np.zeros(0), np.zeros(0), np.zeros(m), np.full(m, np.inf)


def topk_program(x, k: int) -> LinearProgram:
    """minimize k t + sum(s)  s.t.  s_i >= p_i - t, s >= 0, t >= 0, p in x.

    Variables are laid out as [p (d), aux, t, s (d)]. Restricting t >= 0 loses
    nothing because p >= 0.
    """
    d = x.d
    n_aux, a_eq, b_eq, a_in, lo, hi, aux_lo, aux_hi = x.lp_parts()
    nv = d + n_aux
    n = nv + 1 + d
    c = np.zeros(n)
    c[nv] = k
    c[nv + 1:] = 1.0

    def widen(a):
        out = np.zeros((a.shape[0], n))
        out[:, :nv] = a
        return out

    epi = np.zeros((d, n))
    epi[:, :d] = -np.eye(d)
    epi[:, nv] = 1.0
    epi[:, nv + 1:] = np.eye(d)
    a_ineq = np.vstack([widen(a_in), epi])
    ineq_lo = np.concatenate([lo, np.zeros(d)])
    ineq_hi = np.concatenate([hi, np.full(d, np.inf)])
    lower = np.concatenate([np.zeros(d), aux_lo, [0.0], np.zeros(d)])
    upper = np.concatenate([np.full(d, np.inf), aux_hi, [np.inf], np.full(d, np.inf)])
    return LinearProgram(c, widen(a_eq), b_eq, a_ineq, ineq_lo, ineq_hi, lower, upper)


def min_topk_sum(x, k: int) -> float:
    """Minimum over the polytope of the sum of the k largest entries."""
    if not 1 <= k <= x.d:
        raise ValueError(f"k={k} outside 1..{x.d}")
    sol = solve(topk_program(x, k))
    if sol.status is LPStatus.INFEASIBLE:
        raise NoFeasibleSolution("constraint polytope is empty")
    if sol.status is LPStatus.UNBOUNDED:
        raise UnboundedProgram("top-k program unbounded; polytope is malformed")
    return sol.objective


def _point_polytope(x, tol: float = 1e-9) -> np.ndarray | None:
    """If the pinned rows of a ConstraintSet determine p uniquely, return it.

    Raises NoFeasibleSolution when that unique point violates the rest.
    """
    if not hasattr(x, "B"):
        return None
    pinned = x.upper - x.lower <= 0.0
    b_eq = x.B[pinned]
    if b_eq.shape[0] < x.d or np.linalg.matrix_rank(b_eq) < x.d:
        return None
    rhs = x.lower[pinned]
    # character columns are orthogonal, so the normal equations are well
    # conditioned and keep exact +/-1 data exact; one refinement step follows
    gram = b_eq.T @ b_eq
    p = np.linalg.solve(gram, b_eq.T @ rhs)
    p += np.linalg.solve(gram, b_eq.T @ (rhs - b_eq @ p))
    if np.max(np.abs(b_eq @ p - rhs)) > tol or not x.contains(p, tol):
        raise NoFeasibleSolution("pinned expectations admit no distribution")
    return np.clip(p, 0.0, None)


def meet_over_polytope(x, presolve: bool = True) -> np.ndarray:
    """Majorization meet of every distribution in ``x``.

    ``c_k`` is obtained from :func:`min_topk_sum` for k < d; ``c_d = 1``
    because every supported polytope lies in the probability simplex. When
    the equality rows alone pin a single point, that point is returned
    sorted (``presolve=False`` forces the LP route).
    """
    d = x.d
    if presolve:
        p = _point_polytope(x)
        if p is not None:
            return as_sorted(p / p.sum())
    c = np.empty(d)
    for k in range(1, d):
        c[k - 1] = min_topk_sum(x, k)
    c[d - 1] = 1.0
    c = np.minimum(np.maximum.accumulate(c), 1.0)
    lam = np.clip(from_cumulative(c), 0.0, None)
    return lam[np.argsort(-lam, kind="stable")] / lam.sum()
