"""Dense two-phase primal simplex for the small programs built by the meet engine.

Programs are stated as::

    minimize    c @ x
    subject to  a_eq @ x == b_eq
                ineq_lower <= a_ineq @ x <= ineq_upper
                lower <= x <= upper

Infinite entries in any bound vector mean "no bound". Internally every
program is rewritten to ``A y == b, y >= 0`` with ``b >= 0`` and solved on a
dense tableau. Pivoting uses Dantzig's rule until a run of degenerate pivots
is seen, then switches to Bland's rule, which cannot cycle.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import NumericalBreakdown

FEAS_TOL = 1e-8
PIVOT_TOL = 1e-10
COST_TOL = 1e-9
DEGENERATE_RUN = 25


class LPStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class LinearProgram:
    c: np.ndarray
    a_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    a_ineq: np.ndarray | None = None
    ineq_lower: np.ndarray | None = None
    ineq_upper: np.ndarray | None = None
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        n = self.c.size
        if self.a_eq is None:
            self.a_eq = np.zeros((0, n))
            self.b_eq = np.zeros(0)
        self.a_eq = np.asarray(self.a_eq, dtype=float).reshape(-1, n)
        self.b_eq = np.asarray(self.b_eq, dtype=float).reshape(-1)
        if self.a_ineq is None:
            self.a_ineq = np.zeros((0, n))
        self.a_ineq = np.asarray(self.a_ineq, dtype=float).reshape(-1, n)
        m = self.a_ineq.shape[0]
        self.ineq_lower = _vec(self.ineq_lower, m, -np.inf)
        self.ineq_upper = _vec(self.ineq_upper, m, np.inf)
        self.lower = _vec(self.lower, n, 0.0)
        self.upper = _vec(self.upper, n, np.inf)
        if self.b_eq.size != self.a_eq.shape[0]:
            raise ValueError("b_eq length does not match a_eq rows")
        if np.any(np.isnan(self.lower)) or np.any(self.lower == np.inf):
            raise ValueError("invalid lower bound")
        if np.any(np.isnan(self.upper)) or np.any(self.upper == -np.inf):
            raise ValueError("invalid upper bound")

    @property
    def n(self) -> int:
        return self.c.size

    def residual(self, x: np.ndarray) -> float:
        """Largest constraint violation at ``x``."""
        viol = [0.0]
        if self.a_eq.size:
            viol.append(np.max(np.abs(self.a_eq @ x - self.b_eq)))
        if self.a_ineq.size:
            ax = self.a_ineq @ x
            viol.append(np.max(self.ineq_lower - ax))
            viol.append(np.max(ax - self.ineq_upper))
        viol.append(np.max(self.lower - x))
        viol.append(np.max(x - self.upper))
        return float(max(viol))


def _vec(v, size, default):
    if v is None:
        return np.full(size, default, dtype=float)
    out = np.asarray(v, dtype=float).reshape(-1)
    if out.size != size:
        raise ValueError(f"bound vector of length {out.size}, expected {size}")
    return out


@dataclass
class LPSolution:
    status: LPStatus
    x: np.ndarray | None
    objective: float
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LPStatus.OPTIMAL


class _StandardForm:
    """``A y = b, y >= 0, b >= 0`` plus the map back to the original variables."""

    def __init__(self, lp: LinearProgram):
        n = lp.n
        # x = offset + T @ y
        cols = []
        offset = np.zeros(n)
        for j in range(n):
            lo, hi = lp.lower[j], lp.upper[j]
            if np.isfinite(lo):
                offset[j] = lo
                cols.append((j, 1.0))
            elif np.isfinite(hi):
                offset[j] = hi
                cols.append((j, -1.0))
            else:
                cols.append((j, 1.0))
                cols.append((j, -1.0))
        ny = len(cols)
        t = np.zeros((n, ny))
        for k, (j, s) in enumerate(cols):
            t[j, k] = s
        self.t, self.offset = t, offset

        rows, rhs, kinds = [], [], []

        def add(a_row, b, kind):
            rows.append(a_row @ t)
            rhs.append(b - a_row @ offset)
            kinds.append(kind)

        for a_row, b in zip(lp.a_eq, lp.b_eq):
            add(a_row, b, 0)
        for a_row, lo, hi in zip(lp.a_ineq, lp.ineq_lower, lp.ineq_upper):
            if np.isfinite(lo) and np.isfinite(hi) and lo == hi:
                add(a_row, lo, 0)
                continue
            if np.isfinite(hi):
                add(a_row, hi, 1)
            if np.isfinite(lo):
                add(a_row, lo, -1)
        # two-sided original variable bounds become explicit rows
        for k, (j, s) in enumerate(cols):
            lo, hi = lp.lower[j], lp.upper[j]
            if np.isfinite(lo) and np.isfinite(hi):
                e = np.zeros(n)
                e[j] = 1.0
                add(e, hi, 1)

        m = len(rows)
        n_slack = sum(1 for k in kinds if k != 0)
        a = np.zeros((m, ny + n_slack))
        if m:
            a[:, :ny] = np.array(rows)
        b = np.array(rhs, dtype=float)
        slack_of_row = np.full(m, -1)
        s = ny
        for i, kind in enumerate(kinds):
            if kind != 0:
                a[i, s] = float(kind)
                slack_of_row[i] = s
                s += 1
        neg = b < 0
        a[neg] *= -1
        b[neg] *= -1
        self.a, self.b = a, b
        self.c = np.concatenate([t.T @ lp.c, np.zeros(n_slack)])
        self.const = float(lp.c @ offset)
        self.slack_of_row = slack_of_row
        self.ny = ny

    def to_original(self, y: np.ndarray) -> np.ndarray:
        return self.offset + self.t @ y[: self.ny]


class _Tableau:
    def __init__(self, a: np.ndarray, b: np.ndarray, basis: list[int], max_iter: int):
        m, n = a.shape
        self.t = np.zeros((m + 1, n + 1))
        self.t[:m, :n] = a
        self.t[:m, n] = b
        self.basis = list(basis)
        self.iterations = 0
        self.max_iter = max_iter

    @property
    def m(self) -> int:
        return self.t.shape[0] - 1

    def set_cost(self, c: np.ndarray):
        n = self.t.shape[1] - 1
        row = np.zeros(n + 1)
        row[:n] = c
        for i, j in enumerate(self.basis):
            if row[j] != 0.0:
                row -= row[j] * self.t[i]
        self.t[-1] = row

    def pivot(self, r: int, e: int):
        t = self.t
        t[r] /= t[r, e]
        col = t[:, e].copy()
        col[r] = 0.0
        t -= np.outer(col, t[r])
        t[:, e] = 0.0
        t[r, e] = 1.0
        self.basis[r] = e
        self.iterations += 1

    def run(self, allowed: np.ndarray) -> bool:
        """Iterate to optimality over ``allowed`` columns; False if unbounded."""
        t = self.t
        degenerate = 0
        bland = False
        while True:
            if self.iterations >= self.max_iter:
                raise NumericalBreakdown("simplex iteration cap reached", self.iterations)
            rc = t[-1, :-1]
            cand = np.nonzero(allowed & (rc < -COST_TOL))[0]
            if cand.size == 0:
                return True
            e = int(cand[0]) if bland else int(cand[np.argmin(rc[cand])])
            col = t[:-1, e]
            pos = np.nonzero(col > PIVOT_TOL)[0]
            if pos.size == 0:
                return False
            ratios = t[pos, -1] / col[pos]
            best = ratios.min()
            ties = pos[ratios <= best + 1e-12 * max(1.0, abs(best))]
            if bland:
                r = int(min(ties, key=lambda i: self.basis[i]))
            else:
                r = int(ties[np.argmax(col[ties])])
            if best <= 1e-12:
                degenerate += 1
                if degenerate > DEGENERATE_RUN:
                    bland = True
            else:
                degenerate = 0
            self.pivot(r, e)


def solve(lp: LinearProgram, max_iter: int | None = None) -> LPSolution:
    """Solve ``lp``; infeasibility and unboundedness are statuses, not errors.

    Raises:
        NumericalBreakdown: the iteration cap was hit, or the final point
            violates the constraints by more than round-off allows.
    """
    sf = _StandardForm(lp)
    a, b = sf.a, sf.b
    m, n = a.shape
    if max_iter is None:
        max_iter = 50 * (m + n) + 1000

    if m == 0:
        # only sign constraints on y: optimum at y = 0 unless some cost is negative
        if np.any(sf.c < -COST_TOL):
            return LPSolution(LPStatus.UNBOUNDED, None, -np.inf)
        x = sf.to_original(np.zeros(n))
        return LPSolution(LPStatus.OPTIMAL, x, float(lp.c @ x))

    # reuse +1 slacks as the starting basis; artificials elsewhere
    basis = []
    art_rows = []
    for i in range(m):
        s = sf.slack_of_row[i]
        if s >= 0 and a[i, s] > 0:
            basis.append(int(s))
        else:
            basis.append(-1)
            art_rows.append(i)
    n_art = len(art_rows)
    a1 = np.zeros((m, n + n_art))
    a1[:, :n] = a
    for k, i in enumerate(art_rows):
        a1[i, n + k] = 1.0
        basis[i] = n + k
    tab = _Tableau(a1, b, basis, max_iter)

    if n_art:
        c1 = np.zeros(n + n_art)
        c1[n:] = 1.0
        tab.set_cost(c1)
        tab.run(np.ones(n + n_art, dtype=bool))
        infeas = -tab.t[-1, -1]
        if infeas > FEAS_TOL * max(1.0, float(np.max(b))):
            return LPSolution(LPStatus.INFEASIBLE, None, np.nan, tab.iterations)
        # drive remaining artificials out; drop rows that are redundant
        drop = []
        for r in range(m):
            if tab.basis[r] < n:
                continue
            row = tab.t[r, :n]
            j = np.nonzero(np.abs(row) > 1e-9)[0]
            if j.size:
                tab.pivot(r, int(j[np.argmax(np.abs(row[j]))]))
            else:
                drop.append(r)
        keep = [r for r in range(m) if r not in drop]
        t = tab.t[keep + [m]][:, list(range(n)) + [n + n_art]]
        tab.t = t
        tab.basis = [tab.basis[r] for r in keep]
        a_red, b_red = a[keep], b[keep]
    else:
        a_red, b_red = a, b

    tab.set_cost(sf.c)
    if not tab.run(np.ones(n, dtype=bool)):
        return LPSolution(LPStatus.UNBOUNDED, None, -np.inf, tab.iterations)

    y = np.zeros(n)
    y[tab.basis] = tab.t[:-1, -1]
    # refine the basic solution against the untouched matrix
    try:
        yb = np.linalg.solve(a_red[:, tab.basis], b_red)
        if np.all(yb >= -FEAS_TOL):
            y = np.zeros(n)
            y[tab.basis] = yb
    except np.linalg.LinAlgError:
        pass
    y = np.clip(y, 0.0, None)
    x = sf.to_original(y)
    res = lp.residual(x)
    if res > 1e-6:
        raise NumericalBreakdown(f"constraint residual {res:.2e} at reported optimum", tab.iterations)
    return LPSolution(LPStatus.OPTIMAL, x, float(lp.c @ x), tab.iterations)
