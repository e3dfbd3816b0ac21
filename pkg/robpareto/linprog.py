"""
Dense two-phase simplex kernel.

Problems are stated as

    minimize    c . v
    subject to  A_ub v <= b_ub
                A_eq v == b_eq
                v_j >= 0, or v_j free

and solved on a full tableau. Entering columns follow Dantzig's rule until a
run of degenerate pivots is detected, after which Bland's rule takes over for
the rest of the phase.
"""
import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .config import LP_FEAS_TOL, LP_OPT_TOL
from .errors import LpDimensionError, SolverStalledError

logger = logging.getLogger(__name__)

PIVOT_TOL = 1e-12


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


def _as_rows(rows, width, name):
    if rows is None:
        return np.zeros((0, width))
    arr = np.asarray(rows, dtype=float)
    if arr.ndim == 1 and arr.size == 0:
        return np.zeros((0, width))
    if arr.ndim != 2 or arr.shape[1] != width:
        raise LpDimensionError(f"{name} must have {width} columns, got shape {arr.shape}")
    return arr


def _as_rhs(values, count, name):
    if values is None:
        values = []
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.shape[0] != count:
        raise LpDimensionError(f"{name} must have {count} entries, got {arr.shape[0]}")
    return arr


@dataclass(frozen=True, eq=False)
class LpProblem:
    c: np.ndarray
    A_ub: np.ndarray = None
    b_ub: np.ndarray = None
    A_eq: np.ndarray = None
    b_eq: np.ndarray = None
    lower: np.ndarray = None

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).reshape(-1)
        width = c.shape[0]
        if width == 0:
            raise LpDimensionError("objective vector is empty")
        A_ub = _as_rows(self.A_ub, width, "A_ub")
        b_ub = _as_rhs(self.b_ub, A_ub.shape[0], "b_ub")
        A_eq = _as_rows(self.A_eq, width, "A_eq")
        b_eq = _as_rhs(self.b_eq, A_eq.shape[0], "b_eq")
        if self.lower is None:
            lower = np.zeros(width)
        else:
            lower = _as_rhs(self.lower, width, "lower")
        if not np.all((lower == 0.0) | (lower == -np.inf)):
            raise LpDimensionError("variable lower bounds must be 0 or -inf")
        for name, arr in (("c", c), ("A_ub", A_ub), ("b_ub", b_ub), ("A_eq", A_eq), ("b_eq", b_eq)):
            if not np.all(np.isfinite(arr)):
                raise LpDimensionError(f"{name} has non-finite coefficients")
        for name, arr in (("c", c), ("A_ub", A_ub), ("b_ub", b_ub),
                          ("A_eq", A_eq), ("b_eq", b_eq), ("lower", lower)):
            object.__setattr__(self, name, arr)

    @property
    def width(self):
        return self.c.shape[0]

    @property
    def free(self):
        return np.isneginf(self.lower)

    # Largest constraint violation of a candidate point
    def violation(self, v):
        v = np.asarray(v, dtype=float)
        worst = 0.0
        if self.A_ub.shape[0]:
            worst = max(worst, float(np.max(self.A_ub @ v - self.b_ub)))
        if self.A_eq.shape[0]:
            worst = max(worst, float(np.max(np.abs(self.A_eq @ v - self.b_eq))))
        bounded = ~self.free
        if bounded.any():
            worst = max(worst, float(np.max(-v[bounded])))
        return worst

    def permuted(self, ub_order=None, eq_order=None):
        ub_order = np.arange(self.A_ub.shape[0]) if ub_order is None else np.asarray(ub_order)
        eq_order = np.arange(self.A_eq.shape[0]) if eq_order is None else np.asarray(eq_order)
        return LpProblem(self.c, self.A_ub[ub_order], self.b_ub[ub_order],
                         self.A_eq[eq_order], self.b_eq[eq_order], self.lower)


@dataclass(frozen=True, eq=False)
class LpResult:
    status: LpStatus
    value: float = None
    solution: np.ndarray = None
    iterations: int = 0

    @property
    def optimal(self):
        return self.status is LpStatus.OPTIMAL


def _pivot(T, row, col):
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])


def _price(T, basis, costs):
    # Reduced-cost row for the current basis
    T[-1, :] = 0.0
    T[-1, :costs.shape[0]] = costs
    for i, j in enumerate(basis):
        if costs[j] != 0.0:
            T[-1] -= costs[j] * T[i]


def _iterate(T, basis, ncols, opt_tol, max_iter):
    m = T.shape[0] - 1
    bland = False
    degenerate_run = 0
    for it in range(max_iter):
        reduced = T[-1, :ncols]
        if bland:
            entering = np.flatnonzero(reduced < -opt_tol)
            if entering.size == 0:
                return LpStatus.OPTIMAL, it
            col = int(entering[0])
        else:
            col = int(np.argmin(reduced))
            if reduced[col] >= -opt_tol:
                return LpStatus.OPTIMAL, it
        column = T[:m, col]
        positive = column > PIVOT_TOL
        if not positive.any():
            return LpStatus.UNBOUNDED, it
        ratios = np.full(m, np.inf)
        ratios[positive] = T[:m, -1][positive] / column[positive]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + 1e-12 * (1.0 + abs(best)))
        row = int(min(ties, key=lambda r: basis[r]))
        if best <= PIVOT_TOL:
            degenerate_run += 1
            if degenerate_run > m + 1 and not bland:
                logger.debug("switching to Bland's rule after %d degenerate pivots", degenerate_run)
                bland = True
        else:
            degenerate_run = 0
        _pivot(T, row, col)
        basis[row] = col
    raise SolverStalledError(f"simplex did not terminate within {max_iter} pivots")


# Solve an LpProblem with the two-phase tableau method
def lp_solve(problem, feas_tol=LP_FEAS_TOL, opt_tol=LP_OPT_TOL, max_iter=None):
    p = problem
    free = p.free
    # Free variables are split into positive and negative parts
    columns = []
    for j in range(p.width):
        columns.append((j, 1.0))
        if free[j]:
            columns.append((j, -1.0))
    ns = len(columns)

    def expand(rows):
        out = np.zeros((rows.shape[0], ns))
        for k, (j, sign) in enumerate(columns):
            out[:, k] = sign * rows[:, j]
        return out

    m_ub, m_eq = p.A_ub.shape[0], p.A_eq.shape[0]
    m = m_ub + m_eq
    rows = np.vstack([expand(p.A_ub), expand(p.A_eq)]) if m else np.zeros((0, ns))
    rhs = np.concatenate([p.b_ub, p.b_eq])
    slack = np.zeros((m, m_ub))
    slack[np.arange(m_ub), np.arange(m_ub)] = 1.0
    flip = rhs < 0.0
    rows[flip] *= -1.0
    slack[flip] *= -1.0
    rhs = np.abs(rhs)

    needs_artificial = [i for i in range(m) if i >= m_ub or flip[i]]
    na = len(needs_artificial)
    ncols = ns + m_ub + na
    T = np.zeros((m + 1, ncols + 1))
    T[:m, :ns] = rows
    T[:m, ns:ns + m_ub] = slack
    T[:m, -1] = rhs
    basis = [0] * m
    for i in range(m_ub):
        basis[i] = ns + i
    for k, i in enumerate(needs_artificial):
        T[i, ns + m_ub + k] = 1.0
        basis[i] = ns + m_ub + k

    if max_iter is None:
        max_iter = 50 * (m + ncols) + 100
    iterations = 0

    if na:
        phase_one = np.zeros(ncols)
        phase_one[ns + m_ub:] = 1.0
        _price(T, basis, phase_one)
        _, used = _iterate(T, basis, ncols, opt_tol, max_iter)
        iterations += used
        infeasibility = -T[-1, -1]
        if infeasibility > feas_tol * (1.0 + float(np.max(rhs, initial=0.0))):
            logger.debug("phase one ended with infeasibility %.3e", infeasibility)
            return LpResult(LpStatus.INFEASIBLE, iterations=iterations)
        # Drive artificial columns out of the basis; rows that cannot be pivoted are redundant
        first_artificial = ns + m_ub
        keep_rows = []
        for i in range(m):
            if basis[i] >= first_artificial:
                candidates = np.flatnonzero(np.abs(T[i, :first_artificial]) > 1e-9)
                if candidates.size == 0:
                    continue
                _pivot(T, i, int(candidates[0]))
                basis[i] = int(candidates[0])
            keep_rows.append(i)
        T = np.vstack([T[keep_rows][:, list(range(first_artificial)) + [ncols]],
                       np.zeros((1, first_artificial + 1))])
        basis = [basis[i] for i in keep_rows]
        ncols = first_artificial

    costs = np.zeros(ncols)
    for k, (j, sign) in enumerate(columns):
        costs[k] = sign * p.c[j]
    _price(T, basis, costs)
    status, used = _iterate(T, basis, ncols, opt_tol, max_iter)
    iterations += used
    if status is LpStatus.UNBOUNDED:
        return LpResult(LpStatus.UNBOUNDED, iterations=iterations)

    standard = np.zeros(ncols)
    for i, j in enumerate(basis):
        standard[j] = T[i, -1]
    solution = np.zeros(p.width)
    for k, (j, sign) in enumerate(columns):
        solution[j] += sign * standard[k]
    bounded = ~free
    solution[bounded] = np.where(solution[bounded] < 0.0, 0.0, solution[bounded])
    value = float(p.c @ solution)
    logger.debug("lp optimal after %d pivots, value %.12g", iterations, value)
    return LpResult(LpStatus.OPTIMAL, value, solution, iterations)
