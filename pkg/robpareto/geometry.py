"""
Dominance geometry over finite point sets.

A point y is dominated by an anchor set A when y lies in A - (R^n_+ \\ {0})
(plain mode) or in conv(A) - (R^n_+ \\ {0}) (hull mode). Hull membership is
decided by a small linear program; nothing here builds a hull explicitly.

A dominance claim needs y <= c componentwise within eq_tol and a total
improvement above strict_tol, so y == c never counts as dominated.
"""
import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import DomainError
from .linprog import LpProblem, lp_solve

logger = logging.getLogger(__name__)


class DominanceMode(str, Enum):
    PLAIN = "plain"
    HULL = "hull"
    SUP = "sup"


@dataclass(frozen=True)
class DominanceWitness:
    """
    Certificate that ``target`` is dominated.

    kind "point": ``hull_point`` is the anchor labelled ``anchor``.
    kind "hull": ``hull_point`` = sum of ``weights`` times the anchors named in ``anchor_ids``.
    """

    kind: str
    target: tuple
    hull_point: tuple
    anchor: str = None
    anchor_ids: tuple = ()
    weights: tuple = None

    @property
    def gain(self):
        return float(np.sum(np.asarray(self.hull_point) - np.asarray(self.target)))


def _anchor_array(anchors, n=None):
    arr = np.asarray(anchors, dtype=float)
    if arr.size == 0:
        raise DomainError("anchor set is empty")
    arr = np.atleast_2d(arr)
    if n is not None and arr.shape[1] != n:
        raise DomainError(f"anchors have dimension {arr.shape[1]}, point has {n}")
    return arr


def _labels(labels, count):
    if labels is None:
        return tuple(str(k) for k in range(count))
    labels = tuple(str(label) for label in labels)
    if len(labels) != count:
        raise DomainError("anchor labels do not match the anchors")
    return labels


def verify_witness(y, witness, anchors=None, tol=DEFAULT_TOLERANCES):
    y = np.asarray(y, dtype=float)
    c = np.asarray(witness.hull_point, dtype=float)
    if not np.allclose(np.asarray(witness.target), y, atol=tol.eq_tol):
        return False
    if np.any(y > c + tol.eq_tol):
        return False
    if np.sum(np.maximum(c - y, 0.0)) <= tol.strict_tol:
        return False
    if anchors is None:
        return True
    anchors = _anchor_array(anchors, y.shape[0])
    if witness.kind == "point":
        return bool(np.any(np.all(np.abs(anchors - c) <= tol.eq_tol, axis=1)))
    weights = np.asarray(witness.weights, dtype=float)
    if weights.shape[0] != anchors.shape[0] or np.any(weights < -tol.eq_tol):
        return False
    return abs(weights.sum() - 1.0) <= 1e-9 and bool(np.allclose(weights @ anchors, c, atol=1e-9))


def dominated_by_point_set(y, anchors, labels=None, tol=DEFAULT_TOLERANCES):
    y = np.asarray(y, dtype=float)
    anchors = _anchor_array(anchors, y.shape[0])
    labels = _labels(labels, anchors.shape[0])
    covers = np.all(y <= anchors + tol.eq_tol, axis=1)
    strict = np.max(anchors - y, axis=1) > tol.strict_tol
    hits = np.flatnonzero(covers & strict)
    if hits.size == 0:
        return None
    j = int(hits[0])
    return DominanceWitness("point", tuple(y.tolist()), tuple(anchors[j].tolist()), anchor=labels[j])


def dominated_by_hull(y, anchors, labels=None, tol=DEFAULT_TOLERANCES):
    y = np.asarray(y, dtype=float)
    anchors = _anchor_array(anchors, y.shape[0])
    labels = _labels(labels, anchors.shape[0])
    # No hull point can cover a coordinate that exceeds every anchor
    if np.any(y > anchors.max(axis=0) + tol.eq_tol):
        return None
    m = anchors.shape[0]
    # maximize sum(c - y) over c = anchors^T lam, lam in the simplex, c >= y.
    # Half of eq_tol as slack keeps a rounded witness inside verify_witness's eq_tol.
    problem = LpProblem(
        c=-anchors.sum(axis=1),
        A_ub=-anchors.T,
        b_ub=-y + 0.5 * tol.eq_tol,
        A_eq=np.ones((1, m)),
        b_eq=[1.0],
    )
    result = lp_solve(problem)
    if not result.optimal:
        return None
    weights = result.solution
    c = weights @ anchors
    if float(np.sum(c - y)) <= tol.strict_tol:
        return None
    return DominanceWitness("hull", tuple(y.tolist()), tuple(c.tolist()),
                            anchor_ids=labels, weights=tuple(weights.tolist()))


def hull_contains(y, anchors, tol=DEFAULT_TOLERANCES):
    """Whether y is a convex combination of the anchors (within eq_tol)."""
    y = np.asarray(y, dtype=float)
    anchors = _anchor_array(anchors, y.shape[0])
    m = anchors.shape[0]
    problem = LpProblem(
        c=np.zeros(m),
        A_ub=np.vstack([anchors.T, -anchors.T]),
        b_ub=np.concatenate([y + tol.eq_tol, -y + tol.eq_tol]),
        A_eq=np.ones((1, m)),
        b_eq=[1.0],
    )
    return lp_solve(problem).optimal


def signed_distance(y, anchors, mode=DominanceMode.PLAIN):
    """
    min over z in A - R^n_+ (or conv(A) - R^n_+) of max_i (y_i - z_i).

    Negative inside the dominated region, zero on its boundary, positive outside.
    """
    y = np.asarray(y, dtype=float)
    anchors = _anchor_array(anchors, y.shape[0])
    mode = DominanceMode(mode)
    if mode is DominanceMode.PLAIN:
        return float(np.min(np.max(y - anchors, axis=1)))
    if mode is not DominanceMode.HULL:
        raise DomainError(f"signed distance is defined for plain and hull modes, not {mode.value}")
    m, n = anchors.shape
    # minimize t over (lam, t): y - anchors^T lam <= t 1, lam in the simplex
    problem = LpProblem(
        c=np.r_[np.zeros(m), 1.0],
        A_ub=np.hstack([-anchors.T, -np.ones((n, 1))]),
        b_ub=-y,
        A_eq=np.r_[np.ones(m), 0.0][None, :],
        b_eq=[1.0],
        lower=np.r_[np.zeros(m), -np.inf],
    )
    return float(lp_solve(problem).value)


def signed_distances(Y, anchors, mode=DominanceMode.PLAIN):
    """signed_distance over the last axis of Y."""
    Y = np.asarray(Y, dtype=float)
    anchors = _anchor_array(anchors, Y.shape[-1])
    if DominanceMode(mode) is DominanceMode.PLAIN:
        return np.min(np.max(Y[..., None, :] - anchors, axis=-1), axis=-1)
    flat = Y.reshape(-1, Y.shape[-1])
    return np.array([signed_distance(y, anchors, mode) for y in flat]).reshape(Y.shape[:-1])


@dataclass(frozen=True)
class DominanceCheck:
    dominated: bool
    witnesses: dict

    def __bool__(self):
        return self.dominated


def image_dominates(a, b, mode=DominanceMode.PLAIN, tol=DEFAULT_TOLERANCES):
    """
    Whether every point of image ``a`` is dominated by image ``b``.

    A convex image ``b`` (generators of a convex scenario set) is compared by
    its hull even in plain mode.
    """
    if a.n != b.n:
        raise DomainError(f"images live in R^{a.n} and R^{b.n}")
    mode = DominanceMode(mode)
    if mode is DominanceMode.SUP:
        anchors, labels = b.points.max(axis=0)[None, :], ("sup",)
    else:
        anchors, labels = b.points, b.scenario_ids
    hull = mode is DominanceMode.HULL or (mode is DominanceMode.PLAIN and b.convex)
    witnesses = {}
    for sid, y in a:
        witness = dominated_by_point_set(y, anchors, labels, tol)
        if witness is None and hull:
            witness = dominated_by_hull(y, anchors, labels, tol)
        if witness is None:
            return DominanceCheck(False, {})
        witnesses[sid] = witness
    return DominanceCheck(True, witnesses)


def is_hyperrectangle(img, tol=DEFAULT_TOLERANCES):
    """Max corner of the image when it is a full Cartesian product of its coordinate values."""
    points = img.points
    axes = []
    for i in range(points.shape[1]):
        values = np.sort(points[:, i])
        distinct = [values[0]]
        for v in values[1:]:
            if v - distinct[-1] > tol.eq_tol:
                distinct.append(v)
        axes.append(np.asarray(distinct))
    corners = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, points.shape[1])
    if corners.shape[0] > points.shape[0]:
        return None
    for corner in corners:
        if not np.any(np.all(np.abs(points - corner) <= tol.eq_tol, axis=1)):
            return None
    return np.array([axis[-1] for axis in axes])
