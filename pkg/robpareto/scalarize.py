"""
Scalarizing functions and the worst case over scenario images.

Every catalog member declares its monotonicity class and whether it is
convex; the efficiency guarantees of a minimizer depend on both. The
module also builds the two tractable reformulations of the worst-case
problem: the epigraph LP over the decision simplex and the LP dual of the
inner maximization over a polyhedral scenario set.
"""
import logging
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .core import AffineFamilyMap, LinearInSMap, format_coordinate, objective_vector
from .errors import DomainError, EmptyModelError, UnboundedUncertaintyError
from .geometry import DominanceMode, signed_distances
from .linprog import LpProblem, LpStatus, lp_solve

logger = logging.getLogger(__name__)


class Monotonicity(IntEnum):
    """Ordered so that a stronger class compares greater."""

    INCREASING = 1
    STRICTLY_INCREASING = 2
    STRONGLY_INCREASING = 3


def _vector_or_scalar(values, name):
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite and nonempty")
    return arr


def _broadcast(arr, n, name):
    if arr.shape[0] == 1:
        return np.full(n, arr[0])
    if arr.shape[0] != n:
        raise DomainError(f"{name} has length {arr.shape[0]}, objectives {n}")
    return arr


def _format_values(arr):
    return ",".join(format_coordinate(v) for v in np.asarray(arr).reshape(-1))


class Scalarizer(ABC):
    kind = None
    linear = False

    @property
    @abstractmethod
    def monotonicity(self):
        ...

    @property
    @abstractmethod
    def convex(self):
        ...

    @abstractmethod
    def values(self, Y):
        """u applied over the last axis of Y."""

    @abstractmethod
    def spec(self):
        """Text form accepted by parse_scalarizer."""

    def pieces(self, n):
        """(C, d) with u(y) = max_r C_r . y + d_r when u is piecewise linear, else None."""
        return None

    def apply(self, y):
        y = objective_vector(y)
        return float(self.values(y[None, :])[0])

    def __repr__(self):
        return f"{type(self).__name__}({self.spec()!r})"


class WeightedSum(Scalarizer):
    kind = "wsum"
    linear = True

    def __init__(self, weights):
        self.weights = _vector_or_scalar(weights, "weights")
        if np.any(self.weights < 0.0) or not np.any(self.weights > 0.0):
            raise DomainError(f"weighted sum needs w >= 0, w != 0, got {self.weights.tolist()}")

    @property
    def monotonicity(self):
        if np.all(self.weights > 0.0):
            return Monotonicity.STRONGLY_INCREASING
        return Monotonicity.STRICTLY_INCREASING

    @property
    def convex(self):
        return True

    def values(self, Y):
        Y = np.asarray(Y, dtype=float)
        return Y @ _broadcast(self.weights, Y.shape[-1], "weights")

    def pieces(self, n):
        return _broadcast(self.weights, n, "weights")[None, :], np.zeros(1)

    def spec(self):
        return f"wsum:w={_format_values(self.weights)}"


class WeightedPNorm(Scalarizer):
    """
    (sum_i w_i |y_i - z*_i|^p / n)^(1/p), with p = inf read as max_i w_i |y_i - z*_i|.

    Increasing only on the region y >= z*; the reference point must lie
    below every attainable objective vector for the monotonicity claims to hold.
    """

    kind = "pnorm"

    def __init__(self, weights=1.0, p=1.0, reference=0.0):
        self.p = float(p)
        if np.isnan(self.p) or self.p < 1.0:
            raise DomainError(f"p-norm needs p >= 1, got {p}")
        self.weights = _vector_or_scalar(weights, "weights")
        if np.any(self.weights <= 0.0):
            raise DomainError(f"p-norm weights must be positive, got {self.weights.tolist()}")
        self.reference = _vector_or_scalar(reference, "reference")

    @property
    def monotonicity(self):
        if np.isinf(self.p):
            return Monotonicity.STRICTLY_INCREASING
        return Monotonicity.STRONGLY_INCREASING

    @property
    def convex(self):
        return True

    def values(self, Y):
        Y = np.asarray(Y, dtype=float)
        n = Y.shape[-1]
        w = _broadcast(self.weights, n, "weights")
        gap = np.abs(Y - _broadcast(self.reference, n, "reference"))
        if np.isinf(self.p):
            return np.max(w * gap, axis=-1)
        return (np.sum(w * gap ** self.p, axis=-1) / n) ** (1.0 / self.p)

    def pieces(self, n):
        if not np.isinf(self.p):
            return None
        w = _broadcast(self.weights, n, "weights")
        z = _broadcast(self.reference, n, "reference")
        C = np.vstack([np.diag(w), -np.diag(w)])
        return C, np.concatenate([-w * z, w * z])

    def spec(self):
        p = "inf" if np.isinf(self.p) else format_coordinate(self.p)
        return f"pnorm:p={p},w={_format_values(self.weights)},ref={_format_values(self.reference)}"


class Chebyshev(Scalarizer):
    """max_i w_i (y_i - z*_i) for w > 0."""

    kind = "cheb"

    def __init__(self, weights=1.0, reference=0.0):
        self.weights = _vector_or_scalar(weights, "weights")
        if np.any(self.weights <= 0.0):
            raise DomainError(f"Chebyshev weights must be positive, got {self.weights.tolist()}")
        self.reference = _vector_or_scalar(reference, "reference")

    @property
    def monotonicity(self):
        return Monotonicity.STRICTLY_INCREASING

    @property
    def convex(self):
        return True

    def pieces(self, n):
        w = _broadcast(self.weights, n, "weights")
        z = _broadcast(self.reference, n, "reference")
        return np.diag(w), -w * z

    def values(self, Y):
        Y = np.asarray(Y, dtype=float)
        C, d = self.pieces(Y.shape[-1])
        return np.max(Y @ C.T + d, axis=-1)

    def spec(self):
        return f"cheb:w={_format_values(self.weights)},ref={_format_values(self.reference)}"


class SignedDistance(Scalarizer):
    """
    Signed max-coordinate distance to the region dominated by an anchor image.

    Zero on the anchor image itself, negative for points that the anchor
    image (or its hull, in hull mode) dominates.
    """

    kind = "construct"

    def __init__(self, anchors, mode=DominanceMode.PLAIN, anchor=None):
        self.anchors = np.atleast_2d(np.asarray(anchors, dtype=float))
        if self.anchors.size == 0:
            raise DomainError("signed distance needs at least one anchor point")
        self.mode = DominanceMode(mode)
        if self.mode is DominanceMode.SUP:
            raise DomainError("signed distance is defined for plain and hull modes")
        self.anchor = anchor

    @property
    def monotonicity(self):
        return Monotonicity.STRICTLY_INCREASING

    @property
    def convex(self):
        return self.mode is DominanceMode.HULL

    def values(self, Y):
        return signed_distances(Y, self.anchors, self.mode)

    def spec(self):
        return f"construct:anchor={self.anchor},mode={self.mode.value}"


@dataclass(frozen=True)
class WorstCase:
    value: float
    scenario: str


def worst_case(u, img):
    if len(img) == 0:
        raise DomainError("worst case of an empty image")
    vals = u.values(img.points)
    k = int(np.argmax(vals))
    return WorstCase(float(vals[k]), img.scenario_ids[k])


# Worst-case values of every candidate at once, shape (|X|,)
def worst_case_values(u, instance):
    return u.values(instance.image_array).max(axis=1)


@dataclass(frozen=True)
class EpigraphConstraints:
    """The constraints lambda >= u(f(x;s)) of one fixed candidate."""

    candidate: str
    scenario_ids: tuple
    levels: tuple

    @property
    def minimal_level(self):
        return max(self.levels)


def epigraph_form(instance, u, candidate=None):
    """
    Epigraph of the worst-case scalarized problem.

    Without a candidate, a piecewise linear u over an affine family yields the
    joint LP in (x, lambda): minimize lambda subject to C_r V_s x + d_r <= lambda
    for every scenario s and piece r, with x in the unit simplex. The LP's
    last variable is lambda. Otherwise the per-scenario constraint list of
    the given (or only) candidate is returned.
    """
    objectives = instance.objectives
    pieces = u.pieces(instance.n)
    if candidate is None and pieces is not None and isinstance(objectives, AffineFamilyMap):
        C, d = pieces
        stacked = objectives.stacked(instance.scenarios.ids)
        k = objectives.k
        rows = np.concatenate([C @ V for V in stacked])
        rhs = -np.tile(d, stacked.shape[0])
        return LpProblem(
            c=np.r_[np.zeros(k), 1.0],
            A_ub=np.hstack([rows, -np.ones((rows.shape[0], 1))]),
            b_ub=rhs,
            A_eq=np.r_[np.ones(k), 0.0][None, :],
            b_eq=[1.0],
            lower=np.r_[np.zeros(k), -np.inf],
        )
    if candidate is None:
        if len(instance.candidates) != 1:
            raise DomainError("epigraph constraints need a candidate for non-LP scalarizers")
        candidate = instance.candidates[0]
    cand = instance.resolve(candidate)
    img = instance.image(cand)
    levels = tuple(float(v) for v in u.values(img.points))
    return EpigraphConstraints(cand.label, img.scenario_ids, levels)


def dual_reformulate(instance, w, candidate):
    """
    LP dual of max_{s in S} w . F(x) s over the polyhedron S.

    minimize b . y + b_eq . z  subject to  A^T y + A_eq^T z >= F(x)^T w,  y >= 0
    """
    objectives = instance.objectives
    polyhedron = instance.scenarios.polyhedron
    if not isinstance(objectives, LinearInSMap) or polyhedron is None:
        raise DomainError("dual reformulation needs a linear_in_s map and a polyhedral scenario set")
    w = _vector_or_scalar(w, "weights")
    if np.any(w < 0.0):
        raise DomainError(f"dual reformulation needs w >= 0, got {w.tolist()}")
    F = objectives.matrix(instance.resolve(candidate))
    if w.shape[0] == 1:
        w = np.full(F.shape[0], w[0])
    if w.shape[0] != F.shape[0]:
        raise DomainError(f"weights have length {w.shape[0]}, objectives {F.shape[0]}")
    gains = F.T @ w
    m_ub, m_eq = polyhedron.A.shape[0], polyhedron.A_eq.shape[0]
    if m_ub + m_eq == 0:
        raise UnboundedUncertaintyError("scenario polyhedron has no constraints")
    return LpProblem(
        c=np.concatenate([polyhedron.b, polyhedron.b_eq]),
        A_ub=-np.hstack([polyhedron.A.T, polyhedron.A_eq.T]),
        b_ub=-gains,
        lower=np.r_[np.zeros(m_ub), np.full(m_eq, -np.inf)],
    )


def robust_linear_value(instance, w, candidate):
    """max_{s in S} w . f(x;s) through the dual LP."""
    result = lp_solve(dual_reformulate(instance, w, candidate))
    if result.status is LpStatus.INFEASIBLE:
        raise UnboundedUncertaintyError("worst case is unbounded over the scenario polyhedron")
    if result.status is LpStatus.UNBOUNDED:
        raise EmptyModelError("scenario polyhedron is empty")
    logger.debug("dual worst case %.12g after %d pivots", result.value, result.iterations)
    return result.value


def constructive_scalarizer(instance, candidate, mode=DominanceMode.PLAIN):
    mode = DominanceMode(mode)
    cand = instance.resolve(candidate)
    img = instance.image(cand)
    # A convex scenario set dominates through the hull of its generators
    if mode is DominanceMode.PLAIN and img.convex:
        mode = DominanceMode.HULL
    return SignedDistance(img.points, mode, anchor=cand.label)


_PARAM_SPLIT = re.compile(r",(?=[a-z_]+=)")


def _parse_numbers(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise DomainError(f"not a number list: {text!r}")


def parse_scalarizer(text, instance=None):
    """
    Build a scalarizer from text such as ``pnorm:p=2,w=1,ref=0``,
    ``wsum:w=0.5,0.5``, ``cheb:w=1,2`` or ``construct:anchor=<id>,mode=hull``.
    """
    kind, _, rest = text.strip().partition(":")
    params = {}
    for part in _PARAM_SPLIT.split(rest) if rest else []:
        key, sep, value = part.partition("=")
        if not sep or not value:
            raise DomainError(f"malformed scalarizer parameter {part!r} in {text!r}")
        params[key.strip()] = value.strip()
    allowed = {"wsum": {"w"}, "pnorm": {"p", "w", "ref"}, "cheb": {"w", "ref"},
               "construct": {"anchor", "mode"}}
    if kind not in allowed:
        raise DomainError(f"unknown scalarizer kind {kind!r}")
    unknown = set(params) - allowed[kind]
    if unknown:
        raise DomainError(f"unknown parameters {sorted(unknown)} for {kind}")
    if kind == "wsum":
        if "w" not in params:
            raise DomainError("wsum needs weights, e.g. wsum:w=0.5,0.5")
        return WeightedSum(_parse_numbers(params["w"]))
    if kind == "pnorm":
        p = params.get("p", "1")
        p = np.inf if p in ("inf", "infinity") else _parse_numbers(p)[0]
        return WeightedPNorm(_parse_numbers(params.get("w", "1")), p, _parse_numbers(params.get("ref", "0")))
    if kind == "cheb":
        return Chebyshev(_parse_numbers(params.get("w", "1")), _parse_numbers(params.get("ref", "0")))
    if instance is None:
        raise DomainError("construct scalarizers need an instance")
    if "anchor" not in params:
        raise DomainError("construct needs an anchor candidate, e.g. construct:anchor=0")
    try:
        mode = DominanceMode(params.get("mode", "plain"))
    except ValueError:
        raise DomainError(f"unknown dominance mode {params['mode']!r}")
    return constructive_scalarizer(instance, params["anchor"], mode)
