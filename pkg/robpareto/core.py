"""
Problem model: candidate decisions, scenario sets and uncertain objective maps.

Objective vectors are 1-D float arrays of length n (minimization throughout).
An Instance bundles a finite scenario set, one of three objective map forms
and a finite candidate family, and evaluates f(x;s) for any pair.
"""
import itertools
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .config import DEFAULT_STEP, SIMPLEX_TOL
from .errors import DomainError, EmptyModelError, InstanceFormatError, UnknownIdError

logger = logging.getLogger(__name__)


# Validate and normalise one objective vector
def objective_vector(values, n=None):
    vec = np.asarray(values, dtype=float).reshape(-1)
    if vec.size == 0:
        raise DomainError("objective vector is empty")
    if n is not None and vec.shape[0] != n:
        raise DomainError(f"objective vector has length {vec.shape[0]}, expected {n}")
    if not np.all(np.isfinite(vec)):
        raise DomainError(f"objective vector has non-finite entries: {vec.tolist()}")
    return vec


def format_coordinate(value):
    value = round(float(value), 12)
    if value == 0.0:
        value = 0.0
    return format(value, ".12g")


@dataclass(frozen=True, eq=False)
class Polyhedron:
    """The continuous scenario set {s : A s <= b, A_eq s == b_eq, s >= 0}."""

    A: np.ndarray
    b: np.ndarray
    A_eq: np.ndarray = None
    b_eq: np.ndarray = None

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if A.size == 0:
            # Equality-only descriptions take their width from A_eq
            width = np.atleast_2d(np.asarray(self.A_eq, dtype=float)).shape[1] if self.A_eq is not None else 0
            A = np.zeros((0, width))
        if A.shape[0] != b.shape[0]:
            raise DomainError("polyhedron A and b have different row counts")
        width = A.shape[1]
        if self.A_eq is None:
            A_eq, b_eq = np.zeros((0, width)), np.zeros(0)
        else:
            A_eq = np.atleast_2d(np.asarray(self.A_eq, dtype=float))
            b_eq = np.asarray(self.b_eq, dtype=float).reshape(-1)
            if A_eq.shape[1] != width or A_eq.shape[0] != b_eq.shape[0]:
                raise DomainError("polyhedron equality block does not match A")
        if width == 0:
            raise DomainError("polyhedron has no scenario coordinates")
        for arr in (A, b, A_eq, b_eq):
            if not np.all(np.isfinite(arr)):
                raise DomainError("polyhedron data must be finite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "A_eq", A_eq)
        object.__setattr__(self, "b_eq", b_eq)

    @property
    def dimension(self):
        return self.A.shape[1]

    def contains(self, s, tol=1e-9):
        s = np.asarray(s, dtype=float)
        if np.any(s < -tol):
            return False
        if self.A.shape[0] and np.any(self.A @ s > self.b + tol):
            return False
        return not (self.A_eq.shape[0] and np.any(np.abs(self.A_eq @ s - self.b_eq) > tol))


@dataclass(frozen=True, eq=False)
class ScenarioSet:
    ids: tuple
    polyhedron: Polyhedron = None
    convex_closure: bool = False

    def __post_init__(self):
        ids = tuple(str(i) for i in self.ids)
        if not ids:
            raise DomainError("scenario set is empty")
        if any(not i for i in ids):
            raise DomainError("scenario ids must be nonempty strings")
        if len(set(ids)) != len(ids):
            raise DomainError(f"scenario ids are not unique: {list(ids)}")
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "_index", {sid: k for k, sid in enumerate(ids)})

    def __len__(self):
        return len(self.ids)

    def __iter__(self):
        return iter(self.ids)

    def index(self, scenario):
        try:
            return self._index[str(scenario)]
        except KeyError:
            raise UnknownIdError(f"unknown scenario {scenario!r}")


@dataclass(frozen=True)
class Candidate:
    """A decision: an id, plus its point in decision space when one exists."""

    label: str
    point: tuple = None

    @property
    def vector(self):
        if self.point is None:
            raise DomainError(f"candidate {self.label!r} has no decision point")
        return np.asarray(self.point, dtype=float)

    @property
    def sort_key(self):
        # Simplex points order lexicographically on their reduced coordinates
        if self.point is not None:
            return tuple(self.point[:-1]) if len(self.point) > 1 else tuple(self.point)
        return (self.label,)


@dataclass(frozen=True)
class SimplexDomain:
    """Unit simplex of dimension k, enumerated on a uniform lattice of width step."""

    k: int
    step: float = DEFAULT_STEP

    def __post_init__(self):
        if self.k < 1:
            raise DomainError("simplex dimension must be at least 1")
        if not (0.0 < self.step <= 1.0):
            raise DomainError(f"lattice step must lie in (0, 1], got {self.step}")
        divisions = round(1.0 / self.step)
        if abs(divisions * self.step - 1.0) > 1e-9:
            raise DomainError(f"lattice step {self.step} does not divide 1")

    @property
    def divisions(self):
        return int(round(1.0 / self.step))

    def validate(self, point):
        x = np.asarray(point, dtype=float).reshape(-1)
        if x.shape[0] == self.k - 1:
            x = np.append(x, 1.0 - x.sum())
        if x.shape[0] != self.k:
            raise DomainError(f"simplex point must have {self.k} coordinates, got {x.shape[0]}")
        if not np.all(np.isfinite(x)) or np.any(x < -SIMPLEX_TOL) or abs(x.sum() - 1.0) > SIMPLEX_TOL:
            raise DomainError(f"point {x.tolist()} is not in the unit simplex")
        return x

    def label(self, point):
        reduced = [format_coordinate(v) for v in np.asarray(point)[:-1]]
        if self.k == 1:
            return "1"
        if len(reduced) == 1:
            return reduced[0]
        return "(" + ",".join(reduced) + ")"

    def candidate(self, point):
        x = self.validate(point)
        return Candidate(self.label(x), tuple(float(v) for v in x))

    def lattice_points(self, step=None):
        divisions = self.divisions if step is None else SimplexDomain(self.k, step).divisions
        return simplex_lattice(self.k, divisions)

    def lattice(self, step=None):
        return tuple(self.candidate(x) for x in self.lattice_points(step))


# All points of {c/m : c in Z^k_+, sum(c) = m}, lexicographic in the leading coordinates
def simplex_lattice(k, divisions):
    if k == 1:
        return np.ones((1, 1))
    counts = []
    for bars in itertools.combinations(range(divisions + k - 1), k - 1):
        edges = (-1,) + bars + (divisions + k - 1,)
        counts.append([edges[i + 1] - edges[i] - 1 for i in range(k)])
    counts = np.asarray(counts, dtype=float)
    order = np.lexsort(counts[:, :-1].T[::-1])
    return counts[order] / divisions


class UncertainObjectiveMap(ABC):
    form = None

    @property
    @abstractmethod
    def n(self):
        ...

    @abstractmethod
    def evaluate(self, candidate, scenario):
        """f(x;s) for a Candidate and a scenario id."""

    @abstractmethod
    def check(self, scenarios, candidates):
        """Raise InstanceFormatError when the map does not cover the instance."""

    def evaluate_points(self, points, scenarios):
        """Images of many decision points, shape (N, |S|, n); only for point-based maps."""
        raise DomainError(f"{self.form} maps do not evaluate raw decision points")


class TableMap(UncertainObjectiveMap):
    form = "table"

    def __init__(self, values):
        self.values = {str(c): {str(s): objective_vector(v) for s, v in row.items()}
                       for c, row in values.items()}
        lengths = {v.shape[0] for row in self.values.values() for v in row.values()}
        if len(lengths) != 1:
            raise InstanceFormatError("table objective vectors must all have the same length")
        self._n = lengths.pop()

    @property
    def n(self):
        return self._n

    def evaluate(self, candidate, scenario):
        try:
            return self.values[candidate.label][scenario]
        except KeyError:
            raise UnknownIdError(f"no table entry for candidate {candidate.label!r}, scenario {scenario!r}")

    def check(self, scenarios, candidates):
        for cand in candidates:
            row = self.values.get(cand.label)
            if row is None:
                raise InstanceFormatError(f"table has no row for candidate {cand.label!r}")
            missing = [s for s in scenarios if s not in row]
            if missing:
                raise InstanceFormatError(f"candidate {cand.label!r} misses scenarios {missing}")


class AffineFamilyMap(UncertainObjectiveMap):
    """f(x;s) = V_s x for x in the unit simplex; V_s is n x k."""

    form = "affine_family"

    def __init__(self, vertices):
        self.vertices = {str(s): np.atleast_2d(np.asarray(v, dtype=float)) for s, v in vertices.items()}
        shapes = {v.shape for v in self.vertices.values()}
        if len(shapes) != 1:
            raise InstanceFormatError(f"vertex matrices differ in shape: {sorted(shapes)}")
        for v in self.vertices.values():
            if not np.all(np.isfinite(v)):
                raise InstanceFormatError("vertex matrices must be finite")
        self.shape = shapes.pop()

    @property
    def n(self):
        return self.shape[0]

    @property
    def k(self):
        return self.shape[1]

    def evaluate(self, candidate, scenario):
        x = candidate.vector
        if x.shape[0] != self.k:
            raise DomainError(f"decision point has {x.shape[0]} coordinates, expected {self.k}")
        try:
            return self.vertices[scenario] @ x
        except KeyError:
            raise UnknownIdError(f"no vertex matrix for scenario {scenario!r}")

    def stacked(self, scenarios):
        return np.stack([self.vertices[s] for s in scenarios])

    def evaluate_points(self, points, scenarios):
        return np.einsum("snk,pk->psn", self.stacked(scenarios), np.atleast_2d(points))

    def check(self, scenarios, candidates):
        missing = [s for s in scenarios if s not in self.vertices]
        if missing:
            raise InstanceFormatError(f"no vertex matrix for scenarios {missing}")
        for cand in candidates:
            if cand.point is None or len(cand.point) != self.k:
                raise InstanceFormatError(f"candidate {cand.label!r} needs a {self.k}-dimensional point")


class LinearInSMap(UncertainObjectiveMap):
    """
    f(x;s) = F(x) s with F(x) an n x n_s matrix.

    F is given per candidate id (``matrices``) or, for simplex candidates, as
    vertex matrices combined with the simplex weights (``vertex_matrices``).
    ``points`` assigns a scenario vector s to each listed scenario id.
    """

    form = "linear_in_s"

    def __init__(self, points, matrices=None, vertex_matrices=None):
        if (matrices is None) == (vertex_matrices is None):
            raise InstanceFormatError("linear_in_s needs exactly one of matrices or vertex_matrices")
        self.points = {str(s): np.asarray(v, dtype=float).reshape(-1) for s, v in points.items()}
        self.matrices = None if matrices is None else {
            str(c): np.atleast_2d(np.asarray(m, dtype=float)) for c, m in matrices.items()}
        self.vertex_matrices = None if vertex_matrices is None else np.stack(
            [np.atleast_2d(np.asarray(m, dtype=float)) for m in vertex_matrices])
        shapes = {m.shape for m in (self.matrices or {}).values()}
        if self.vertex_matrices is not None:
            shapes.add(self.vertex_matrices.shape[1:])
        if len(shapes) != 1:
            raise InstanceFormatError("linear_in_s matrices differ in shape")
        self.shape = shapes.pop()
        if any(p.shape[0] != self.shape[1] for p in self.points.values()):
            raise InstanceFormatError("scenario points do not match the matrix width")

    @property
    def n(self):
        return self.shape[0]

    def matrix(self, candidate):
        if self.matrices is not None:
            try:
                return self.matrices[candidate.label]
            except KeyError:
                raise UnknownIdError(f"no matrix for candidate {candidate.label!r}")
        x = candidate.vector
        if x.shape[0] != self.vertex_matrices.shape[0]:
            raise DomainError("decision point does not match the vertex matrices")
        return np.tensordot(x, self.vertex_matrices, axes=1)

    def evaluate(self, candidate, scenario):
        try:
            s = self.points[scenario]
        except KeyError:
            raise UnknownIdError(f"scenario {scenario!r} has no point in the linear_in_s map")
        return self.matrix(candidate) @ s

    def evaluate_points(self, points, scenarios):
        if self.vertex_matrices is None:
            return super().evaluate_points(points, scenarios)
        S = np.stack([self.points[s] for s in scenarios])
        F = np.tensordot(np.atleast_2d(points), self.vertex_matrices, axes=1)
        return np.einsum("pnm,sm->psn", F, S)

    def check(self, scenarios, candidates):
        missing = [s for s in scenarios if s not in self.points]
        if missing:
            raise InstanceFormatError(f"no scenario point for {missing}")
        for cand in candidates:
            self.matrix(cand)


@dataclass(frozen=True, eq=False)
class ObjectiveImage:
    """The finite set f(x;S) of one candidate, one point per scenario in order."""

    scenario_ids: tuple
    points: np.ndarray
    convex: bool = False

    def __post_init__(self):
        points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if points.shape[0] != len(self.scenario_ids):
            raise DomainError("image needs exactly one point per scenario")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "scenario_ids", tuple(self.scenario_ids))

    @classmethod
    def from_points(cls, points, scenario_ids=None, convex=False):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        ids = scenario_ids or tuple(str(k + 1) for k in range(points.shape[0]))
        return cls(tuple(ids), points, convex)

    @property
    def n(self):
        return self.points.shape[1]

    def __len__(self):
        return len(self.scenario_ids)

    def __iter__(self):
        return iter(zip(self.scenario_ids, self.points))

    def point(self, scenario):
        return self.points[self.scenario_ids.index(scenario)]

    def subset(self, mask):
        keep = [k for k, flag in enumerate(mask) if flag]
        return ObjectiveImage(tuple(self.scenario_ids[k] for k in keep), self.points[keep], self.convex)


@dataclass(frozen=True, eq=False)
class Instance:
    scenarios: ScenarioSet
    objectives: UncertainObjectiveMap
    candidates: tuple
    simplex: SimplexDomain = None
    name: str = "instance"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        candidates = tuple(self.candidates)
        if not candidates:
            raise EmptyModelError(f"instance {self.name!r} has no candidates")
        labels = [c.label for c in candidates]
        if len(set(labels)) != len(labels):
            raise InstanceFormatError("candidate ids are not unique")
        if self.simplex is not None:
            for cand in candidates:
                self.simplex.validate(cand.point)
        self.objectives.check(self.scenarios.ids, candidates)
        object.__setattr__(self, "candidates", candidates)
        object.__setattr__(self, "_by_label", {c.label: c for c in candidates})

    @classmethod
    def on_simplex(cls, scenarios, objectives, k, step=DEFAULT_STEP, name="instance", metadata=None):
        domain = SimplexDomain(k, step)
        return cls(scenarios, objectives, domain.lattice(), domain, name, dict(metadata or {}))

    @property
    def n(self):
        return self.objectives.n

    def resolve(self, candidate):
        """Map an id, a Candidate or a simplex point to a Candidate."""
        if isinstance(candidate, Candidate):
            return self._by_label.get(candidate.label, candidate)
        if isinstance(candidate, str):
            try:
                return self._by_label[candidate]
            except KeyError:
                raise UnknownIdError(f"unknown candidate {candidate!r}")
        if self.simplex is None:
            if isinstance(self.objectives, AffineFamilyMap):
                return SimplexDomain(self.objectives.k).candidate(candidate)
            raise UnknownIdError(f"instance {self.name!r} has no decision points; use a candidate id")
        cand = self.simplex.candidate(candidate)
        known = self._by_label.get(cand.label)
        if known is not None and np.allclose(known.vector, cand.vector, atol=1e-9):
            return known
        return cand

    def evaluate(self, candidate, scenario):
        cand = self.resolve(candidate)
        sid = self.scenarios.ids[self.scenarios.index(scenario)]
        return objective_vector(self.objectives.evaluate(cand, sid), self.n)

    def image(self, candidate):
        cand = self.resolve(candidate)
        points = np.stack([self.objectives.evaluate(cand, s) for s in self.scenarios.ids])
        if not np.all(np.isfinite(points)):
            raise DomainError(f"candidate {cand.label!r} has non-finite objective values")
        return ObjectiveImage(self.scenarios.ids, points, self.scenarios.convex_closure)

    @cached_property
    def image_array(self):
        """All candidate images stacked, shape (|X|, |S|, n)."""
        return np.stack([self.image(c).points for c in self.candidates])

    def images(self):
        return [ObjectiveImage(self.scenarios.ids, pts, self.scenarios.convex_closure)
                for pts in self.image_array]

    def point_images(self, points):
        return self.objectives.evaluate_points(points, self.scenarios.ids)

    def replace(self, **changes):
        fields = dict(scenarios=self.scenarios, objectives=self.objectives, candidates=self.candidates,
                      simplex=self.simplex, name=self.name, metadata=dict(self.metadata))
        fields.update(changes)
        return Instance(**fields)


# Affine rescaling of every objective to [0, 1] over all candidate images
def rescaled(instance):
    images = instance.image_array
    lo = images.min(axis=(0, 1))
    hi = images.max(axis=(0, 1))
    if isinstance(instance.objectives, AffineFamilyMap):
        # Extremes of an affine family over the simplex sit at its vertices
        stacked = instance.objectives.stacked(instance.scenarios.ids)
        lo = stacked.min(axis=(0, 2))
        hi = stacked.max(axis=(0, 2))
    span = np.where(hi - lo > 0.0, hi - lo, 1.0)
    if isinstance(instance.objectives, AffineFamilyMap):
        objectives = AffineFamilyMap({s: (v - lo[:, None]) / span[:, None]
                                      for s, v in instance.objectives.vertices.items()})
    else:
        objectives = TableMap({c.label: {s: (p - lo) / span for s, p in zip(instance.scenarios.ids, pts)}
                               for c, pts in zip(instance.candidates, images)})
    metadata = dict(instance.metadata, scale_lo=lo.tolist(), scale_hi=hi.tolist())
    logger.debug("rescaled %s with lo=%s hi=%s", instance.name, lo.tolist(), hi.tolist())
    return instance.replace(objectives=objectives, name=f"{instance.name}-scaled", metadata=metadata)
