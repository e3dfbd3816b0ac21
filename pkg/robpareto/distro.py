"""
Distributionally robust layer.

A finitely generated ambiguity set turns expectations of f(x;S) into a
robust instance whose scenarios are the generator distributions:
g(x;pi) = sum_s pi(s) f(x;s). Expectation constraints are enforced by
dropping the candidates that violate them for some generator.
"""
import logging
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLERANCES
from .core import AffineFamilyMap, Instance, LinearInSMap, ScenarioSet, TableMap
from .efficiency import CONVEX_HULL, ROBUST, classify
from .errors import DomainError, EmptyFeasibleSetError, InstanceFormatError

logger = logging.getLogger(__name__)

PROB_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class AmbiguitySet:
    """
    Generator distributions over a finite support.

    With ``convex_closure`` the set is the convex hull of the generators.
    Each row of ``distributions`` follows the order of ``support``.
    """

    support: tuple
    distributions: np.ndarray
    convex_closure: bool = True
    labels: tuple = None

    def __post_init__(self):
        support = tuple(str(s) for s in self.support)
        P = np.atleast_2d(np.asarray(self.distributions, dtype=float))
        if P.size == 0:
            raise DomainError("ambiguity set has no generator distributions")
        if P.shape[1] != len(support):
            raise DomainError(f"distributions have {P.shape[1]} entries, support has {len(support)}")
        if np.any(P < -PROB_TOL) or np.any(np.abs(P.sum(axis=1) - 1.0) > PROB_TOL):
            raise DomainError("every generator must be a probability vector")
        labels = self.labels or tuple(f"pi{k + 1}" for k in range(P.shape[0]))
        labels = tuple(str(label) for label in labels)
        if len(labels) != P.shape[0] or len(set(labels)) != len(labels):
            raise DomainError("generator labels must be unique, one per distribution")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "distributions", np.maximum(P, 0.0))
        object.__setattr__(self, "labels", labels)

    @classmethod
    def diracs(cls, scenarios, convex_closure=True):
        """All Dirac distributions over the scenarios, labelled by scenario id."""
        ids = tuple(scenarios)
        return cls(ids, np.eye(len(ids)), convex_closure, ids)

    def aligned(self, scenario_ids):
        """Distribution matrix with columns in the order of ``scenario_ids``."""
        if set(scenario_ids) != set(self.support):
            raise InstanceFormatError(
                f"ambiguity support {list(self.support)} differs from scenarios {list(scenario_ids)}")
        order = [self.support.index(s) for s in scenario_ids]
        return self.distributions[:, order]


@dataclass(frozen=True, eq=False)
class ExpectationConstraint:
    """Rows of c(x;s) that must satisfy E_pi[c(x;S)] <= 0 for every generator."""

    constraints: object

    def expectations(self, instance, candidate, P):
        rows = np.stack([np.asarray(self.constraints.evaluate(candidate, s), dtype=float).reshape(-1)
                         for s in instance.scenarios.ids])
        return P @ rows

    def satisfied(self, instance, candidate, P, tol=DEFAULT_TOLERANCES):
        return bool(np.all(self.expectations(instance, candidate, P) <= tol.eq_tol))


def _mixed_map(instance, P, labels, candidates):
    objectives = instance.objectives
    ids = instance.scenarios.ids
    if isinstance(objectives, AffineFamilyMap):
        stacked = objectives.stacked(ids)
        return AffineFamilyMap({g: np.tensordot(pi, stacked, axes=1) for g, pi in zip(labels, P)})
    if isinstance(objectives, LinearInSMap):
        # f is linear in s, so the expectation is f at the mean scenario
        S = np.stack([objectives.points[s] for s in ids])
        points = {g: pi @ S for g, pi in zip(labels, P)}
        if objectives.matrices is not None:
            matrices = {c.label: objectives.matrices[c.label] for c in candidates}
            return LinearInSMap(points, matrices=matrices)
        return LinearInSMap(points, vertex_matrices=objectives.vertex_matrices)
    index = {c.label: k for k, c in enumerate(instance.candidates)}
    images = instance.image_array
    return TableMap({c.label: {g: pi @ images[index[c.label]] for g, pi in zip(labels, P)}
                     for c in candidates})


def to_robust(instance, ambiguity, constraint=None, tol=DEFAULT_TOLERANCES):
    """Robust instance over the generator distributions of ``ambiguity``."""
    P = ambiguity.aligned(instance.scenarios.ids)
    candidates = instance.candidates
    if constraint is not None:
        candidates = tuple(c for c in candidates if constraint.satisfied(instance, c, P, tol))
        dropped = len(instance.candidates) - len(candidates)
        if not candidates:
            raise EmptyFeasibleSetError(f"no candidate of {instance.name} meets the expectation constraints")
        if dropped:
            logger.info("expectation constraints removed %d of %d candidates", dropped, len(instance.candidates))
    objectives = _mixed_map(instance, P, ambiguity.labels, candidates)
    # A filtered family no longer covers the simplex lattice
    simplex = instance.simplex if len(candidates) == len(instance.candidates) else None
    scenarios = ScenarioSet(ambiguity.labels, convex_closure=ambiguity.convex_closure)
    metadata = dict(instance.metadata, ambiguity={"generators": list(ambiguity.labels),
                                                  "convex_closure": ambiguity.convex_closure})
    return Instance(scenarios, objectives, candidates, simplex, f"{instance.name}-dro", metadata)


def che_equals_robust_check(instance, ambiguity, constraint=None, tol=DEFAULT_TOLERANCES, threads=None):
    """Whether robust and convex hull efficient sets coincide on the transformed instance."""
    if not ambiguity.convex_closure:
        logger.warning("ambiguity set of %s is not convex; robust and convex hull labels may differ",
                       instance.name)
    report = classify(to_robust(instance, ambiguity, constraint, tol), tol, threads)
    return report.efficient(ROBUST) == report.efficient(CONVEX_HULL)
