"""
Minimization of worst-case scalarized objectives.

Explicit candidate families are evaluated exhaustively. On the decision
simplex a piecewise linear scalarizer over an affine family goes through the
epigraph LP; anything else is swept over the simplex lattice and then
polished by local moves at successively halved steps.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .config import DEFAULT_REFINEMENTS, SIMPLEX_TOL, thread_count
from .core import AffineFamilyMap, LinearInSMap, SimplexDomain
from .errors import DomainError, SolverStalledError
from .linprog import lp_solve
from .parallel import ordered_map
from .scalarize import epigraph_form, worst_case

logger = logging.getLogger(__name__)

TIE_TOL = 1e-12


class SolveMethod(str, Enum):
    EXACT_LP = "exact_lp"
    SWEEP = "sweep"
    SWEEP_REFINED = "sweep_refined"


@dataclass(frozen=True)
class SolveResult:
    candidate: object
    value: float
    method: SolveMethod
    evaluations: int
    scenario: str = None
    history: tuple = field(default_factory=tuple)

    @property
    def label(self):
        return self.candidate.label


def _continuous(instance):
    objectives = instance.objectives
    if instance.simplex is None:
        return False
    if isinstance(objectives, LinearInSMap):
        return objectives.vertex_matrices is not None
    return isinstance(objectives, AffineFamilyMap)


def _scores(u, Y, threads=None):
    # Worst case over the scenario axis of (points, scenarios, n) images
    workers = thread_count(threads)
    if workers == 1 or Y.shape[0] < 2 * workers:
        return u.values(Y).max(axis=1)
    chunks = np.array_split(Y, workers)
    return np.concatenate(ordered_map(lambda chunk: u.values(chunk).max(axis=1), chunks, workers))


def _first_best(scores, keys):
    best = float(np.min(scores))
    ties = np.flatnonzero(scores <= best + TIE_TOL * (1.0 + abs(best)))
    return int(min(ties, key=lambda k: keys[k]))


def _result(instance, u, candidate, method, evaluations, history=()):
    wc = worst_case(u, instance.image(candidate))
    return SolveResult(candidate, wc.value, SolveMethod(method), evaluations, wc.scenario, tuple(history))


def _exhaustive(instance, u, threads):
    scores = _scores(u, instance.image_array, threads)
    best = _first_best(scores, [c.sort_key for c in instance.candidates])
    logger.debug("exhaustive search over %d candidates picked %s", len(scores), instance.candidates[best].label)
    return _result(instance, u, instance.candidates[best], SolveMethod.SWEEP, len(scores) * len(instance.scenarios))


def _snap(x):
    x = np.where(np.abs(x) < SIMPLEX_TOL, 0.0, x)
    x = np.maximum(x, 0.0)
    return x / x.sum()


def _exact_lp(instance, u):
    problem = epigraph_form(instance, u)
    result = lp_solve(problem)
    if not result.optimal:
        raise SolverStalledError(f"epigraph LP ended {result.status.value}")
    k = instance.objectives.k
    x = _snap(result.solution[:k])
    candidate = instance.resolve(x)
    logger.debug("epigraph LP: lambda %.12g at %s after %d pivots", result.value, candidate.label, result.iterations)
    return _result(instance, u, candidate, SolveMethod.EXACT_LP, len(instance.scenarios),
                   [("lp", candidate.label, result.value)])


def _local_moves(x, h):
    k = x.shape[0]
    moves = []
    for i in range(k):
        for j in range(k):
            if i != j and x[j] >= h - SIMPLEX_TOL:
                y = x.copy()
                y[i] += h
                y[j] -= h
                moves.append(_snap(y))
    return np.asarray(moves)


def _refine(instance, u, x, value, h, threads):
    """Greedy local search with moves h(e_i - e_j); never increases the value."""
    evaluations = 0
    for _ in range(4 * int(round(1.0 / h)) + 4):
        moves = _local_moves(x, h)
        if moves.size == 0:
            break
        scores = _scores(u, instance.point_images(moves), threads)
        evaluations += moves.shape[0] * len(instance.scenarios)
        k = _first_best(scores, [tuple(m[:-1]) for m in moves])
        if scores[k] >= value - TIE_TOL * (1.0 + abs(value)):
            break
        x, value = moves[k], float(scores[k])
    return x, value, evaluations


def _sweep(instance, u, step, refinements, threads):
    domain = instance.simplex
    step = domain.step if step is None else step
    points = domain.lattice_points(step)
    scores = _scores(u, instance.point_images(points), threads)
    evaluations = points.shape[0] * len(instance.scenarios)
    k = _first_best(scores, [tuple(p[:-1]) for p in points])
    x, value = points[k], float(scores[k])
    history = [("sweep", domain.label(x), value)]
    h = step
    for n in range(refinements):
        h /= 2.0
        x, value, used = _refine(instance, u, x, value, h, threads)
        evaluations += used
        history.append((f"refine-{n + 1}", domain.label(x), value))
        logger.debug("refinement pass %d at step %g: %s -> %.12g", n + 1, h, domain.label(x), value)
    method = SolveMethod.SWEEP_REFINED if refinements else SolveMethod.SWEEP
    return _result(instance, u, instance.resolve(x), method, evaluations, history)


def minimize_scalarized(instance, u, step=None, refinements=DEFAULT_REFINEMENTS, method="auto", threads=None):
    """Candidate minimizing max_s u(f(x;s)); ties go to the lexicographically smallest."""
    if step is not None:
        SimplexDomain(instance.simplex.k if instance.simplex else 1, step)
    if not _continuous(instance):
        if method not in ("auto", SolveMethod.SWEEP, SolveMethod.SWEEP.value):
            raise DomainError(f"{instance.name} has an explicit candidate family; only exhaustive search applies")
        return _exhaustive(instance, u, threads)
    lp_ready = isinstance(instance.objectives, AffineFamilyMap) and u.pieces(instance.n) is not None
    method = SolveMethod(method) if method != "auto" else (
        SolveMethod.EXACT_LP if lp_ready else SolveMethod.SWEEP_REFINED)
    if method is SolveMethod.EXACT_LP:
        if not lp_ready:
            raise DomainError(f"{u.spec()} on {instance.name} has no epigraph LP")
        return _exact_lp(instance, u)
    if method is SolveMethod.SWEEP:
        refinements = 0
    return _sweep(instance, u, step, refinements, threads)


def sweep_front(instance, family, **kwargs):
    """One SolveResult per scalarizer, in family order."""
    family = list(family)
    if not family:
        raise DomainError("scalarizer family is empty")
    return [(u.spec(), minimize_scalarized(instance, u, **kwargs)) for u in family]
