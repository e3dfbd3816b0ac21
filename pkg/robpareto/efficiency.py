"""
Candidate classification under the three dominance modes.

Robust efficiency compares images through A - (R^n_+ \\ {0}), convex hull
efficiency through conv(A) - (R^n_+ \\ {0}) and objectivewise efficiency
through {sup A} - (R^n_+ \\ {0}). Set-valued minimizers are computed from the
max-efficient part of each image under the reflexive closure of plain
dominance. Every false label carries a dominator with re-verifiable witnesses.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOLERANCES
from .core import Instance, ScenarioSet, TableMap
from .errors import InvariantViolation
from .geometry import DominanceMode, image_dominates, verify_witness
from .parallel import ordered_map

logger = logging.getLogger(__name__)

ROBUST = "robust_efficient"
CONVEX_HULL = "convex_hull_efficient"
OBJECTIVEWISE = "objectivewise_efficient"
SET_VALUED = "set_valued_minimizer"
LABELS = (ROBUST, CONVEX_HULL, OBJECTIVEWISE, SET_VALUED)

_MODES = {
    ROBUST: DominanceMode.PLAIN,
    CONVEX_HULL: DominanceMode.HULL,
    OBJECTIVEWISE: DominanceMode.SUP,
    SET_VALUED: DominanceMode.PLAIN,
}


@dataclass(frozen=True)
class Dominator:
    candidate: str
    mode: DominanceMode
    witnesses: dict


@dataclass(frozen=True)
class CandidateLabels:
    candidate: object
    robust_efficient: bool
    convex_hull_efficient: bool
    objectivewise_efficient: bool
    set_valued_minimizer: bool
    dominators: dict = field(default_factory=dict)

    def label(self, name):
        return getattr(self, name)


@dataclass(frozen=True)
class EfficiencyReport:
    instance: str
    entries: tuple

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def entry(self, candidate):
        label = getattr(candidate, "label", candidate)
        for e in self.entries:
            if e.candidate.label == label:
                return e
        raise KeyError(label)

    def efficient(self, name):
        """Labels of the candidates for which ``name`` holds, in candidate order."""
        return tuple(e.candidate.label for e in self.entries if e.label(name))


# Max-efficient points of an image (maximization analogue of Pareto efficiency)
def pareto_filter_max(img, tol=DEFAULT_TOLERANCES):
    points = img.points
    keep = []
    for k, p in enumerate(points):
        covers = np.all(points >= p - tol.eq_tol, axis=1)
        strict = np.max(points - p, axis=1) > tol.strict_tol
        keep.append(not np.any(covers & strict))
    return img.subset(keep)


def sets_equal(a, b, tol=DEFAULT_TOLERANCES):
    """Mutual pointwise matching of two images within eq_tol."""
    def covered(p, q):
        return all(np.any(np.all(np.abs(q.points - y) <= tol.eq_tol, axis=1)) for y in p.points)
    return covered(a, b) and covered(b, a)


def _strongest_dominator(target, images, candidates, mode, tol):
    # Among all dominating candidates report the one with the smallest image total
    best, best_total = None, np.inf
    for k, img in enumerate(images):
        if k == target:
            continue
        check = image_dominates(img, images[target], mode, tol)
        if check:
            total = float(img.points.sum())
            if total < best_total:
                best = Dominator(candidates[k].label, mode, check.witnesses)
                best_total = total
    return best


def _set_valued_dominator(target, filtered, candidates, tol):
    # x* is a minimizer iff every x with F(x) <= F(x*) has F(x) == F(x*)
    best, best_total = None, np.inf
    for k, img in enumerate(filtered):
        if k == target:
            continue
        check = image_dominates(img, filtered[target], DominanceMode.PLAIN, tol)
        if check and not sets_equal(img, filtered[target], tol):
            total = float(img.points.sum())
            if total < best_total:
                best = Dominator(candidates[k].label, DominanceMode.PLAIN, check.witnesses)
                best_total = total
    return best


def set_valued_minimizers(instance, tol=DEFAULT_TOLERANCES, threads=None):
    filtered = [pareto_filter_max(img, tol) for img in instance.images()]
    candidates = instance.candidates
    dominators = ordered_map(lambda k: _set_valued_dominator(k, filtered, candidates, tol),
                             range(len(candidates)), threads)
    return [c for c, d in zip(candidates, dominators) if d is None]


def classify(instance, tol=DEFAULT_TOLERANCES, threads=None):
    images = instance.images()
    candidates = instance.candidates
    filtered = [pareto_filter_max(img, tol) for img in images]

    def labels_for(k):
        dominators = {}
        for name in (ROBUST, CONVEX_HULL, OBJECTIVEWISE):
            dominator = _strongest_dominator(k, images, candidates, _MODES[name], tol)
            if dominator is not None:
                dominators[name] = dominator
        dominator = _set_valued_dominator(k, filtered, candidates, tol)
        if dominator is not None:
            dominators[SET_VALUED] = dominator
        return CandidateLabels(
            candidate=candidates[k],
            robust_efficient=ROBUST not in dominators,
            convex_hull_efficient=CONVEX_HULL not in dominators,
            objectivewise_efficient=OBJECTIVEWISE not in dominators,
            set_valued_minimizer=SET_VALUED not in dominators,
            dominators=dominators,
        )

    entries = tuple(ordered_map(labels_for, range(len(candidates)), threads))
    for e in entries:
        if e.convex_hull_efficient and not e.robust_efficient:
            raise InvariantViolation(
                f"candidate {e.candidate.label!r} is convex hull efficient but not robust efficient")
    report = EfficiencyReport(instance.name, entries)
    logger.info("classified %d candidates of %s: %d robust, %d convex hull, %d objectivewise",
                len(entries), instance.name, len(report.efficient(ROBUST)),
                len(report.efficient(CONVEX_HULL)), len(report.efficient(OBJECTIVEWISE)))
    return report


def verify_report(instance, report, tol=DEFAULT_TOLERANCES):
    """Re-check every dominator witness against the instance; returns the failures."""
    failures = []
    for e in report:
        for name, dominator in e.dominators.items():
            own = instance.image(e.candidate)
            if name == SET_VALUED:
                own = pareto_filter_max(own, tol)
            if name == OBJECTIVEWISE:
                anchors = own.points.max(axis=0)[None, :]
            else:
                anchors = own.points
            other = instance.image(dominator.candidate)
            for sid, witness in dominator.witnesses.items():
                if not verify_witness(other.point(sid), witness, anchors, tol):
                    failures.append((e.candidate.label, name, dominator.candidate, sid))
    return failures


def objectivewise_reduction(instance):
    """Deterministic instance whose single scenario is each candidate's componentwise-max corner."""
    corners = {c.label: {"sup": pts.max(axis=0)} for c, pts in zip(instance.candidates, instance.image_array)}
    return Instance(ScenarioSet(("sup",)), TableMap(corners), instance.candidates,
                    name=f"{instance.name}-objectivewise", metadata=dict(instance.metadata))
