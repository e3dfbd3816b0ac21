"""
Instance files and built-in fixtures.

An instance file is a UTF-8 JSON document:

    {
      "name": "problem-1",
      "n": 2,
      "scenarios": ["1", "2", "3"],
      "objectives": {"affine_family": {"1": [[0, 1], [2, 4]], ...}},
      "candidates": {"simplex": 2, "step": 0.05}
    }

"scenarios" is a list of ids or {"ids", "polyhedron": {"A", "b", "A_eq",
"b_eq"}, "convex_closure"}. "objectives" holds exactly one of "table"
({candidate: {scenario: vector}}), "affine_family" ({scenario: matrix}) or
"linear_in_s" ({"points", "matrices" | "vertex_matrices"}). "candidates" is
a list of ids or {"id", "x"} objects, or a simplex lattice. An optional
"ambiguity" block ({"distributions", "labels", "convex_closure",
"constraint"}) describes a distributionally robust model over the scenarios.
"""
import json
import logging

import numpy as np

from .config import DEFAULT_STEP
from .core import (AffineFamilyMap, Candidate, Instance, LinearInSMap, Polyhedron,
                   ScenarioSet, SimplexDomain, TableMap)
from .distro import AmbiguitySet, ExpectationConstraint
from .errors import EmptyModelError, InstanceFormatError, RobParetoError, UnknownIdError
from .figures import write_atomic
from .linprog import LpProblem, lp_solve
from .phantom import PhantomConfig, generate

logger = logging.getLogger(__name__)

BUILTINS = ("problem-1", "problem-2", "phantom-default")


def _matrix_dict(data, name):
    if not isinstance(data, dict) or not data:
        raise InstanceFormatError(f"{name} must be a nonempty object")
    return data


def _objective_map(data):
    if not isinstance(data, dict) or len(data) != 1:
        raise InstanceFormatError('"objectives" needs exactly one of table, affine_family, linear_in_s')
    (form, body), = data.items()
    if form == "table":
        return TableMap(_matrix_dict(body, "table"))
    if form == "affine_family":
        return AffineFamilyMap(_matrix_dict(body, "affine_family"))
    if form == "linear_in_s":
        body = _matrix_dict(body, "linear_in_s")
        return LinearInSMap(body.get("points", {}), body.get("matrices"), body.get("vertex_matrices"))
    raise InstanceFormatError(f"unknown objective form {form!r}")


def _polyhedron(data):
    return Polyhedron(data.get("A", []), data.get("b", []), data.get("A_eq"), data.get("b_eq"))


def _feasible_scenario(polyhedron):
    result = lp_solve(LpProblem(c=np.zeros(polyhedron.dimension), A_ub=polyhedron.A, b_ub=polyhedron.b,
                                A_eq=polyhedron.A_eq, b_eq=polyhedron.b_eq))
    if not result.optimal:
        raise EmptyModelError("scenario polyhedron is empty")
    return result.solution


# A bare polyhedron takes its scenario ids from the objective map
def _polyhedral_scenarios(data, objectives):
    polyhedron = _polyhedron(data)
    convex_closure = bool(data.get("convex_closure", False))
    if isinstance(objectives, LinearInSMap):
        if not objectives.points:
            objectives = LinearInSMap({"s1": _feasible_scenario(polyhedron)}, objectives.matrices,
                                      objectives.vertex_matrices)
        ids = tuple(objectives.points)
    elif isinstance(objectives, AffineFamilyMap):
        ids = tuple(objectives.vertices)
    else:
        ids = tuple(next(iter(objectives.values.values()), {}))
    return ScenarioSet(ids, polyhedron, convex_closure), objectives


def _scenarios(data, objectives):
    if isinstance(data, list):
        return ScenarioSet(tuple(data)), objectives
    if isinstance(data, dict) and "ids" not in data and ("A" in data or "A_eq" in data):
        return _polyhedral_scenarios(data, objectives)
    if not isinstance(data, dict) or "ids" not in data:
        raise InstanceFormatError('"scenarios" must be a list of ids, an object with "ids" or a polyhedron')
    polyhedron = None
    if data.get("polyhedron") is not None:
        polyhedron = _polyhedron(data["polyhedron"])
    return ScenarioSet(tuple(data["ids"]), polyhedron, bool(data.get("convex_closure", False))), objectives


def _candidates(data):
    if isinstance(data, dict):
        k = int(data["simplex"])
        domain = SimplexDomain(k, float(data.get("step", DEFAULT_STEP)))
        return domain.lattice(), domain
    if not isinstance(data, list):
        raise InstanceFormatError('"candidates" must be a list or a simplex object')
    candidates = []
    for entry in data:
        if isinstance(entry, dict):
            point = entry.get("x")
            candidates.append(Candidate(str(entry["id"]), None if point is None else tuple(float(v) for v in point)))
        else:
            candidates.append(Candidate(str(entry)))
    return tuple(candidates), None


def _ambiguity(data, instance):
    if data is None:
        return None, None
    support = data.get("support", list(instance.scenarios.ids))
    ambiguity = AmbiguitySet(tuple(support), data["distributions"],
                             bool(data.get("convex_closure", True)), data.get("labels"))
    constraint = None
    if data.get("constraint") is not None:
        constraint = ExpectationConstraint(_objective_map(data["constraint"]))
    return ambiguity, constraint


def parse_document(data, source="<memory>"):
    """Instance plus optional (AmbiguitySet, ExpectationConstraint) from a decoded document."""
    try:
        if not isinstance(data, dict):
            raise InstanceFormatError("instance document must be a JSON object")
        objectives = _objective_map(data["objectives"])
        scenarios, objectives = _scenarios(data["scenarios"], objectives)
        candidates, simplex = _candidates(data["candidates"])
        if "n" in data and int(data["n"]) != objectives.n:
            raise InstanceFormatError(f'"n" is {data["n"]} but objectives have length {objectives.n}')
        instance = Instance(scenarios, objectives, candidates, simplex,
                            str(data.get("name", source)), dict(data.get("metadata", {})))
        ambiguity, constraint = _ambiguity(data.get("ambiguity"), instance)
    except UnknownIdError as err:
        raise InstanceFormatError(f"{source}: {err}")
    except RobParetoError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as err:
        raise InstanceFormatError(f"{source}: malformed instance ({type(err).__name__}: {err})")
    return instance, ambiguity, constraint


def load_document(path):
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except json.JSONDecodeError as err:
        raise InstanceFormatError(f"{path}: invalid JSON ({err})")
    except (OSError, UnicodeDecodeError) as err:
        raise InstanceFormatError(f"{path}: cannot read instance ({err})")
    logger.debug("loaded instance document %s", path)
    return parse_document(data, str(path))


def load_instance(path):
    return load_document(path)[0]


def _objectives_dict(objectives):
    if isinstance(objectives, AffineFamilyMap):
        return {"affine_family": {s: v.tolist() for s, v in objectives.vertices.items()}}
    if isinstance(objectives, LinearInSMap):
        body = {"points": {s: p.tolist() for s, p in objectives.points.items()}}
        if objectives.matrices is not None:
            body["matrices"] = {c: m.tolist() for c, m in objectives.matrices.items()}
        else:
            body["vertex_matrices"] = objectives.vertex_matrices.tolist()
        return {"linear_in_s": body}
    return {"table": {c: {s: v.tolist() for s, v in row.items()} for c, row in objectives.values.items()}}


def dump_instance(instance, ambiguity=None, constraint=None):
    scenarios = instance.scenarios
    if scenarios.polyhedron is None and not scenarios.convex_closure:
        scenario_doc = list(scenarios.ids)
    else:
        scenario_doc = {"ids": list(scenarios.ids), "convex_closure": scenarios.convex_closure}
        if scenarios.polyhedron is not None:
            p = scenarios.polyhedron
            polyhedron = {"A": p.A.tolist(), "b": p.b.tolist()}
            if p.A_eq.shape[0]:
                polyhedron.update(A_eq=p.A_eq.tolist(), b_eq=p.b_eq.tolist())
            scenario_doc["polyhedron"] = polyhedron
    if instance.simplex is not None:
        candidates = {"simplex": instance.simplex.k, "step": instance.simplex.step}
    else:
        candidates = [c.label if c.point is None else {"id": c.label, "x": list(c.point)}
                      for c in instance.candidates]
    doc = {
        "name": instance.name,
        "n": instance.n,
        "scenarios": scenario_doc,
        "objectives": _objectives_dict(instance.objectives),
        "candidates": candidates,
    }
    if instance.metadata:
        doc["metadata"] = instance.metadata
    if ambiguity is not None:
        doc["ambiguity"] = {"support": list(ambiguity.support), "labels": list(ambiguity.labels),
                            "distributions": ambiguity.distributions.tolist(),
                            "convex_closure": ambiguity.convex_closure}
        if constraint is not None:
            doc["ambiguity"]["constraint"] = _objectives_dict(constraint.constraints)
    return doc


def save_instance(instance, path, ambiguity=None, constraint=None):
    write_atomic(path, json.dumps(dump_instance(instance, ambiguity, constraint), indent=1) + "\n")
    logger.info("wrote instance %s to %s", instance.name, path)


def problem_one(step=DEFAULT_STEP):
    """Two objectives, three scenarios, x in [0, 1] written as the point (x, 1 - x)."""
    objectives = AffineFamilyMap({
        "1": [[0.0, 1.0], [2.0, 4.0]],
        "2": [[2.0, 1.0], [2.0, 1.0]],
        "3": [[2.0, 4.0], [0.0, 1.0]],
    })
    return Instance.on_simplex(ScenarioSet(("1", "2", "3")), objectives, 2, step, name="problem-1")


def problem_two():
    """The three vertices (0,0), (1,0), (0,1) of {x1 + x2 <= 1, x >= 0}; points are (x1, x2, 1 - x1 - x2)."""
    objectives = AffineFamilyMap({
        "1": [[0.0, 3.0, 2.0], [6.0, 2.5, 4.0]],
        "2": [[0.0, 3.0, 4.0], [3.0, 0.0, 4.0]],
        "3": [[2.5, 6.0, 4.0], [3.0, 0.0, 2.0]],
    })
    domain = SimplexDomain(3)
    candidates = tuple(domain.candidate(p) for p in ((0.0, 0.0, 1.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0)))
    return Instance(ScenarioSet(("1", "2", "3")), objectives, candidates, name="problem-2")


def builtin(name, step=DEFAULT_STEP):
    if name == "problem-1":
        return problem_one(step)
    if name == "problem-2":
        return problem_two()
    if name == "phantom-default":
        return generate(PhantomConfig(), name="phantom-default")
    raise UnknownIdError(f"unknown builtin instance {name!r}; choose one of {', '.join(BUILTINS)}")
