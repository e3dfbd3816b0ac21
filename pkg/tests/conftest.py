import os

import numpy as np
import pytest

from robpareto import AmbiguitySet, Candidate, Instance, ScenarioSet, TableMap

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


def random_table_instance(rng, n=None, scenarios=None, candidates=None, name="random"):
    """Integer objective values 0..9 with n <= 3, |S| <= 4 and |X| <= 6 unless fixed."""
    n = n or int(rng.integers(1, 4))
    scenarios = scenarios or int(rng.integers(1, 5))
    candidates = candidates or int(rng.integers(1, 7))
    ids = tuple(f"s{j + 1}" for j in range(scenarios))
    labels = tuple(f"x{k + 1}" for k in range(candidates))
    values = rng.integers(0, 10, size=(candidates, scenarios, n))
    table = {c: {s: values[k, j].tolist() for j, s in enumerate(ids)} for k, c in enumerate(labels)}
    return Instance(ScenarioSet(ids), TableMap(table), tuple(Candidate(c) for c in labels), name=name)


@pytest.fixture
def data_path():
    """
    Action: Resolves file names inside tests/data.
    Expected: Returns a function mapping a file name to its absolute path.
    """
    return lambda name: os.path.join(DATA_DIR, name)


@pytest.fixture
def make_instance():
    """
    Action: Exposes the random table instance builder to tests.
    Expected: Returns random_table_instance(rng, n, scenarios, candidates, name).
    """
    return random_table_instance


@pytest.fixture(scope="session")
def random_instances():
    """
    Action: Draws 100 seeded random table instances.
    Expected: Small instances (n <= 3, |S| <= 4, |X| <= 6, values 0..9), identical on every run.
    """
    rng = np.random.default_rng(20240611)
    return [random_table_instance(rng, name=f"random-{k}") for k in range(100)]


@pytest.fixture(scope="session")
def random_dro_instances():
    """
    Action: Draws 100 seeded random instances with convex ambiguity sets over their scenarios.
    Expected: (instance, AmbiguitySet) pairs with 1..3 Dirichlet generator distributions each.
    """
    rng = np.random.default_rng(7)
    pairs = []
    for k in range(100):
        instance = random_table_instance(rng, scenarios=int(rng.integers(2, 5)), name=f"dro-{k}")
        generators = rng.dirichlet(np.ones(len(instance.scenarios)), size=int(rng.integers(1, 4)))
        pairs.append((instance, AmbiguitySet(instance.scenarios.ids, generators, convex_closure=True)))
    return pairs
