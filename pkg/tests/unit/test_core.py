# tests/unit/test_core.py
import numpy as np
import pytest

from robpareto.core import (AffineFamilyMap, Candidate, Instance, LinearInSMap, ObjectiveImage, Polyhedron,
                            ScenarioSet, SimplexDomain, TableMap, format_coordinate, objective_vector,
                            rescaled, simplex_lattice)
from robpareto.errors import DomainError, EmptyModelError, InstanceFormatError, UnknownIdError
from robpareto.instances import problem_one, problem_two


class TestObjectiveEvaluation:
    """
    Unit tests for evaluating f(x;s) and whole images on the built-in instances.
    """

    @pytest.fixture
    def problem(self):
        """
        Action: Builds the two-objective, three-scenario instance on the segment [0, 1].
        Expected: Returns an instance with 21 lattice candidates.
        """
        return problem_one()

    def test_single_evaluations(self, problem):
        """
        Action: Evaluates x=0 in scenario 2 and x=1 in scenario 3.
        Expected: (1, 1) and (2, 0).
        """
        assert problem.evaluate("0", "2").tolist() == [1.0, 1.0]
        assert problem.evaluate("1", "3").tolist() == [2.0, 0.0]

    def test_image_of_zero(self, problem):
        """
        Action: Computes the image of x=0 over all scenarios.
        Expected: One point per scenario, in scenario order.
        """
        img = problem.image("0")
        assert img.scenario_ids == ("1", "2", "3")
        assert img.points.tolist() == [[1.0, 4.0], [1.0, 1.0], [4.0, 1.0]]
        assert img.point("3").tolist() == [4.0, 1.0]

    def test_resolve_point_matches_lattice_label(self, problem):
        """
        Action: Resolves the reduced simplex coordinate 0.35.
        Expected: The lattice candidate labelled '0.35' with point (0.35, 0.65).
        """
        cand = problem.resolve([0.35])
        assert cand is problem.resolve("0.35")
        assert cand.point == pytest.approx((0.35, 0.65))

    def test_off_lattice_point_is_still_evaluated(self, problem):
        """
        Action: Evaluates the point x=0.123 that is not on the lattice.
        Expected: f(x;2) = (1 + x, 1 + x).
        """
        assert problem.evaluate([0.123], "2") == pytest.approx([1.123, 1.123])

    def test_unknown_ids(self, problem):
        """
        Action: Looks up an unknown candidate and an unknown scenario.
        Expected: UnknownIdError for both.
        """
        with pytest.raises(UnknownIdError):
            problem.image("0.333")
        with pytest.raises(UnknownIdError):
            problem.evaluate("0", "4")

    def test_image_array_shape(self, problem):
        """
        Action: Stacks all candidate images.
        Expected: Shape (21, 3, 2) and rows equal to the individual images.
        """
        arr = problem.image_array
        assert arr.shape == (21, 3, 2)
        assert np.array_equal(arr[7], problem.image(problem.candidates[7]).points)

    def test_point_images_match_evaluate(self, problem):
        """
        Action: Evaluates raw simplex points in bulk.
        Expected: Same vectors as per-candidate evaluation.
        """
        bulk = problem.point_images([[0.25, 0.75], [1.0, 0.0]])
        assert bulk.shape == (2, 3, 2)
        assert bulk[0] == pytest.approx(problem.image("0.25").points)
        assert bulk[1] == pytest.approx(problem.image("1").points)

    def test_problem_two_candidates(self):
        """
        Action: Builds the three-vertex instance.
        Expected: Labels (0,0), (1,0), (0,1) and the image of (0,0).
        """
        problem = problem_two()
        assert [c.label for c in problem.candidates] == ["(0,0)", "(1,0)", "(0,1)"]
        assert problem.image("(0,0)").points.tolist() == [[2.0, 4.0], [4.0, 4.0], [4.0, 2.0]]

    def test_images_are_affine_in_the_decision(self):
        """
        Action: Evaluates random mixtures lam x + (1 - lam) x' of simplex points on both affine instances.
        Expected: The image of the mixture is the same mixture of the two images, within 1e-12.
        """
        rng = np.random.default_rng(8)
        for instance in (problem_one(), problem_two()):
            k = instance.objectives.k
            for _ in range(25):
                x, x2 = rng.dirichlet(np.ones(k), size=2)
                lam = rng.uniform()
                mixed = instance.image(lam * x + (1 - lam) * x2).points
                expected = lam * instance.image(x).points + (1 - lam) * instance.image(x2).points
                assert np.allclose(mixed, expected, rtol=0.0, atol=1e-12)


class TestSimplexLattice:
    """
    Unit tests for the decision simplex and its uniform lattice.
    """

    def test_lattice_size_and_order(self):
        """
        Action: Enumerates the 3-dimensional simplex at 20 divisions.
        Expected: C(22, 2) = 231 points, each summing to one, lexicographic in leading coordinates.
        """
        points = simplex_lattice(3, 20)
        assert points.shape == (231, 3)
        assert np.allclose(points.sum(axis=1), 1.0)
        keys = [tuple(p[:-1]) for p in points]
        assert keys == sorted(keys)

    def test_one_dimensional_simplex(self):
        """
        Action: Builds the lattice of the 1-dimensional simplex.
        Expected: A single candidate at the point (1,).
        """
        lattice = SimplexDomain(1).lattice()
        assert len(lattice) == 1
        assert lattice[0].point == (1.0,)

    def test_labels(self):
        """
        Action: Labels points of the 2- and 3-dimensional simplices.
        Expected: Reduced coordinates without float noise.
        """
        assert SimplexDomain(2).label([0.1 + 0.2, 0.7]) == "0.3"
        assert SimplexDomain(3).label([0.5, 0.25, 0.25]) == "(0.5,0.25)"

    def test_step_must_divide_one(self):
        """
        Action: Creates domains with steps 0.3 and 0.
        Expected: DomainError for both.
        """
        with pytest.raises(DomainError):
            SimplexDomain(2, 0.3)
        with pytest.raises(DomainError):
            SimplexDomain(2, 0.0)

    def test_validate_rejects_points_off_the_simplex(self):
        """
        Action: Validates (0.5, 0.6) and (-0.1, 1.1).
        Expected: DomainError for both.
        """
        domain = SimplexDomain(2)
        with pytest.raises(DomainError):
            domain.validate([0.5, 0.6])
        with pytest.raises(DomainError):
            domain.validate([-0.1, 1.1])


class TestModelValidation:
    """
    Unit tests for validation of vectors, scenario sets, maps and instances.
    """

    def test_objective_vector_rejects_nan(self):
        """
        Action: Normalises [1, nan] and [].
        Expected: DomainError for both.
        """
        with pytest.raises(DomainError):
            objective_vector([1.0, float("nan")])
        with pytest.raises(DomainError):
            objective_vector([])

    def test_format_coordinate(self):
        """
        Action: Formats -0.0, 1.0 and 0.1 + 0.2.
        Expected: '0', '1' and '0.3'.
        """
        assert format_coordinate(-0.0) == "0"
        assert format_coordinate(1.0) == "1"
        assert format_coordinate(0.1 + 0.2) == "0.3"

    def test_labels_keep_twelve_digits(self):
        """
        Action: Labels the point (7/9, 2/9) and two points 1e-7 apart.
        Expected: "0.777777777778", and two distinct labels.
        """
        domain = SimplexDomain(2)
        assert domain.label([7 / 9, 2 / 9]) == "0.777777777778"
        assert domain.label([0.5, 0.5]) != domain.label([0.5000001, 0.4999999])

    def test_scenario_set_ids(self):
        """
        Action: Builds scenario sets that are empty or repeat an id.
        Expected: DomainError for both; valid ids are indexed in order.
        """
        with pytest.raises(DomainError):
            ScenarioSet(())
        with pytest.raises(DomainError):
            ScenarioSet(("a", "a"))
        assert ScenarioSet(("a", "b")).index("b") == 1

    def test_instance_without_candidates(self):
        """
        Action: Builds an instance with an empty candidate family.
        Expected: EmptyModelError.
        """
        table = TableMap({"a": {"s": [1.0]}})
        with pytest.raises(EmptyModelError):
            Instance(ScenarioSet(("s",)), table, ())

    def test_table_must_cover_every_scenario(self):
        """
        Action: Builds a table instance whose row misses scenario t.
        Expected: InstanceFormatError.
        """
        table = TableMap({"a": {"s": [1.0, 2.0]}})
        with pytest.raises(InstanceFormatError):
            Instance(ScenarioSet(("s", "t")), table, (Candidate("a"),))

    def test_table_vectors_share_a_length(self):
        """
        Action: Builds a table with vectors of lengths 1 and 2.
        Expected: InstanceFormatError.
        """
        with pytest.raises(InstanceFormatError):
            TableMap({"a": {"s": [1.0], "t": [1.0, 2.0]}})

    def test_affine_family_shapes(self):
        """
        Action: Builds an affine family with matrices of different shapes.
        Expected: InstanceFormatError.
        """
        with pytest.raises(InstanceFormatError):
            AffineFamilyMap({"1": [[1.0, 0.0]], "2": [[1.0, 0.0, 0.0]]})

    def test_linear_in_s_map(self):
        """
        Action: Evaluates f(x;s) = F s for a per-candidate matrix.
        Expected: [[1, 2], [3, 1]] (1, 1) = (3, 4).
        """
        objectives = LinearInSMap({"hi": [1.0, 1.0]}, matrices={"a": [[1.0, 2.0], [3.0, 1.0]]})
        instance = Instance(ScenarioSet(("hi",)), objectives, (Candidate("a"),))
        assert instance.evaluate("a", "hi").tolist() == [3.0, 4.0]

    def test_linear_in_s_needs_one_matrix_form(self):
        """
        Action: Builds a linear_in_s map with both and with neither matrix form.
        Expected: InstanceFormatError for both.
        """
        with pytest.raises(InstanceFormatError):
            LinearInSMap({"s": [1.0]})
        with pytest.raises(InstanceFormatError):
            LinearInSMap({"s": [1.0]}, matrices={"a": [[1.0]]}, vertex_matrices=[[[1.0]]])

    def test_equality_only_polyhedron(self):
        """
        Action: Describes a single scenario point by equalities only.
        Expected: The polyhedron has two coordinates and contains just that point.
        """
        poly = Polyhedron([], [], np.eye(2), [0.3, 0.7])
        assert poly.dimension == 2
        assert poly.contains([0.3, 0.7])
        assert not poly.contains([0.7, 0.3])


class TestImagesAndScaling:
    """
    Unit tests for objective images and the [0, 1] rescaling.
    """

    def test_from_points_default_ids(self):
        """
        Action: Wraps three points in an image without ids.
        Expected: Scenario ids '1', '2', '3' and a subset keeps the matching ids.
        """
        img = ObjectiveImage.from_points([[0, 1], [1, 0], [2, 2]])
        assert img.scenario_ids == ("1", "2", "3")
        sub = img.subset([True, False, True])
        assert sub.scenario_ids == ("1", "3")
        assert sub.points.tolist() == [[0.0, 1.0], [2.0, 2.0]]

    def test_rescaled_affine_family(self):
        """
        Action: Rescales the segment instance by the extremes of its vertex matrices.
        Expected: Both objectives range over [0, 4], so the image of x=0 becomes quarters.
        """
        scaled = rescaled(problem_one())
        assert scaled.name == "problem-1-scaled"
        assert scaled.metadata["scale_lo"] == [0.0, 0.0]
        assert scaled.metadata["scale_hi"] == [4.0, 4.0]
        assert scaled.image("0").points.tolist() == [[0.25, 1.0], [0.25, 0.25], [1.0, 0.25]]

    def test_rescaled_table(self, make_instance):
        """
        Action: Rescales a random table instance.
        Expected: Every objective spans exactly [0, 1] when it is not constant.
        """
        instance = make_instance(np.random.default_rng(3), n=2, scenarios=3, candidates=5)
        scaled = rescaled(instance).image_array
        spans = instance.image_array.max(axis=(0, 1)) - instance.image_array.min(axis=(0, 1))
        for i, span in enumerate(spans):
            if span > 0:
                assert scaled[..., i].min() == pytest.approx(0.0)
                assert scaled[..., i].max() == pytest.approx(1.0)

    def test_replace_keeps_other_fields(self):
        """
        Action: Renames an instance through replace().
        Expected: A new instance with the same candidates and scenarios.
        """
        base = problem_two()
        renamed = base.replace(name="copy")
        assert renamed.name == "copy"
        assert renamed.candidates == base.candidates
        assert renamed.scenarios is base.scenarios
