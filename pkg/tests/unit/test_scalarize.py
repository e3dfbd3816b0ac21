# tests/unit/test_scalarize.py
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robpareto.core import Candidate, Instance, LinearInSMap, ObjectiveImage, Polyhedron, ScenarioSet
from robpareto.errors import DomainError, EmptyModelError, UnboundedUncertaintyError
from robpareto.geometry import DominanceMode
from robpareto.instances import problem_one, problem_two
from robpareto.linprog import lp_solve
from robpareto.scalarize import (Chebyshev, EpigraphConstraints, Monotonicity, SignedDistance, WeightedPNorm,
                                 WeightedSum, constructive_scalarizer, dual_reformulate, epigraph_form,
                                 parse_scalarizer, robust_linear_value, worst_case, worst_case_values)


def box_instance(polyhedron):
    """Two candidates with f(x;s) = F(x) s over the given polyhedron."""
    objectives = LinearInSMap(
        {"lo": [0.0, 0.0], "hi": [1.0, 1.0]},
        matrices={"a": [[1.0, 2.0], [3.0, 1.0]], "b": [[2.0, 0.0], [0.0, 2.0]]},
    )
    return Instance(ScenarioSet(("lo", "hi"), polyhedron), objectives, (Candidate("a"), Candidate("b")))


class TestCatalogValues:
    """
    Unit tests for the values and metadata of the scalarizer catalog.
    """

    def test_pnorm_one(self):
        """
        Action: Applies the p=1 norm with unit weights to (2, 4).
        Expected: (2 + 4) / 2 = 3.
        """
        assert WeightedPNorm(1.0, 1.0, 0.0).apply([2.0, 4.0]) == pytest.approx(3.0)

    def test_pnorm_inf(self):
        """
        Action: Applies the p=inf norm to (3, 0).
        Expected: 3.
        """
        assert WeightedPNorm(p=np.inf).apply([3.0, 0.0]) == pytest.approx(3.0)

    def test_pnorm_two_with_reference(self):
        """
        Action: Applies the p=2 norm with weights (1, 4) and reference (1, 1) to (4, 2).
        Expected: sqrt((9 + 4) / 2).
        """
        u = WeightedPNorm([1.0, 4.0], 2.0, [1.0, 1.0])
        assert u.apply([4.0, 2.0]) == pytest.approx(np.sqrt(13.0 / 2.0))

    def test_weighted_sum(self):
        """
        Action: Applies the weighted sum with w = (1/2, 1/2) to (2, 2).
        Expected: 2.
        """
        assert WeightedSum([0.5, 0.5]).apply([2.0, 2.0]) == pytest.approx(2.0)

    def test_chebyshev(self):
        """
        Action: Applies the Chebyshev scalarizer with weights (1, 2) and reference (0, 1) to (3, 3).
        Expected: max(3, 4) = 4.
        """
        assert Chebyshev([1.0, 2.0], [0.0, 1.0]).apply([3.0, 3.0]) == pytest.approx(4.0)

    def test_monotonicity_classes(self):
        """
        Action: Reads the monotonicity of every catalog member.
        Expected: Positive weights give strong monotonicity, a zero weight or max-type forms give strict.
        """
        assert WeightedSum([1.0, 1.0]).monotonicity is Monotonicity.STRONGLY_INCREASING
        assert WeightedSum([1.0, 0.0]).monotonicity is Monotonicity.STRICTLY_INCREASING
        assert WeightedPNorm(p=2.0).monotonicity is Monotonicity.STRONGLY_INCREASING
        assert WeightedPNorm(p=np.inf).monotonicity is Monotonicity.STRICTLY_INCREASING
        assert Chebyshev().monotonicity is Monotonicity.STRICTLY_INCREASING
        assert Monotonicity.STRONGLY_INCREASING > Monotonicity.STRICTLY_INCREASING > Monotonicity.INCREASING

    def test_convexity_flags(self):
        """
        Action: Reads the convexity of linear, norm and signed-distance scalarizers.
        Expected: All convex except the plain-mode signed distance.
        """
        anchors = [[1.0, 4.0], [4.0, 1.0]]
        assert WeightedSum([1.0, 1.0]).linear and WeightedSum([1.0, 1.0]).convex
        assert WeightedPNorm(p=3.0).convex and not WeightedPNorm(p=3.0).linear
        assert SignedDistance(anchors, DominanceMode.HULL).convex
        assert not SignedDistance(anchors, DominanceMode.PLAIN).convex

    @pytest.mark.parametrize("build", [
        lambda: WeightedSum([0.0, 0.0]),
        lambda: WeightedSum([-1.0, 2.0]),
        lambda: WeightedPNorm(p=0.5),
        lambda: WeightedPNorm(p=float("nan")),
        lambda: WeightedPNorm([1.0, 0.0]),
        lambda: Chebyshev([0.0, 1.0]),
        lambda: SignedDistance([[1.0, 1.0]], DominanceMode.SUP),
    ])
    def test_domain_errors(self, build):
        """
        Action: Builds scalarizers with parameters outside their domain.
        Expected: DomainError.
        """
        with pytest.raises(DomainError):
            build()

    def test_weight_length_mismatch(self):
        """
        Action: Applies three weights to a two-objective vector.
        Expected: DomainError.
        """
        with pytest.raises(DomainError):
            WeightedSum([1.0, 1.0, 1.0]).apply([1.0, 2.0])

    @settings(max_examples=100, deadline=None)
    @given(y=st.lists(st.floats(-10, 10), min_size=3, max_size=3),
           w=st.lists(st.floats(0.1, 5), min_size=3, max_size=3))
    def test_pieces_reproduce_values(self, y, w):
        """
        Action: Evaluates piecewise linear scalarizers through their (C, d) pieces.
        Expected: max_r C_r . y + d_r equals the direct value.
        """
        for u in (WeightedSum(w), Chebyshev(w, [1.0, 0.0, -1.0]), WeightedPNorm(w, np.inf, [1.0, 0.0, -1.0])):
            C, d = u.pieces(3)
            assert float(np.max(C @ np.asarray(y) + d)) == pytest.approx(u.apply(y), abs=1e-9)

    def test_smooth_norm_has_no_pieces(self):
        """
        Action: Asks the p=2 norm for its linear pieces.
        Expected: None.
        """
        assert WeightedPNorm(p=2.0).pieces(2) is None


class TestParseScalarizer:
    """
    Unit tests for the text form of scalarizers.
    """

    def test_pnorm(self):
        """
        Action: Parses 'pnorm:p=2,w=1,ref=0'.
        Expected: A p=2 norm with unit weight and zero reference.
        """
        u = parse_scalarizer("pnorm:p=2,w=1,ref=0")
        assert isinstance(u, WeightedPNorm)
        assert u.p == 2.0
        assert u.spec() == "pnorm:p=2,w=1,ref=0"

    def test_weight_lists(self):
        """
        Action: Parses weighted sums and Chebyshev forms with comma-separated vectors.
        Expected: The vectors are kept in order.
        """
        assert parse_scalarizer("wsum:w=0.5,0.5").weights.tolist() == [0.5, 0.5]
        u = parse_scalarizer("cheb:w=1,2,ref=0,1")
        assert u.weights.tolist() == [1.0, 2.0]
        assert u.reference.tolist() == [0.0, 1.0]

    def test_infinite_p(self):
        """
        Action: Parses 'pnorm:p=inf'.
        Expected: A norm with infinite p whose spec prints 'inf'.
        """
        u = parse_scalarizer("pnorm:p=inf")
        assert np.isinf(u.p)
        assert u.spec().startswith("pnorm:p=inf")

    def test_spec_is_parseable(self):
        """
        Action: Parses the spec of each catalog member again.
        Expected: The same spec.
        """
        for u in (WeightedSum([0.25, 0.75]), WeightedPNorm([1.0, 2.0], 10.0, [0.5, 0.0]), Chebyshev([3.0])):
            assert parse_scalarizer(u.spec()).spec() == u.spec()

    @pytest.mark.parametrize("text", ["foo:w=1", "pnorm:q=2", "wsum", "wsum:w=a,b", "pnorm:p=", "cheb:w=1,ref"])
    def test_rejected_text(self, text):
        """
        Action: Parses malformed or unknown scalarizer text.
        Expected: DomainError.
        """
        with pytest.raises(DomainError):
            parse_scalarizer(text)

    def test_construct_needs_an_instance(self):
        """
        Action: Parses a constructive scalarizer with and without an instance.
        Expected: DomainError without; a hull-mode signed distance anchored at x=0 with.
        """
        with pytest.raises(DomainError):
            parse_scalarizer("construct:anchor=0,mode=hull")
        u = parse_scalarizer("construct:anchor=0,mode=hull", problem_one())
        assert isinstance(u, SignedDistance)
        assert u.mode is DominanceMode.HULL
        assert u.spec() == "construct:anchor=0,mode=hull"


class TestWorstCase:
    """
    Unit tests for worst-case evaluation over scenario images.
    """

    @pytest.fixture
    def problem(self):
        """
        Action: Builds the segment instance.
        Expected: Returns an instance with 21 lattice candidates.
        """
        return problem_one()

    def test_worst_case_of_zero(self, problem):
        """
        Action: Takes the weighted-sum worst case of x=0.
        Expected: 2.5, first reached in scenario 1.
        """
        wc = worst_case(WeightedSum([0.5, 0.5]), problem.image("0"))
        assert wc.value == pytest.approx(2.5)
        assert wc.scenario == "1"

    def test_worst_case_of_one(self, problem):
        """
        Action: Takes the weighted-sum worst case of x=1.
        Expected: 2, reached in scenario 2.
        """
        wc = worst_case(WeightedSum([0.5, 0.5]), problem.image("1"))
        assert wc.value == pytest.approx(2.0)
        assert wc.scenario == "2"

    def test_bulk_values(self, problem):
        """
        Action: Computes worst cases of all candidates at once.
        Expected: Matches worst_case candidate by candidate.
        """
        u = WeightedPNorm(p=2.0)
        values = worst_case_values(u, problem)
        for cand, value in zip(problem.candidates, values):
            assert value == pytest.approx(worst_case(u, problem.image(cand)).value)

    def test_empty_image(self):
        """
        Action: Takes the worst case of an image without points.
        Expected: DomainError.
        """
        with pytest.raises(DomainError):
            worst_case(WeightedSum([1.0]), ObjectiveImage((), np.zeros((0, 1))))


class TestReformulations:
    """
    Unit tests for the epigraph LP and the dual of the inner maximization.
    """

    def test_epigraph_lp(self):
        """
        Action: Solves the epigraph LP of the weighted sum (1/2, 1/2) on the segment instance.
        Expected: lambda = 1.6 at x = 0.6.
        """
        problem = epigraph_form(problem_one(), WeightedSum([0.5, 0.5]))
        result = lp_solve(problem)
        assert result.value == pytest.approx(1.6)
        assert result.solution[0] == pytest.approx(0.6)

    def test_epigraph_constraints_of_a_candidate(self):
        """
        Action: Lists the epigraph constraints of (0,0) for the p=2 norm.
        Expected: One level per scenario; the minimal level is the worst case.
        """
        instance = problem_two()
        u = WeightedPNorm(p=2.0)
        constraints = epigraph_form(instance, u, "(0,0)")
        assert isinstance(constraints, EpigraphConstraints)
        assert constraints.scenario_ids == ("1", "2", "3")
        assert constraints.minimal_level == pytest.approx(worst_case(u, instance.image("(0,0)")).value)

    def test_epigraph_needs_a_candidate(self):
        """
        Action: Asks for the epigraph of a smooth norm without naming a candidate.
        Expected: DomainError.
        """
        with pytest.raises(DomainError):
            epigraph_form(problem_two(), WeightedPNorm(p=2.0))

    def test_dual_over_the_unit_box(self):
        """
        Action: Computes the worst case of w . F s over the unit box for F = [[1, 2], [3, 1]].
        Expected: 7, attained at s = (1, 1).
        """
        instance = box_instance(Polyhedron([[1.0, 0.0], [0.0, 1.0]], [1.0, 1.0]))
        problem = dual_reformulate(instance, [1.0, 1.0], "a")
        assert problem.c.tolist() == [1.0, 1.0]
        assert robust_linear_value(instance, [1.0, 1.0], "a") == pytest.approx(7.0)
        assert robust_linear_value(instance, 1.0, "b") == pytest.approx(4.0)

    def test_dual_of_a_single_point(self):
        """
        Action: Describes the scenario set as the single point s0 = (0.3, 0.7) by equalities.
        Expected: The worst case is w . F s0.
        """
        s0 = np.array([0.3, 0.7])
        instance = box_instance(Polyhedron([], [], np.eye(2), s0))
        F = np.array([[1.0, 2.0], [3.0, 1.0]])
        w = np.array([0.25, 0.75])
        assert robust_linear_value(instance, w, "a") == pytest.approx(w @ F @ s0)

    def test_unbounded_scenario_set(self):
        """
        Action: Uses the polyhedron {s >= 0}, written with redundant rows.
        Expected: UnboundedUncertaintyError.
        """
        instance = box_instance(Polyhedron([[-1.0, 0.0], [0.0, -1.0]], [0.0, 0.0]))
        with pytest.raises(UnboundedUncertaintyError):
            robust_linear_value(instance, [1.0, 1.0], "a")

    def test_empty_scenario_set(self):
        """
        Action: Uses the polyhedron {s >= 0, s1 + s2 <= -1}.
        Expected: EmptyModelError.
        """
        instance = box_instance(Polyhedron([[1.0, 1.0]], [-1.0]))
        with pytest.raises(EmptyModelError):
            robust_linear_value(instance, [1.0, 1.0], "a")

    def test_dual_needs_a_polyhedron(self):
        """
        Action: Asks for the dual on an affine family.
        Expected: DomainError.
        """
        with pytest.raises(DomainError):
            dual_reformulate(problem_one(), [1.0, 1.0], "0")


class TestConstructiveScalarizer:
    """
    Unit tests for the signed-distance scalarizer anchored at a candidate image.
    """

    def test_own_worst_case_is_zero(self):
        """
        Action: Anchors the scalarizer at x=0 in plain mode and evaluates x=0.
        Expected: Worst case 0.
        """
        problem = problem_one()
        u = constructive_scalarizer(problem, "0")
        assert u.anchor == "0"
        assert u.monotonicity is Monotonicity.STRICTLY_INCREASING
        assert worst_case(u, problem.image("0")).value == pytest.approx(0.0, abs=1e-12)

    def test_hull_mode_separates_one_from_zero(self):
        """
        Action: Anchors the hull-mode scalarizer at x=0 and evaluates x=1.
        Expected: Worst case -0.5, so x=0 is not a minimizer.
        """
        problem = problem_one()
        u = constructive_scalarizer(problem, "0", DominanceMode.HULL)
        assert worst_case(u, problem.image("1")).value == pytest.approx(-0.5)

    def test_convex_scenario_set_switches_to_hull(self):
        """
        Action: Marks the scenarios as a convex set and asks for a plain-mode scalarizer.
        Expected: A hull-mode signed distance.
        """
        base = problem_one()
        convex = base.replace(scenarios=ScenarioSet(base.scenarios.ids, convex_closure=True))
        assert constructive_scalarizer(convex, "0").mode is DominanceMode.HULL
