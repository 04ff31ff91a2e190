import os
import sys
import unittest
from fractions import Fraction

import numpy as np

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from src.exceptions import ContractError, InvalidArgumentError, ResourceLimitError
from src.minimal_zeros import enumerate_minimal_zeros
from src.model_data import SymMatrix, parse_matrix
from src.utils.utils import load_fixture_text
from src.zero_graph import Clique, build_graph, build_representation, extended_support_set, maximal_cliques
from src.zero_set import (
    SimplexPoint,
    barycenter,
    component_membership,
    hull_membership,
    in_convex_hull,
    is_zero,
    oracle_equivalence,
    sample_component,
    verify_clique_extension,
    verify_component_psd,
    verify_full_support_exclusivity,
    verify_vertex_identification,
)

half = Fraction(1, 2)
quarter = Fraction(1, 4)


def analyze(name: str):
    matrix = parse_matrix(load_fixture_text(name))
    zeros = enumerate_minimal_zeros(matrix)
    graph = build_graph(extended_support_set(matrix, zeros))
    representation = build_representation(matrix, zeros, maximal_cliques(graph), graph)
    return matrix, zeros, graph, representation


class TestMembership(unittest.TestCase):
    def test_is_zero(self):
        matrix, _, _, _ = analyze("example-x")
        self.assertTrue(is_zero(matrix, [half, half, 0, 0, 0]))
        self.assertFalse(is_zero(matrix, [half, 0, half, 0, 0]))
        self.assertFalse(is_zero(matrix, [0, 0, 0, 0, 1]))

    def test_component_membership(self):
        matrix, _, _, representation = analyze("example-x")
        self.assertEqual(component_membership(representation, matrix, [half, half, 0, 0, 0]), {1})
        self.assertEqual(component_membership(representation, matrix, [0, 0, 0, 1, 0]), {2})
        self.assertEqual(component_membership(representation, matrix, [half, 0, half, 0, 0]), set())

    def test_hull_membership(self):
        matrix, _, _, representation = analyze("horn")
        point = [quarter, half, quarter, 0, 0]
        self.assertEqual(hull_membership(representation, matrix, point), {1})
        self.assertEqual(component_membership(representation, matrix, point), {1})

    def test_shared_vertex(self):
        matrix, zeros, _, representation = analyze("horn")
        # τ(1) lies in the components of both cliques containing vertex 1
        self.assertEqual(component_membership(representation, matrix, zeros[0].tau), {1, 2})
        self.assertEqual(hull_membership(representation, matrix, zeros[0].tau), {1, 2})

    def test_in_convex_hull(self):
        e1, e2 = np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])
        self.assertTrue(in_convex_hull([e1, e2], [0.5, 0.5, 0.0]))
        self.assertTrue(in_convex_hull([e1, e2], [1.0, 0.0, 0.0]))
        self.assertFalse(in_convex_hull([e1, e2], [0.0, 0.0, 1.0]))
        self.assertFalse(in_convex_hull([], [0.0, 0.0, 1.0]))


class TestSimplexPoint(unittest.TestCase):
    def test_normalize(self):
        matrix = SymMatrix.identity(3)
        point = SimplexPoint.of(matrix, [2, 0, 2], normalize=True)
        self.assertEqual(point.values(), (half, 0, half))
        self.assertEqual(point.support(matrix).indices(), (1, 3))

    def test_invalid(self):
        matrix = SymMatrix.identity(3)
        with self.assertRaises(InvalidArgumentError):
            SimplexPoint.of(matrix, [half, half])
        with self.assertRaises(InvalidArgumentError):
            SimplexPoint.of(matrix, [1, -1, 1])
        with self.assertRaises(InvalidArgumentError):
            SimplexPoint.of(matrix, [0, 0, 0], normalize=True)
        with self.assertRaises(InvalidArgumentError):
            SimplexPoint.of(matrix, [1, 1, 0])


class TestSampling(unittest.TestCase):
    def test_sample_component(self):
        matrix, _, _, representation = analyze("example-xbar")
        point = sample_component(representation, 2, [0, 1], matrix)
        self.assertEqual(point.values(), (0, 0, 0, half, half))
        point = sample_component(representation, 2, [1, 0], matrix)
        self.assertEqual(point.values(), (half, 0, 0, 0, half))
        point = sample_component(representation, 1, [half, half], matrix)
        self.assertEqual(point.values(), (quarter, half, quarter, 0, 0))

    def test_invalid_weights(self):
        matrix, _, _, representation = analyze("example-xbar")
        with self.assertRaises(InvalidArgumentError):
            sample_component(representation, 1, [1], matrix)
        with self.assertRaises(InvalidArgumentError):
            sample_component(representation, 1, [half, quarter], matrix)
        with self.assertRaises(InvalidArgumentError):
            sample_component(representation, 1, [2, -1], matrix)
        with self.assertRaises(InvalidArgumentError):
            sample_component(representation, 3, [half, half], matrix)

    def test_inconsistent_representation(self):
        matrix, zeros, _, _ = analyze("horn")
        representation = build_representation(matrix, zeros, [Clique((1, 3))])
        with self.assertRaises(ContractError):
            sample_component(representation, 1, [half, half], matrix)

    def test_barycenter(self):
        matrix, _, _, representation = analyze("horn")
        for component in representation:
            center = barycenter(representation, component.s, matrix)
            self.assertEqual(center.support(matrix), component.p_star)
            self.assertTrue(is_zero(matrix, center))


class TestOracle(unittest.TestCase):
    def test_fixtures(self):
        for name in ("example-x", "example-xbar", "horn", "identity-3", "zero-3"):
            with self.subTest(fixture=name):
                matrix, _, _, representation = analyze(name)
                report = oracle_equivalence(matrix, representation, 6)
                self.assertTrue(report.passed, report.violations[:3])
                self.assertGreater(report.points_checked, 0)

    def test_counts(self):
        matrix, _, _, representation = analyze("identity-3")
        report = oracle_equivalence(matrix, representation, 4)
        self.assertEqual(report.points_checked, 15)
        self.assertEqual(report.zeros_found, 0)

        matrix, _, _, representation = analyze("zero-3")
        report = oracle_equivalence(matrix, representation, 4)
        self.assertEqual(report.zeros_found, 15)

    def test_missing_component_is_detected(self):
        matrix, zeros, _, representation = analyze("horn")
        representation.components.pop()
        report = oracle_equivalence(matrix, representation, 4)
        self.assertFalse(report.passed)
        self.assertTrue(all(zero and not hull for _, zero, hull in report.violations))

    def test_invalid_grid(self):
        matrix, _, _, representation = analyze("horn")
        with self.assertRaises(InvalidArgumentError):
            oracle_equivalence(matrix, representation, 0)
        with self.assertRaises(ResourceLimitError):
            oracle_equivalence(matrix, representation, 500)


class TestStructuralChecks(unittest.TestCase):
    def test_fixtures(self):
        for name in ("example-x", "example-xbar", "horn", "identity-3", "zero-3"):
            with self.subTest(fixture=name):
                matrix, zeros, graph, representation = analyze(name)
                self.assertTrue(verify_full_support_exclusivity(matrix, representation))
                self.assertTrue(verify_clique_extension(representation, graph))
                self.assertTrue(verify_vertex_identification(representation, zeros))
                self.assertTrue(verify_component_psd(matrix, representation))

    def test_vertex_identification_needs_every_zero(self):
        matrix, zeros, _, representation = analyze("horn")
        representation.components.pop(0)
        representation.components.pop(0)
        # vertex 1 only belonged to the first two components
        self.assertFalse(verify_vertex_identification(representation, zeros))

    def test_component_psd_failure(self):
        matrix, zeros, _, _ = analyze("horn")
        representation = build_representation(matrix, zeros, [Clique((1, 3))])
        self.assertFalse(verify_component_psd(matrix, representation))


if __name__ == "__main__":
    unittest.main()
