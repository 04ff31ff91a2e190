import os
import sys
import unittest
import warnings
from fractions import Fraction

import numpy as np

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from src.copositivity import check_copositive
from src.exceptions import ContractError
from src.minimal_zeros import (
    CopositivityStatus,
    MinimalZeroSearch,
    build_minimal_zero,
    check_condition_A,
    check_condition_B,
    check_psd_corank_one,
    enumerate_minimal_zeros,
    enumerate_minimal_zeros_unpruned,
    kernel_vectors_by_pivot,
    supports_comparable,
    unit_zero,
    verify_determinant_gate,
    verify_nonnegative_products,
    verify_pivot_independence,
    verify_support_incomparability,
)
from src.model_data import MatrixMode, SupportSet, SymMatrix, parse_matrix
from src.utils.utils import load_fixture_text

half = Fraction(1, 2)


def fixture(name: str) -> SymMatrix:
    return parse_matrix(load_fixture_text(name))


def supports(zeros) -> list[tuple[int, ...]]:
    return [zero.support.indices() for zero in zeros]


class TestConditions(unittest.TestCase):
    def setUp(self):
        self.horn = fixture("horn")

    def test_condition_A(self):
        self.assertTrue(check_condition_A(self.horn, SupportSet.from_indices([1, 2], 5)))
        self.assertTrue(check_condition_A(self.horn, SupportSet.from_indices([1, 3], 5)))
        self.assertFalse(check_condition_B(self.horn, SupportSet.from_indices([1, 3], 5)).holds)
        self.assertFalse(check_condition_A(self.horn, SupportSet.from_indices([1, 2, 4], 5)))
        # rank 1 on three indices
        self.assertFalse(check_condition_A(self.horn, SupportSet.from_indices([1, 2, 3], 5)))

    def test_condition_B(self):
        result = check_condition_B(self.horn, SupportSet.from_indices([1, 2], 5))
        self.assertTrue(result.holds)
        self.assertEqual(result.pivot, 1)
        self.assertEqual(list(result.kernel_vector), [half, half])

    def test_condition_B_fails_on_mixed_signs(self):
        matrix = fixture("example-x")
        support = SupportSet.from_indices([1, 2, 5], 5)
        self.assertTrue(check_condition_A(matrix, support))
        result = check_condition_B(matrix, support)
        self.assertFalse(result.holds)
        self.assertIsNone(result.kernel_vector)

    def test_condition_B_contract(self):
        with self.assertRaises(ContractError):
            check_condition_B(self.horn, SupportSet.from_indices([1], 5))
        with self.assertRaises(ContractError):
            check_condition_B(self.horn, SupportSet.from_indices([1, 2, 3], 5))
        with self.assertRaises(ContractError):
            check_condition_B(self.horn, SupportSet.from_indices([1, 2], 5), pivot=4)

    def test_pivot_independence(self):
        results = kernel_vectors_by_pivot(self.horn, SupportSet.from_indices([4, 5], 5))
        self.assertEqual(set(results), {4, 5})
        self.assertTrue(all(result.holds for result in results.values()))
        self.assertEqual(list(results[4].kernel_vector), list(results[5].kernel_vector))

    def test_build_minimal_zero(self):
        support = SupportSet.from_indices([2, 3], 5)
        zero = build_minimal_zero(self.horn, support, check_condition_B(self.horn, support), index=7)
        self.assertEqual(zero.index, 7)
        self.assertEqual(zero.values(), (0, half, half, 0, 0))
        self.assertEqual(self.horn.quadratic_form(zero.tau), 0)

        failed = check_condition_B(fixture("example-x"), SupportSet.from_indices([1, 2, 5], 5))
        with self.assertRaises(ContractError):
            build_minimal_zero(fixture("example-x"), SupportSet.from_indices([1, 2, 5], 5), failed)

    def test_unit_zero(self):
        zero = unit_zero(fixture("zero-3"), 2)
        self.assertEqual(zero.values(), (0, 1, 0))
        self.assertEqual(zero.support.indices(), (2,))

    def test_psd_corank_one(self):
        self.assertTrue(check_psd_corank_one(self.horn, SupportSet.from_indices([1, 2], 5)))
        self.assertFalse(check_psd_corank_one(self.horn, SupportSet.from_indices([1, 2, 3], 5)))
        self.assertFalse(check_psd_corank_one(SymMatrix.identity(3), SupportSet.from_indices([1], 3)))

    def test_supports_comparable(self):
        a = SupportSet.from_indices([1, 2], 5)
        self.assertTrue(supports_comparable(a, SupportSet.from_indices([1, 2, 3], 5)))
        self.assertTrue(supports_comparable(a, a))
        self.assertFalse(supports_comparable(a, SupportSet.from_indices([2, 3], 5)))


class TestEnumeration(unittest.TestCase):
    def test_example_x(self):
        matrix = fixture("example-x")
        search = MinimalZeroSearch(matrix, check_copositive(matrix))
        zeros = search.run()
        self.assertEqual(supports(zeros), [(1,), (2,), (3,), (4,)])
        self.assertEqual([zero.index for zero in zeros], [1, 2, 3, 4])
        self.assertEqual(zeros[2].values(), (0, 0, 1, 0, 0))
        self.assertEqual(search.remaining, [5])
        self.assertEqual(search.tested, 0)
        self.assertIs(search.status, CopositivityStatus.VERIFIED)

    def test_example_xbar(self):
        zeros = enumerate_minimal_zeros(fixture("example-xbar"))
        self.assertEqual(supports(zeros), [(1, 2), (2, 3), (1, 5), (4, 5)])
        self.assertEqual(zeros[0].values(), (half, half, 0, 0, 0))
        self.assertEqual(zeros[2].values(), (half, 0, 0, 0, half))
        self.assertEqual(zeros[3].values(), (0, 0, 0, half, half))

    def test_horn(self):
        matrix = fixture("horn")
        search = MinimalZeroSearch(matrix, check_copositive(matrix))
        zeros = search.run()
        self.assertEqual(supports(zeros), [(1, 2), (2, 3), (3, 4), (1, 5), (4, 5)])
        for zero in zeros:
            self.assertEqual(sum(zero.tau), 1)
            self.assertEqual(matrix.quadratic_form(zero.tau), 0)
        # every triple contains an adjacent pair of the 5-cycle
        self.assertEqual(search.tested, 10)
        self.assertEqual(search.pruned, 10 + 5 + 1)

    def test_identity_has_no_zeros(self):
        self.assertEqual(enumerate_minimal_zeros(SymMatrix.identity(3)), [])

    def test_zero_matrix(self):
        zeros = enumerate_minimal_zeros(fixture("zero-3"))
        self.assertEqual(supports(zeros), [(1,), (2,), (3,)])

    def test_matches_unpruned_scan(self):
        for name in ("example-x", "example-xbar", "horn", "identity-3", "zero-3"):
            with self.subTest(fixture=name):
                matrix = fixture(name)
                zeros = enumerate_minimal_zeros(matrix)
                self.assertEqual(enumerate_minimal_zeros_unpruned(matrix), [zero.support for zero in zeros])

    def test_supports_pass_psd_corank_one(self):
        for name in ("example-xbar", "horn"):
            matrix = fixture(name)
            for zero in enumerate_minimal_zeros(matrix):
                self.assertTrue(check_psd_corank_one(matrix, zero.support))

    def test_verifiers(self):
        for name in ("example-x", "example-xbar", "horn", "zero-3"):
            with self.subTest(fixture=name):
                matrix = fixture(name)
                zeros = enumerate_minimal_zeros(matrix)
                self.assertTrue(verify_support_incomparability(zeros))
                self.assertTrue(verify_determinant_gate(matrix, zeros))
                self.assertTrue(verify_nonnegative_products(matrix, zeros))
                self.assertTrue(verify_pivot_independence(matrix, zeros))

    def test_float_mode_agrees(self):
        for name in ("example-x", "example-xbar", "horn"):
            with self.subTest(fixture=name):
                exact = fixture(name)
                floats = exact.as_mode(MatrixMode.FLOAT)
                exact_zeros = enumerate_minimal_zeros(exact)
                float_zeros = enumerate_minimal_zeros(floats)
                self.assertEqual(supports(float_zeros), supports(exact_zeros))
                for a, b in zip(exact_zeros, float_zeros):
                    np.testing.assert_allclose(b.tau, a.tau.astype(float), atol=1e-12)

    def test_unverified_status(self):
        search = MinimalZeroSearch(fixture("horn"))
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            search.run()
        self.assertIs(search.status, CopositivityStatus.UNVERIFIED)
        self.assertIn("minimal zeros of an input not verified copositive matrix", search.warnings)

    def test_refuted_matrix_warns(self):
        matrix = SymMatrix([[1, 0], [0, -1]])
        search = MinimalZeroSearch(matrix, check_copositive(matrix))
        with self.assertWarns(RuntimeWarning):
            zeros = search.run()
        self.assertIs(search.status, CopositivityStatus.REFUTED)
        self.assertEqual(zeros, [])


if __name__ == "__main__":
    unittest.main()
