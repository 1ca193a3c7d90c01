import unittest

from hypothesis import given, settings

from src.logforms.constructions import additive_space, construct_p2
from src.logforms.errors import DependentBasisError, PreconditionError
from src.logforms.field import field_spec
from src.logforms.forms import DifferentialForm
from src.logforms.polynomial import Polynomial
from src.logforms.spaces import (
    LogFormSpace,
    extract_pair,
    forms_from_pair,
    moore_relation,
    pole_statistics,
    projective_combinations,
    validate_space,
)
from tests.strategies import independent_pairs


class TestLogFormSpace(unittest.TestCase):
    """Test case for space validation and the pair (A, B) description."""

    def __init__(self, method_name: str = "runTest") -> None:
        """Set up test case with the F_4 and F_9 sample spaces."""
        super().__init__(method_name)
        f4 = field_spec(2, 2)
        self.checker = construct_p2([f4.one], f4.one, f4.t)
        f9 = field_spec(3, 2)
        self.additive = additive_space([f9.one, f9.t])
        self.f3 = field_spec(3)

    def _simple(self, *locations: int) -> list[DifferentialForm]:
        z = Polynomial.z(self.f3)
        one = Polynomial.one(self.f3)
        return [DifferentialForm(one, z - x) for x in locations]

    def test_projective_combinations(self) -> None:
        """Check the projective representatives of P^1(F_3) and P^2(F_2)."""
        self.assertEqual(projective_combinations(3, 2), [(0, 1), (1, 0), (1, 1), (1, 2)])
        self.assertEqual(len(projective_combinations(2, 3)), 7)

    def test_validate_p2_space(self) -> None:
        """Check the pole counts of the F_4 sample space."""
        report = validate_space(self.checker)
        self.assertTrue(report.valid)
        self.assertEqual((report.total_poles, report.common_poles), (3, 1))
        table = report.combination_table
        self.assertEqual(len(table), 3)
        self.assertTrue(table["logarithmic"].all())
        self.assertTrue((table["pole_count"] == 2).all())

    def test_validate_additive_space(self) -> None:
        """Check the pole counts of the additive space over F_9."""
        self.assertEqual(self.additive.m, 5)
        report = validate_space(self.additive)
        self.assertTrue(report.valid)
        self.assertEqual((report.total_poles, report.common_poles), (8, 4))
        self.assertEqual(report.to_record()["total_poles"], 8)

    def test_validate_with_workers(self) -> None:
        """Check that validation in worker processes gives the same report."""
        self.assertEqual(validate_space(self.checker, jobs=2), validate_space(self.checker))

    def test_pole_count_failure(self) -> None:
        """Check that the first failing combination and criterion are named."""
        a, b, c = self._simple(0, 1, 2)
        space = LogFormSpace(self.f3, 1, (a - b, b - c))
        report = validate_space(space)
        self.assertFalse(report.valid)
        self.assertEqual(report.coefficients, (1, 2))
        self.assertEqual(report.criterion, "pole_count")
        self.assertEqual(report.to_record()["detail"], "3 poles, expected 2")

    def test_order_at_infinity_failure(self) -> None:
        """Check that a form with the wrong order at infinity is rejected."""
        (a,) = self._simple(0)
        space = LogFormSpace(self.f3, 2, (a * Polynomial.z(self.f3) ** 2,))
        report = validate_space(space)
        self.assertFalse(report.valid)
        self.assertEqual(report.criterion, "pole_count")
        z = Polynomial.z(self.f3)
        form = DifferentialForm(z, z**2 - 1)
        report = validate_space(LogFormSpace(self.f3, 1, (form,)))
        self.assertEqual(report.criterion, "order_at_infinity")

    def test_dependent_basis(self) -> None:
        """Check that a repeated basis form raises DependentBasisError."""
        a, b = self._simple(0, 1)
        with self.assertRaises(DependentBasisError):
            validate_space(LogFormSpace(self.f3, 1, (a - b, a - b)))

    def test_invalid_m(self) -> None:
        """Check that m divisible by p is rejected."""
        a, b = self._simple(0, 1)
        with self.assertRaises(PreconditionError):
            LogFormSpace(self.f3, 3, (a - b,))

    def test_change_of_basis(self) -> None:
        """Check that replacing the basis by another basis of the span keeps validity."""
        first, second = self.additive.basis
        space = LogFormSpace(self.additive.spec, 5, (first + second, first * 2 + second))
        report = validate_space(space)
        self.assertTrue(report.valid)
        self.assertEqual((report.total_poles, report.common_poles), (8, 4))

    def test_pole_statistics(self) -> None:
        """Check the inclusion-exclusion table for three simple forms."""
        a, b, c = self._simple(0, 1, 2)
        statistics = pole_statistics([a - b, b - c, a - c])
        self.assertEqual((statistics.total, statistics.common), (3, 0))
        self.assertEqual(list(statistics.table["shared_poles"]), [2, 2, 2, 1, 1, 1, 0])

    def test_extract_pair_p2(self) -> None:
        """Check that (A, B) rebuilds the F_4 basis exactly."""
        big_a, big_b = extract_pair(self.checker)
        self.assertEqual((big_a.degree, big_b.degree), (1, 1))
        pair = forms_from_pair(big_a, big_b)
        self.assertTrue(pair.logarithmic)
        self.assertTrue(pair.derivative_condition)
        self.assertEqual((pair.omega_1, pair.omega_2), self.checker.basis)

    def test_extract_pair_additive(self) -> None:
        """Check that (A, B) from the additive space gives forms with the same poles."""
        big_a, big_b = extract_pair(self.additive)
        self.assertEqual((big_a.degree, big_b.degree), (2, 2))
        pair = forms_from_pair(big_a, big_b)
        self.assertTrue(pair.logarithmic)
        self.assertEqual(pair.omega_1.denominator, self.additive.basis[0].denominator)
        self.assertEqual(pair.omega_2.denominator, self.additive.basis[1].denominator)

    @given(independent_pairs(max_degree=3))
    @settings(max_examples=100, deadline=None)
    def test_random_pairs_agree(self, pair) -> None:
        """Check that the derivative condition and the Cartier verdict agree on random (A, B)."""
        big_a, big_b = pair
        forms = forms_from_pair(big_a, big_b)
        self.assertEqual(forms.derivative_condition, forms.logarithmic)

    def test_forms_from_dependent_pair(self) -> None:
        """Check that F_p-dependent (A, B) raise DependentBasisError."""
        z = Polynomial.z(self.f3)
        with self.assertRaises(DependentBasisError):
            forms_from_pair(z + 1, (z + 1).scale(2))

    def test_extract_pair_needs_two_forms(self) -> None:
        """Check that extract_pair rejects spaces of other dimension."""
        a, b = self._simple(0, 1)
        with self.assertRaises(PreconditionError):
            extract_pair(LogFormSpace(self.f3, 1, (a - b,)))

    def test_moore_relation(self) -> None:
        """Check that P is a constant multiple of the Moore determinant of the numerators."""
        relation = moore_relation(self.checker)
        self.assertEqual(relation.exponent, 1)
        self.assertIsNotNone(relation.gamma)
        self.assertEqual(relation.gamma.degree, 0)
        self.assertIsNotNone(moore_relation(self.additive).gamma)

    def test_records(self) -> None:
        """Check that space records decode to the same space."""
        self.assertEqual(LogFormSpace.from_record(self.additive.to_record()), self.additive)
        record = self.additive.to_record()
        record["n"] = 3
        with self.assertRaises(PreconditionError):
            LogFormSpace.from_record(record)
