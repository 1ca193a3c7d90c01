import unittest

import galois

from src.logforms.coefficient_identity import (
    BivariatePoly,
    coeff_xp1_mod,
    poly_record,
    verify_all_admissible,
    verify_coefficient_identity,
)
from src.logforms.errors import PreconditionError
from src.logforms.field import field_spec
from src.logforms.polynomial import Polynomial


class TestCoefficientIdentity(unittest.TestCase):
    """Test case for the X^(p-1) coefficient identity in F_p[a]."""

    def test_p5_n2(self) -> None:
        """Check (p, n) = (5, 2), where both sides are a^10 + 3a^6 + a^2."""
        result = verify_coefficient_identity(5, 2)
        self.assertEqual((result.exponent, result.q), (14, 4))
        self.assertTrue(result.holds)
        self.assertEqual(poly_record(result.lhs)["coeffs"], [0, 0, 1, 0, 0, 0, 3, 0, 0, 0, 1])

    def test_boundary_case(self) -> None:
        """Check that n = p - 1 gives zero on both sides."""
        for p in (3, 5, 7):
            result = verify_coefficient_identity(p, p - 1)
            self.assertTrue(result.holds)
            self.assertEqual(result.q, p)
            self.assertEqual(result.lhs, galois.Poly.Zero(galois.GF(p)))

    def test_all_admissible(self) -> None:
        """Check every admissible (p, n) with p <= 13."""
        table = verify_all_admissible(13)
        self.assertEqual(list(table.columns), ["p", "n", "exponent", "q", "holds"])
        self.assertEqual(len(table), 14)
        self.assertTrue(table["holds"].all())
        self.assertNotIn(2, set(table["p"]))

    def test_preconditions(self) -> None:
        """Check that n must divide p - 1 and p must be prime."""
        with self.assertRaises(PreconditionError):
            verify_coefficient_identity(5, 3)
        with self.assertRaises(PreconditionError):
            verify_coefficient_identity(7, 1)
        with self.assertRaises(PreconditionError):
            verify_coefficient_identity(9, 2)

    def test_reduction(self) -> None:
        """Check the reduction modulo X^p - X on single powers of X."""
        self.assertEqual(coeff_xp1_mod(BivariatePoly.x_power(5, 8)), galois.Poly.One(galois.GF(5)))
        self.assertEqual(coeff_xp1_mod(BivariatePoly.x_power(5, 5)), galois.Poly.Zero(galois.GF(5)))
        self.assertEqual(BivariatePoly.x_power(5, 5).reduce().coefficient(1), galois.Poly.One(galois.GF(5)))

    def test_specialization(self) -> None:
        """Check the identity at every a in F_25 with univariate arithmetic mod X^5 - X."""
        result = verify_coefficient_identity(5, 2)
        coeffs = poly_record(result.lhs)["coeffs"]
        spec = field_spec(5, 2)
        x = Polynomial.z(spec)
        modulus = x**5 - x
        for a in spec.elements():
            power = (x + a).powmod(result.exponent, modulus)
            value = spec.zero
            for i, c in enumerate(coeffs):
                value = value + a**i * c
            self.assertEqual(power.coefficient(4), value)
