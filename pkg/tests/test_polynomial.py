import unittest

from hypothesis import assume, given, settings

from src.logforms.errors import FieldMismatchError, PreconditionError
from src.logforms.field import field_spec
from src.logforms.polynomial import (
    Polynomial,
    embed_field,
    moore_product,
    pth_root_coeffwise,
    roots_exhaustive,
    splits,
)
from tests.strategies import field_and_polynomials


class TestPolynomial(unittest.TestCase):
    """Test case for Polynomial and the module-level helpers."""

    def __init__(self, method_name: str = "runTest") -> None:
        """Set up test case over F_5 and F_9."""
        super().__init__(method_name)
        self.checker = field_spec(5)
        self.f9 = field_spec(3, 2)
        self.z = Polynomial.z(self.checker)

    def test_trimming(self) -> None:
        """Check that trailing zero coefficients are dropped."""
        poly = Polynomial(self.checker, (1, 2, 0, 0))
        self.assertEqual(poly.coeffs, (1, 2))
        self.assertEqual(poly.degree, 1)
        self.assertEqual(Polynomial.zero(self.checker).degree, -1)

    def test_roots_exhaustive(self) -> None:
        """Check roots and multiplicities of (z - 1)^2 (z - 2)."""
        f = (self.z - 1) ** 2 * (self.z - 2)
        roots = [(root.value, multiplicity) for root, multiplicity in roots_exhaustive(f)]
        self.assertEqual(roots, [(1, 2), (2, 1)])
        self.assertTrue(splits(f))
        self.assertFalse(splits(self.z**2 - 2))
        with self.assertRaises(PreconditionError):
            roots_exhaustive(Polynomial.zero(self.checker))

    def test_is_squarefree(self) -> None:
        """Check the squarefree test on separable and inseparable inputs."""
        self.assertTrue((self.z**5 - self.z).is_squarefree())
        self.assertFalse(((self.z - 1) ** 2).is_squarefree())
        self.assertFalse((self.z**5 + 1).is_squarefree())
        self.assertTrue(Polynomial.one(self.checker).is_squarefree())
        self.assertFalse(Polynomial.zero(self.checker).is_squarefree())

    def test_moore_product(self) -> None:
        """Check that moore_product(z, 1) is z^p - z and vanishes on dependent input."""
        one = Polynomial.one(self.checker)
        self.assertEqual(moore_product(self.z, one), self.z**5 - self.z)
        self.assertTrue(moore_product(self.z, self.z.scale(3)).is_zero())
        a = Polynomial.constant(self.f9, self.f9.one)
        b = Polynomial.constant(self.f9, self.f9.t)
        self.assertFalse(moore_product(a, b).is_zero())
        self.assertTrue(moore_product(a, b, a + b).is_zero())

    def test_moore_product_two_arguments(self) -> None:
        """Check that moore_product(A, B) = A^p B - A B^p."""
        a = self.z**2 + 1
        b = self.z + 3
        self.assertEqual(moore_product(a, b), a**5 * b - a * b**5)

    @given(field_and_polynomials(count=2, max_degree=6))
    @settings(max_examples=150, deadline=None)
    def test_divmod(self, instance) -> None:
        """Check that divmod satisfies a = q b + r with deg r < deg b."""
        _, a, b = instance
        assume(not b.is_zero())
        quotient, remainder = divmod(a, b)
        self.assertEqual(quotient * b + remainder, a)
        self.assertLess(remainder.degree, b.degree)

    @given(field_and_polynomials(count=2, max_degree=5))
    @settings(max_examples=100, deadline=None)
    def test_gcd_and_frobenius(self, instance) -> None:
        """Check that gcd divides both arguments and frobenius is the p-th power."""
        spec, a, b = instance
        g = a.gcd(b)
        if not g.is_zero():
            self.assertTrue((a % g).is_zero())
            self.assertTrue((b % g).is_zero())
        self.assertEqual(a.frobenius(), a**spec.p)
        self.assertEqual(pth_root_coeffwise(a).frobenius().coeffs[:: spec.p], a.coeffs)

    @given(field_and_polynomials(count=2, max_degree=4))
    @settings(max_examples=100, deadline=None)
    def test_compose_and_evaluate(self, instance) -> None:
        """Check that composition agrees with evaluation."""
        spec, a, b = instance
        composed = a.compose(b)
        for x in spec.elements()[:5]:
            self.assertEqual(composed(x), a(b(x)))

    def test_derivative(self) -> None:
        """Check first and p-th derivatives over F_5."""
        f = self.z**7 + self.z**3 * 2 + 1
        self.assertEqual(f.derivative(), self.z**6 * 2 + self.z**2)
        self.assertTrue(f.derivative(5).is_zero())
        self.assertTrue((self.z**10 + 3).derivative().is_zero())

    def test_division_by_zero(self) -> None:
        """Check that dividing by the zero polynomial raises ZeroDivisionError."""
        with self.assertRaises(ZeroDivisionError):
            divmod(self.z, Polynomial.zero(self.checker))

    def test_field_mismatch(self) -> None:
        """Check that polynomials over different fields do not combine."""
        with self.assertRaises(FieldMismatchError):
            self.z + Polynomial.z(self.f9)

    def test_from_roots(self) -> None:
        """Check that from_roots is monic with the given roots."""
        roots = [self.f9.t, self.f9.t + 1, self.f9.one]
        f = Polynomial.from_roots(self.f9, roots)
        self.assertEqual(f.degree, 3)
        self.assertEqual(f.leading, self.f9.one)
        self.assertTrue(all(not f(root) for root in roots))

    def test_records(self) -> None:
        """Check that polynomial records decode to the same polynomial."""
        f = Polynomial.from_elements(self.f9, [self.f9.t, 0, 2])
        self.assertEqual(Polynomial.from_record(self.f9, f.to_record()), f)
        self.assertEqual(str(f), "2*z^2 + t")

    def test_embed_field(self) -> None:
        """Check that embedding F_9 into F_81 is an injective ring homomorphism."""
        target = field_spec(3, 4)
        embed = embed_field(self.f9, target)
        images = {embed(x).value for x in self.f9.elements()}
        self.assertEqual(len(images), 9)
        for a in self.f9.elements():
            for b in self.f9.elements():
                self.assertEqual(embed(a * b), embed(a) * embed(b))
                self.assertEqual(embed(a + b), embed(a) + embed(b))
        with self.assertRaises(PreconditionError):
            embed_field(self.f9, field_spec(3, 3))
