import unittest

import numpy as np

from src.logforms.constructions import additive_poly, additive_space, p2_certificate
from src.logforms.errors import NeedsLargerFieldError, PreconditionError
from src.logforms.field import field_spec
from src.logforms.forms import poles_and_residues
from src.logforms.lifting import (
    decompose_lift,
    lift_p2,
    low_bracket_vanishes,
    reduction_check_p2,
    refined_lift_shape,
)
from src.logforms.polynomial import Polynomial, moore_product, roots_exhaustive
from src.logforms.witt import WittPolynomial, WittRing


class TestDecomposeLift(unittest.TestCase):
    """Test case for F = (1 + XQ)^p + U X^m (1 + XR) + p S."""

    def __init__(self, method_name: str = "runTest") -> None:
        """Set up test case over Z/8."""
        super().__init__(method_name)
        self.checker = WittRing(2, 1, 3)

    def test_pure_lift(self) -> None:
        """Check that (1 + X)^2 + X^3 has S = 0 and Q = 1."""
        big_f = WittPolynomial(self.checker, ((1,), (2,), (1,), (1,)))
        decomposition = decompose_lift(big_f, 3)
        self.assertEqual(decomposition.q_hat.coeffs, ((1,),))
        self.assertEqual(decomposition.r_hat.coeffs, ())
        self.assertEqual(decomposition.s_hat.coeffs, ())
        self.assertEqual(decomposition.u, self.checker.one)

    def test_correction_term(self) -> None:
        """Check that 1 + 3X + 2X^2 has S = X + X^2."""
        big_f = WittPolynomial(self.checker, ((1,), (3,), (2,)))
        decomposition = decompose_lift(big_f, 1)
        self.assertEqual(decomposition.s_hat.coeffs, ((0,), (1,), (1,)))
        self.assertEqual(decomposition.to_record()["m"], 1)

    def test_random_recompositions(self) -> None:
        """Check that fifty random lifts for p = 2, 3 at precision 6 recompose exactly."""
        rng = np.random.default_rng(3)
        for trial in range(50):
            p = 2 + trial % 2
            spec = field_spec(p, int(rng.integers(1, 3)))
            ring = WittRing.over(spec, 6)
            m = int(rng.choice([j for j in range(1, 6) if j % p]))
            f = [spec.one] + [spec.random_element(rng) if j % p == 0 else spec.zero for j in range(1, m)]
            f.append(spec.random_element(rng, nonzero=True))
            f += [spec.random_element(rng) for _ in range(int(rng.integers(0, 5)))]
            coeffs = tuple(
                tuple(d + p * int(r) for d, r in zip(ring.lift_coords(c), rng.integers(0, p**5, size=spec.k)))
                for c in f
            )
            big_f = WittPolynomial(ring, coeffs)
            with self.subTest(trial=trial, p=p, k=spec.k, m=m):
                decomposition = decompose_lift(big_f, m)
                x = WittPolynomial.monomial(ring, ring.one, 1)
                one = WittPolynomial.one(ring)
                recomposed = (
                    (one + x * decomposition.q_hat) ** p
                    + WittPolynomial.monomial(ring, decomposition.u, m) * (one + x * decomposition.r_hat)
                    + decomposition.s_hat * p
                )
                self.assertEqual(recomposed, big_f)
                self.assertEqual(decomposition.u.reduce(), f[m])

    def test_preconditions(self) -> None:
        """Check the shape requirements on F mod p."""
        with self.assertRaises(PreconditionError):
            decompose_lift(WittPolynomial(self.checker, ((1,), (1,))), 2)
        with self.assertRaises(PreconditionError):
            decompose_lift(WittPolynomial(self.checker, ((2,), (1,))), 1)
        with self.assertRaises(PreconditionError):
            decompose_lift(WittPolynomial(self.checker, ((1,), (1,), (0,), (1,))), 3)


class TestRefinedLiftShape(unittest.TestCase):
    """Test case for the low-degree shape of lifts of logarithmic forms."""

    def test_translated_prime_field(self) -> None:
        """Check poles t + F_3 over F_9 and t + F_5 over F_25."""
        for p in (3, 5):
            spec = field_spec(p, 2)
            roots = [spec.t + j for j in range(p)]
            report = refined_lift_shape(roots, [1] * p)
            self.assertTrue(report.holds)
            self.assertEqual((report.m, report.bound), (p - 1, 1))
            self.assertEqual(report.to_record()["precision"], "mod p^2")

    def test_additive_form(self) -> None:
        """Check a basis form of the additive space over F_9."""
        spec = field_spec(3, 2)
        form = additive_space([spec.one, spec.t]).basis[0]
        poles = poles_and_residues(form)
        report = refined_lift_shape([d.location for d in poles], [d.residue.value for d in poles])
        self.assertTrue(report.holds)
        self.assertEqual((report.m, report.bound), (5, 2))
        self.assertFalse(report.s_reduced.coefficient(1))

    def test_p2_certificates(self) -> None:
        """Check the poles of q^2 + u z for thirty random p = 2 certificates."""
        rng = np.random.default_rng(13)
        checked = 0
        for trial in range(30):
            n = 1 + trial % 3
            spec = field_spec(2, int(rng.integers(2 if n == 1 else 3, 5)))
            xs = [spec.element(int(x)) for x in rng.choice(spec.q, size=n, replace=False)]
            u = spec.random_element(rng, nonzero=True)
            roots = [r for r, _ in roots_exhaustive(p2_certificate(xs, u))]
            if len(roots) != 2 * n:
                continue
            shift = next(a for a in spec.elements() if a not in roots)
            with self.subTest(k=spec.k, xs=[str(x) for x in xs], u=str(u)):
                report = refined_lift_shape([r - shift for r in roots], [1] * (2 * n))
                self.assertTrue(report.holds)
                self.assertEqual((report.m, report.bound), (2 * n - 1, n))
            checked += 1
        self.assertGreaterEqual(checked, 10)

    def test_class_normalization(self) -> None:
        """Check that negative classes are normalized and logged."""
        spec = field_spec(3, 2)
        roots = [spec.t + j for j in range(3)]
        with self.assertLogs("src.logforms.lifting", level="INFO"):
            report = refined_lift_shape(roots, [-2, 4, 1])
        self.assertTrue(report.holds)

    def test_preconditions(self) -> None:
        """Check zero poles, precision and divisibility of m+1."""
        spec = field_spec(5)
        with self.assertRaises(PreconditionError):
            refined_lift_shape([spec.zero, spec.one], [1, 4])
        with self.assertRaises(PreconditionError):
            refined_lift_shape([spec.one, spec.element(2)], [1, 4])
        with self.assertRaises(PreconditionError):
            refined_lift_shape([spec.one, spec.element(2)], [1, 4], N=2)
        with self.assertRaises(PreconditionError):
            refined_lift_shape([], [])


class TestLiftP2(unittest.TestCase):
    """Test case for the p = 2 lift and the reduction of its cover."""

    def _lift(self, k: int, xs, u, N: int = 6):
        spec = field_spec(2, k)
        ring = WittRing.over(spec, N)
        return lift_p2([ring.teichmuller(x) for x in xs], ring.teichmuller(u))

    def test_n1(self) -> None:
        """Check the lift of x = 1, u = t over F_4."""
        spec = field_spec(2, 2)
        lift = self._lift(2, [spec.one], spec.t)
        self.assertEqual(lift.n, 1)
        self.assertEqual(lift.alphas, ())
        self.assertEqual(lift.big_f, lift.f_tilde)
        check = reduction_check_p2(lift.big_f, 1)
        self.assertTrue(check.divisible)
        self.assertTrue(check.holds)
        self.assertEqual(check.constant.coeffs, (0, spec.t.value))

    def test_n2_over_f4(self) -> None:
        """Check the lift of x = (1, t), u = 1, whose certificate is z^4 + z."""
        spec = field_spec(2, 2)
        lift = self._lift(2, [spec.one, spec.t], spec.one)
        self.assertEqual(len(lift.points), 4)
        self.assertEqual(len(lift.alphas), 1)
        self.assertTrue(low_bracket_vanishes(lift.big_f, 2))
        check = reduction_check_p2(lift.big_f, 2)
        self.assertTrue(check.holds)
        self.assertEqual(check.to_record()["n"], 2)
        self.assertEqual(lift.big_f, lift.f_tilde)

    def test_moved_lift_needs_correction(self) -> None:
        """Check that X_1 = 3 over F_4 breaks the uncorrected product but not the corrected one."""
        spec = field_spec(2, 2)
        ring = WittRing.over(spec, 6)
        lift = lift_p2([ring.from_int(3), ring.teichmuller(spec.t)], ring.one)
        self.assertEqual(lift.epsilons[2].reduce(), spec.one)
        self.assertFalse(low_bracket_vanishes(lift.f_tilde, 2))
        check = reduction_check_p2(lift.f_tilde, 2)
        self.assertFalse(check.holds)
        self.assertFalse(check.divisible)
        self.assertEqual(lift.big_f.coefficient(1), ring.zero)
        self.assertTrue(low_bracket_vanishes(lift.big_f, 2))
        self.assertTrue(reduction_check_p2(lift.big_f, 2).holds)

    def test_split_instances(self) -> None:
        """Check every split certificate for n = 2 over F_16 and n = 3 over F_64."""
        for k, n in ((4, 2), (6, 3)):
            spec = field_spec(2, k)
            xs = [spec.t**i for i in range(n)]
            for u in spec.elements()[1:]:
                try:
                    lift = self._lift(k, xs, u)
                except NeedsLargerFieldError:
                    continue
                with self.subTest(k=k, n=n, u=str(u)):
                    self.assertTrue(low_bracket_vanishes(lift.big_f, n))
                    self.assertTrue(reduction_check_p2(lift.big_f, n).holds)

    def test_affine_subspace_instances(self) -> None:
        """Check n = 1, 2, 4 when the 2n roots form a coset s + W in F_16."""
        spec = field_spec(2, 4)
        rng = np.random.default_rng(17)
        for n, dimension in ((1, 1), (2, 2), (4, 3)):
            for _ in range(4):
                while True:
                    basis = [spec.random_element(rng) for _ in range(dimension)]
                    if not moore_product(*[Polynomial.constant(spec, b) for b in basis]).is_zero():
                        break
                shift = spec.random_element(rng)
                span = additive_poly(spec, basis)
                coset = sorted((shift + w).value for w, _ in roots_exhaustive(span))
                xs = [spec.element(x) for x in coset[:n]]
                u = span.coefficient(1)
                lift = self._lift(4, xs, u)
                with self.subTest(n=n, basis=[str(b) for b in basis], shift=str(shift)):
                    self.assertEqual(sorted(x.reduce().value for x in lift.points), coset)
                    self.assertTrue(low_bracket_vanishes(lift.big_f, n))
                    self.assertTrue(reduction_check_p2(lift.big_f, n).holds)

    def test_preconditions(self) -> None:
        """Check the requirements on p, precision, U and the points."""
        spec = field_spec(2, 2)
        with self.assertRaises(PreconditionError):
            self._lift(2, [spec.one], spec.t, N=2)
        with self.assertRaises(PreconditionError):
            self._lift(2, [spec.one, spec.one], spec.t)
        with self.assertRaises(PreconditionError):
            self._lift(2, [], spec.t)
        ring = WittRing(2, 2, 4)
        with self.assertRaises(PreconditionError):
            lift_p2([ring.one], ring.from_int(2))
        ring = WittRing(3, 1, 4)
        with self.assertRaises(PreconditionError):
            lift_p2([ring.one], ring.one)
