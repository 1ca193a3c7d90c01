import logging

from dataclasses import dataclass

from src.logforms.constructions import p2_certificate
from src.logforms.errors import (
    InternalInconsistencyError,
    NeedsLargerFieldError,
    PreconditionError,
)
from src.logforms.field import FieldElement
from src.logforms.forms import log_derivative_from_roots, order_at_infinity
from src.logforms.polynomial import Polynomial, roots_exhaustive
from src.logforms.witt import (
    RamifiedElement,
    RamifiedWittRing,
    WittElement,
    WittPolynomial,
    WittRing,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LiftDecomposition:
    """F = (1 + X Q)^p + U X^m (1 + X R) + p S over W_N(F_{p^k}).

    Q, U and R are Teichmuller lifts of data read off f = F mod p; S is the
    exact quotient by p, determined modulo p^(N-1).
    """

    q_hat: WittPolynomial
    u: WittElement
    r_hat: WittPolynomial
    s_hat: WittPolynomial
    m: int

    def to_record(self) -> dict:
        return {
            "m": self.m,
            "Q": self.q_hat.to_record(),
            "U": self.u.to_record(),
            "R": self.r_hat.to_record(),
            "S": self.s_hat.to_record(),
        }


def _teichmuller_polynomial(ring: WittRing, elements) -> WittPolynomial:
    return WittPolynomial(ring, tuple(ring.teichmuller_coords(x) for x in elements))


def decompose_lift(big_f: WittPolynomial, m: int) -> LiftDecomposition:
    """Split a lift F of f = 1 + ... into its p-th power part and the rest.

    With f = g^p + h, g^p collecting the exponents divisible by p and h the
    others, h must start at x^m: f = (1 + x q)^p + u x^m (1 + x r).

    Args:
        big_f: F with F(0) = 1 mod p.
        m: Order of the first coefficient of f at an exponent prime to p.

    Returns:
        A LiftDecomposition.
    """
    ring = big_f.ring
    spec, p = ring.spec, ring.p
    f = big_f.reduce()
    if m < 1 or m % p == 0:
        raise PreconditionError(f"m = {m} must be positive and prime to p = {p}")
    if f.coefficient(0) != spec.one:
        raise PreconditionError("F mod p must have constant term 1")
    if any(f.coefficient(j) for j in range(1, m) if j % p):
        raise PreconditionError(f"f has a coefficient below x^{m} at an exponent prime to p")
    lead = f.coefficient(m)
    if not lead:
        raise PreconditionError(f"f has no x^{m} term")
    g = [f.coefficient(i * p).frobenius_inverse() for i in range(f.degree // p + 1)]
    q_hat = _teichmuller_polynomial(ring, g[1:])
    r_tilde = [
        f.coefficient(j) / lead if j % p else spec.zero for j in range(m + 1, f.degree + 1)
    ]
    r_hat = _teichmuller_polynomial(ring, r_tilde)
    u = ring.teichmuller(lead)
    x = WittPolynomial.monomial(ring, ring.one, 1)
    one = WittPolynomial.one(ring)
    recomposed = (one + x * q_hat) ** p + WittPolynomial.monomial(ring, u, m) * (one + x * r_hat)
    difference = big_f - recomposed
    if not difference.divisible_by(p):
        raise InternalInconsistencyError("F minus its Teichmuller recomposition is not divisible by p")
    s_hat = difference.divide_exact(p)
    if recomposed + s_hat * p != big_f:
        raise InternalInconsistencyError("Recomposition with p S does not give back F")
    return LiftDecomposition(q_hat, u, r_hat, s_hat, m)


@dataclass(frozen=True)
class ShapeReport:
    """Low-degree vanishing of S mod p for the refined lift of a form.

    Attributes:
        bound: ceil((m+1)/p); S mod p must vanish below this degree.
        s_reduced: S mod p.
        big_f: prod (1 - Y_i^p X)^h_i.
    """

    p: int
    m: int
    bound: int
    holds: bool
    s_reduced: Polynomial
    big_f: WittPolynomial
    decomposition: LiftDecomposition

    def to_record(self) -> dict:
        return {
            "p": self.p,
            "m": self.m,
            "bound": self.bound,
            "holds": self.holds,
            "precision": "mod p^2",
            "S_mod_p": self.s_reduced.to_record(),
            "F": self.big_f.to_record(),
            "decomposition": self.decomposition.to_record(),
        }


def refined_lift_shape(roots: list[FieldElement], classes, N: int = 6) -> ShapeReport:
    """Check the shape of the lift F = prod (1 - Y_i^p X)^h_i of a logarithmic form.

    Y_i is the Teichmuller lift of the p-th root of x_i. Writing F as in
    decompose_lift, S mod p has no terms below degree (m+1)/p. Reduction
    of (a + pb)^p mod p^2 only depends on a, so the check does not depend on
    the choice of lifts.

    Args:
        roots: Nonzero distinct poles x_0..x_m of sum h_i dz/(z - x_i), which
            must vanish to order m-1 at infinity.
        classes: Integers h_i prime to p; normalized to [1, p-1].
        N: Witt precision, at least 3.

    Returns:
        A ShapeReport.
    """
    if not roots:
        raise PreconditionError("Need at least one pole")
    spec = roots[0].spec
    p = spec.p
    if N < 3:
        raise PreconditionError(f"Precision N = {N} must be at least 3")
    normalized = [int(h) % p for h in classes]
    if list(classes) != normalized:
        logger.info("classes %s normalized to %s", list(classes), normalized)
    if any(not x for x in roots):
        raise PreconditionError("Poles must be nonzero; translate so that none sits at z = 0")
    omega = log_derivative_from_roots(spec, roots, normalized)
    m = len(roots) - 1
    if omega.denominator.degree != m + 1 or order_at_infinity(omega) != m - 1:
        raise PreconditionError(f"The form does not have {m + 1} poles and a zero of order {m - 1} at infinity")
    if (m + 1) % p:
        raise PreconditionError(f"m+1 = {m + 1} is not divisible by p = {p}")
    ring = WittRing.over(spec, N)
    x = WittPolynomial.monomial(ring, ring.one, 1)
    one = WittPolynomial.one(ring)
    big_f = one
    for root, h in zip(roots, normalized):
        y = ring.teichmuller(root.frobenius_inverse())
        big_f = big_f * (one - x * (y**p)) ** h
    decomposition = decompose_lift(big_f, m)
    s_reduced = decomposition.s_hat.reduce()
    bound = -(-(m + 1) // p)
    holds = all(not s_reduced.coefficient(j) for j in range(bound))
    if not holds:
        raise InternalInconsistencyError(f"S mod p has terms below degree {bound}: {s_reduced}")
    return ShapeReport(p, m, bound, holds, s_reduced, big_f, decomposition)


def _square_root_lift(ring: WittRing, f: Polynomial, n: int) -> WittPolynomial:
    """Q with Q^2 = sum of the even part of f mod 2, from Teichmuller lifts of square roots."""
    return _teichmuller_polynomial(ring, [f.coefficient(2 * i).frobenius_inverse() for i in range(n + 1)])


def _check_p2_shape(f: Polynomial, n: int) -> None:
    e = 2 * n - 1
    if f.degree > 2 * n or f.coefficient(0) != f.spec.one:
        raise PreconditionError(f"f = {f} must have degree at most {2 * n} and f(0) = 1")
    if any(f.coefficient(j) for j in range(1, e, 2)):
        raise PreconditionError(f"f = {f} has odd terms below x^{e}")
    if not f.coefficient(e):
        raise PreconditionError(f"f = {f} has no x^{e} term")


def _solve_unit_system(ring: WittRing, matrix, rhs) -> list[tuple[int, ...]]:
    """Gaussian elimination over W_N with unit pivots."""
    size = len(rhs)
    rows = [list(row) + [value] for row, value in zip(matrix, rhs)]
    for column in range(size):
        pivot = next((r for r in range(column, size) if ring.residue(rows[r][column])), None)
        if pivot is None:
            raise InternalInconsistencyError("Vandermonde system has no unit pivot")
        rows[column], rows[pivot] = rows[pivot], rows[column]
        inverse = ring.invert(rows[column][column])
        rows[column] = [ring.mul(c, inverse) for c in rows[column]]
        for r in range(size):
            if r != column and any(rows[r][column]):
                factor = rows[r][column]
                rows[r] = [ring.sub(c, ring.mul(factor, d)) for c, d in zip(rows[r], rows[column])]
    return [row[-1] for row in rows]


@dataclass(frozen=True)
class P2Lift:
    """A lift F = prod (1 - X_i X - 2 eps_i X) of f = prod (1 - x_i x) for p = 2.

    Attributes:
        points: X_1..X_2n; the last n are Teichmuller lifts of the roots
            added by the residue problem.
        alphas: alpha_k = [X^(k+1)](-R / Q^2) for k = 0..n-2.
        epsilons: Corrections eps_1..eps_2n, zero outside n+1..2n-1.
    """

    n: int
    u: WittElement
    points: tuple[WittElement, ...]
    f_tilde: WittPolynomial
    q_hat: WittPolynomial
    r_hat: WittPolynomial
    alphas: tuple[WittElement, ...]
    epsilons: tuple[WittElement, ...]
    big_f: WittPolynomial

    def to_record(self) -> dict:
        return {
            "n": self.n,
            "U": self.u.to_record(),
            "points": [x.to_record() for x in self.points],
            "alphas": [a.to_record() for a in self.alphas],
            "epsilons": [e.to_record() for e in self.epsilons],
            "F_tilde": self.f_tilde.to_record(),
            "F": self.big_f.to_record(),
        }


def _product_of_linear(ring: WittRing, slopes) -> WittPolynomial:
    one = WittPolynomial.one(ring)
    x = WittPolynomial.monomial(ring, ring.one, 1)
    result = one
    for slope in slopes:
        result = result * (one - x * slope)
    return result


def lift_p2(xs: list[WittElement], u: WittElement) -> P2Lift:
    """Lift the p = 2 certificate to characteristic zero, correcting the extra roots.

    Over F_{2^k} the residues x_i and u give f_1 = q^2 + u z with roots
    x_1..x_n, y_1..y_n. With F~ = prod (1 - X_i X) over the lifts, the low
    coefficients of (F~ - Q^2 - U X^(2n-1))/2 are cancelled by moving
    X_(n+1)..X_(2n-1) by 2 eps_i, with sum eps_i X_i^k = -alpha_k.

    Args:
        xs: Lifts X_1..X_n with distinct residues.
        u: A unit U.

    Returns:
        A P2Lift.
    """
    if not xs:
        raise PreconditionError("Need at least one point")
    ring = u.ring
    if ring.p != 2:
        raise PreconditionError(f"lift_p2 needs p = 2, got p = {ring.p}")
    if ring.N < 3:
        raise PreconditionError(f"Precision N = {ring.N} must be at least 3")
    if not u.is_unit():
        raise PreconditionError("U must be a unit")
    n = len(xs)
    residues = [x.reduce() for x in xs]
    if len({r.value for r in residues}) != n:
        raise PreconditionError("Points collide mod 2")
    certificate = p2_certificate(residues, u.reduce())
    roots = roots_exhaustive(certificate)
    extra = [r for r, _ in roots if r.value not in {x.value for x in residues}]
    if len(roots) != 2 * n or len(extra) != n:
        raise NeedsLargerFieldError(f"{certificate} does not split over F_2^{ring.k}")
    points = tuple(xs) + tuple(ring.teichmuller(y) for y in extra)
    f_tilde = _product_of_linear(ring, points)
    f = f_tilde.reduce()
    _check_p2_shape(f, n)
    e = 2 * n - 1
    if f.coefficient(e) != u.reduce():
        raise InternalInconsistencyError("The x^(2n-1) coefficient of f is not u")
    q_hat = _square_root_lift(ring, f, n)
    bracket = f_tilde - q_hat * q_hat - WittPolynomial.monomial(ring, u, e)
    r_hat = bracket.divide_exact(2)
    series = (-r_hat) * (q_hat * q_hat).series_inverse(n)
    alphas = tuple(series.coefficient(j + 1) for j in range(n - 1))
    unknowns = points[n : 2 * n - 1]
    matrix = [[(x**j).coords for x in unknowns] for j in range(n - 1)]
    solution = _solve_unit_system(ring, matrix, [(-a).coords for a in alphas])
    epsilons = [ring.zero] * n + [WittElement(ring, c) for c in solution] + [ring.zero]
    for j, alpha in enumerate(alphas):
        total = ring.zero
        for eps, x in zip(epsilons[n:], unknowns):
            total = total + eps * x**j
        if total != -alpha:
            raise InternalInconsistencyError(f"Correction fails the equation of degree {j}")
    big_f = _product_of_linear(ring, [x + eps * 2 for x, eps in zip(points, epsilons)])
    if big_f.reduce() != f:
        raise InternalInconsistencyError("The corrected lift changes F mod 2")
    return P2Lift(n, u, points, f_tilde, q_hat, r_hat, alphas, tuple(epsilons), big_f)


def low_bracket_vanishes(big_f: WittPolynomial, n: int) -> bool:
    """F - Q^2 vanishes mod 4 in degrees 1..n-1, Q lifting the even part of F mod 2."""
    f = big_f.reduce()
    _check_p2_shape(f, n)
    q_hat = _square_root_lift(big_f.ring, f, n)
    difference = big_f - q_hat * q_hat
    return all(difference.coefficient(j).divisible_by(4) for j in range(1, n))


@dataclass(frozen=True)
class ReductionCheck:
    """Reduction of the rescaled equation Z^2 + Q(pi^2 T) Z + C(T) mod pi.

    Attributes:
        holds: The reduction is z^2 + z + u t^(2n-1) over F_{2^k}.
        divisible: C(T) = (Q^2 - F)(pi^2 T)/4 has integral coefficients.
        linear: Reduction of Q(pi^2 T), a polynomial in t.
        constant: Reduction of C(T), a polynomial in t.
    """

    n: int
    holds: bool
    divisible: bool
    linear: Polynomial | None
    constant: Polynomial | None

    def to_record(self) -> dict:
        return {
            "n": self.n,
            "holds": self.holds,
            "divisible": self.divisible,
            "linear": self.linear.to_record() if self.linear is not None else None,
            "constant": self.constant.to_record() if self.constant is not None else None,
        }


def reduction_check_p2(big_f: WittPolynomial, n: int) -> ReductionCheck:
    """Check that the cover Z^2 = F, rescaled by pi^(2n-1) = -2, has good reduction.

    Substituting Y = Q + 2Z and X = pi^2 T in Y^2 = F gives
    Z^2 + Q Z - (F - Q^2)/4 over R = W[pi]; the reduction must be the
    Artin-Schreier equation z^2 + z = u t^(2n-1).

    Args:
        big_f: F with F mod 2 of the shape q(x)^2 + u x^(2n-1).
        n: Half the degree bound.

    Returns:
        A ReductionCheck.
    """
    ring = big_f.ring
    if ring.p != 2:
        raise PreconditionError("reduction_check_p2 needs p = 2")
    if ring.N < 3:
        raise PreconditionError(f"Precision N = {ring.N} must be at least 3")
    e = 2 * n - 1
    f = big_f.reduce()
    _check_p2_shape(f, n)
    spec = ring.spec
    ramified = RamifiedWittRing(ring, e)
    q_hat = _square_root_lift(ring, f, n)
    difference = q_hat * q_hat - big_f
    constant_terms: list[RamifiedElement] = []
    divisible = True
    for j in range(difference.degree + 1):
        term = ramified.from_base(difference.coefficient(j)) * ramified.pi_power(2 * j)
        if not term.divisible_by(4):
            divisible = False
            break
        constant_terms.append(term.divide_exact(4))
    if not divisible:
        return ReductionCheck(n, False, False, None, None)
    linear_terms = [
        ramified.from_base(q_hat.coefficient(j)) * ramified.pi_power(2 * j)
        for j in range(q_hat.degree + 1)
    ]
    linear = Polynomial(spec, tuple(t.reduce().value for t in linear_terms))
    constant = Polynomial(spec, tuple(t.reduce().value for t in constant_terms))
    expected = Polynomial.monomial(spec, f.coefficient(e), e)
    holds = linear == Polynomial.one(spec) and constant == expected
    logger.debug("reduction of the rescaled cover: z^2 + (%s) z + (%s)", linear, constant)
    return ReductionCheck(n, holds, True, linear, constant)
