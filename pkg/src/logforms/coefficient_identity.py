import logging
import math

import galois
import pandas as pd

from dataclasses import dataclass

from src.logforms.errors import InternalInconsistencyError, PreconditionError

logger = logging.getLogger(__name__)


class BivariatePoly:
    """A polynomial in X with coefficients in F_p[a], reduced modulo X^p - X.

    Attributes:
        p: The prime.
        coeffs: galois.Poly coefficients over GF(p), index i holding X^i.
    """

    def __init__(self, p: int, coeffs: list[galois.Poly]) -> None:
        self.p = p
        self.field = galois.GF(p)
        self.coeffs = list(coeffs) or [galois.Poly.Zero(self.field)]

    @classmethod
    def x_plus_a(cls, p: int) -> "BivariatePoly":
        gf = galois.GF(p)
        return cls(p, [galois.Poly([1, 0], field=gf), galois.Poly.One(gf)])

    @classmethod
    def x_power(cls, p: int, exponent: int) -> "BivariatePoly":
        gf = galois.GF(p)
        coeffs = [galois.Poly.Zero(gf)] * exponent + [galois.Poly.One(gf)]
        return cls(p, coeffs)

    def reduce(self) -> "BivariatePoly":
        """Fold X^d onto X^(d-p+1) until the degree is below p."""
        coeffs = list(self.coeffs)
        for d in range(len(coeffs) - 1, self.p - 1, -1):
            coeffs[d - self.p + 1] = coeffs[d - self.p + 1] + coeffs[d]
        return BivariatePoly(self.p, coeffs[: self.p])

    def __mul__(self, other: "BivariatePoly") -> "BivariatePoly":
        product = [galois.Poly.Zero(self.field)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, c in enumerate(self.coeffs):
            if _is_zero(c):
                continue
            for j, d in enumerate(other.coeffs):
                product[i + j] = product[i + j] + c * d
        return BivariatePoly(self.p, product).reduce()

    def __pow__(self, exponent: int) -> "BivariatePoly":
        result = BivariatePoly(self.p, [galois.Poly.One(self.field)])
        base = self.reduce()
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def coefficient(self, i: int) -> galois.Poly:
        if i < len(self.coeffs):
            return self.coeffs[i]
        return galois.Poly.Zero(self.field)


def _is_zero(poly: galois.Poly) -> bool:
    return poly == galois.Poly.Zero(poly.field)


def coeff_xp1_mod(expression: BivariatePoly) -> galois.Poly:
    """Coefficient of X^(p-1) after reducing modulo X^p - X."""
    return expression.reduce().coefficient(expression.p - 1)


def poly_text(poly: galois.Poly, variable: str = "a") -> str:
    """Render a galois polynomial in the given variable."""
    return str(poly).replace("x", variable)


def poly_record(poly: galois.Poly) -> dict:
    return {
        "coeffs": [int(c) for c in poly.coeffs[::-1]],
        "text": poly_text(poly),
    }


@dataclass(frozen=True)
class CoefficientIdentity:
    """Both sides of the X^(p-1) coefficient identity for (p, n).

    Attributes:
        exponent: E = (np - (n+1))(p-1)/n.
        q: ((n-1)p + n + 1)/n.
        lhs: Coefficient of X^(p-1) in (X + a)^E mod X^p - X.
        rhs: binom(q, 2) (a - a^p)^(q-2).
    """

    p: int
    n: int
    exponent: int
    q: int
    lhs: galois.Poly
    rhs: galois.Poly

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs

    def to_record(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "exponent": self.exponent,
            "q": self.q,
            "holds": self.holds,
            "lhs": poly_record(self.lhs),
            "rhs": poly_record(self.rhs),
        }


def verify_coefficient_identity(p: int, n: int) -> CoefficientIdentity:
    """Compare [X^(p-1)] (X + a)^E mod X^p - X with binom(q,2)(a - a^p)^(q-2) in F_p[a].

    Args:
        p: A prime.
        n: Divisor of p - 1 with n >= 2.

    Returns:
        A CoefficientIdentity; the boundary case n = p - 1 gives zero on
        both sides.
    """
    if not galois.is_prime(p):
        raise PreconditionError(f"p = {p} is not prime")
    if n < 2 or (p - 1) % n:
        raise PreconditionError(f"n = {n} must be at least 2 and divide p - 1 = {p - 1}")
    exponent = (n * p - (n + 1)) * (p - 1) // n
    q = ((n - 1) * p + n + 1) // n
    if exponent != p * (p - 3) + q:
        raise InternalInconsistencyError(f"E = {exponent} differs from p(p-3) + q = {p * (p - 3) + q}")
    gf = galois.GF(p)
    lhs = coeff_xp1_mod(BivariatePoly.x_plus_a(p) ** exponent)
    a = galois.Poly([1, 0], field=gf)
    rhs = galois.Poly([math.comb(q, 2) % p], field=gf) * (a - a**p) ** (q - 2)
    result = CoefficientIdentity(p, n, exponent, q, lhs, rhs)
    if n == p - 1 and not (_is_zero(result.lhs) and _is_zero(result.rhs)):
        raise InternalInconsistencyError(f"Boundary case p = {p}, n = {n} is not zero on both sides")
    logger.info("coefficient identity p=%d n=%d: %s", p, n, result.holds)
    return result


def verify_all_admissible(p_max: int = 13) -> pd.DataFrame:
    """Check the identity for every odd prime p <= p_max and every n >= 2 dividing p - 1.

    Returns:
        A pandas data frame with columns p, n, exponent, q, holds.
    """
    rows = []
    for p in galois.primes(p_max):
        if p == 2:
            continue
        for n in range(2, p):
            if (p - 1) % n == 0:
                result = verify_coefficient_identity(int(p), n)
                rows.append(
                    {"p": int(p), "n": n, "exponent": result.exponent, "q": result.q, "holds": result.holds}
                )
    return pd.DataFrame(rows, columns=["p", "n", "exponent", "q", "holds"])
