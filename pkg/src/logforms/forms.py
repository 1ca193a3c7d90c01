import logging

from dataclasses import dataclass

from src.logforms.errors import (
    FieldMismatchError,
    InternalInconsistencyError,
    NeedsLargerFieldError,
    PreconditionError,
)
from src.logforms.field import FieldElement, FieldSpec
from src.logforms.polynomial import (
    Polynomial,
    pdivmod,
    peval,
    pmul,
    psub,
    roots_exhaustive,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DifferentialForm:
    """The rational differential form (numerator / denominator) dz on P^1.

    The fraction is kept reduced with a monic denominator, so equality of
    forms is equality of the stored polynomials.
    """

    numerator: Polynomial
    denominator: Polynomial

    def __post_init__(self) -> None:
        numerator, denominator = self.numerator, self.denominator
        if numerator.spec != denominator.spec:
            raise FieldMismatchError(
                f"Numerator over {numerator.spec}, denominator over {denominator.spec}"
            )
        if denominator.is_zero():
            raise ZeroDivisionError("A differential form needs a nonzero denominator")
        if numerator.is_zero():
            denominator = Polynomial.one(denominator.spec)
        else:
            common = numerator.gcd(denominator)
            if common.degree > 0:
                numerator, denominator = numerator // common, denominator // common
            lead = denominator.leading.inverse()
            numerator, denominator = numerator.scale(lead), denominator.scale(lead)
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "denominator", denominator)

    @classmethod
    def polynomial(cls, g: Polynomial) -> "DifferentialForm":
        """The form g(z) dz."""
        return cls(g, Polynomial.one(g.spec))

    @property
    def spec(self) -> FieldSpec:
        return self.numerator.spec

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return DifferentialForm(
            self.numerator * other.denominator + other.numerator * self.denominator,
            self.denominator * other.denominator,
        )

    def __neg__(self) -> "DifferentialForm":
        return DifferentialForm(-self.numerator, self.denominator)

    def __sub__(self, other: "DifferentialForm") -> "DifferentialForm":
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other) -> "DifferentialForm":
        """Multiply by a scalar or a polynomial function."""
        if isinstance(other, (Polynomial, FieldElement, int)):
            return DifferentialForm(self.numerator * other, self.denominator)
        return NotImplemented

    __rmul__ = __mul__

    def divide(self, h: Polynomial) -> "DifferentialForm":
        return DifferentialForm(self.numerator, self.denominator * h)

    def pullback(self, phi: Polynomial) -> "DifferentialForm":
        """Pull back along t -> phi(t): (g o phi)(t) phi'(t) dt."""
        return DifferentialForm(
            self.numerator.compose(phi) * phi.derivative(),
            self.denominator.compose(phi),
        )

    def __str__(self) -> str:
        return f"({self.numerator}) / ({self.denominator}) dz"

    def to_record(self) -> dict:
        return {
            "numerator": self.numerator.to_record(),
            "denominator": self.denominator.to_record(),
        }

    @classmethod
    def from_record(cls, spec: FieldSpec, record: dict) -> "DifferentialForm":
        return cls(
            Polynomial.from_record(spec, record["numerator"]),
            Polynomial.from_record(spec, record["denominator"]),
        )


@dataclass(frozen=True)
class PoleDatum:
    """A finite pole of a form: location, order and residue."""

    location: FieldElement
    order: int
    residue: FieldElement

    def to_record(self) -> dict:
        return {
            "location": self.location.to_record(),
            "order": self.order,
            "residue": self.residue.to_record(),
        }


def dlog(f: Polynomial) -> DifferentialForm:
    """Return df/f for a nonzero polynomial f."""
    if f.is_zero():
        raise PreconditionError("dlog of the zero polynomial")
    return DifferentialForm(f.derivative(), f)


def order_at_infinity(omega: DifferentialForm) -> int:
    """Order of vanishing of omega at infinity; negative values are poles.

    In the chart x = 1/z we have dz = -dx/x^2, which gives
    deg(denominator) - deg(numerator) - 2.
    """
    if omega.is_zero():
        raise PreconditionError("The zero form has no order at infinity")
    return omega.denominator.degree - omega.numerator.degree - 2


def _series_inverse(spec: FieldSpec, a, precision: int) -> list[int]:
    """Inverse of the power series a (a[0] != 0) modulo w^precision."""
    padded = list(a) + [0] * precision
    inverse_lead = spec.inv(padded[0])
    result = [inverse_lead]
    for i in range(1, precision):
        total = 0
        for j in range(1, i + 1):
            total = spec.add(total, spec.mul(padded[j], result[i - j]))
        result.append(spec.neg(spec.mul(total, inverse_lead)))
    return result


def _residue(omega: DifferentialForm, location: int, order: int) -> int:
    spec = omega.spec
    if order == 1:
        derivative = peval(spec, omega.denominator.derivative().coeffs, location)
        return spec.div(peval(spec, omega.numerator.coeffs, location), derivative)
    shift = (location, 1)
    numerator = omega.numerator.compose(Polynomial(spec, shift)).coeffs
    denominator = omega.denominator.compose(Polynomial(spec, shift)).coeffs
    unit_part = denominator[order:]
    inverse = _series_inverse(spec, unit_part, order)
    product = pmul(spec, numerator, tuple(inverse))
    return product[order - 1] if order - 1 < len(product) else 0


def poles_and_residues(omega: DifferentialForm) -> list[PoleDatum]:
    """List the finite poles of omega with orders and residues.

    The residue at a pole x0 of order e is the coefficient of w^(e-1) in the
    expansion of N(x0 + w) / (D(x0 + w) / w^e); for a simple pole this is
    N(x0) / D'(x0).

    Args:
        omega: A differential form whose denominator splits over its field.

    Returns:
        One PoleDatum per distinct finite pole, ordered by encoded location.

    Raises:
        NeedsLargerFieldError: The denominator does not split.
    """
    denominator = omega.denominator
    if denominator.degree <= 0:
        return []
    roots = roots_exhaustive(denominator)
    if sum(m for _, m in roots) != denominator.degree:
        raise NeedsLargerFieldError(
            f"Denominator {denominator} does not split over F_{omega.spec.p}^{omega.spec.k}"
        )
    return [
        PoleDatum(root, order, FieldElement(omega.spec, _residue(omega, root.value, order)))
        for root, order in roots
    ]


def cartier(omega: DifferentialForm) -> DifferentialForm:
    """Apply the Cartier operator.

    Writes omega = N D^(p-1) / D^p dz, keeps the coefficients of N D^(p-1) at
    exponents congruent to p-1 mod p, takes their p-th roots and divides by D.
    """
    spec = omega.spec
    p = spec.p
    expanded = (omega.numerator * omega.denominator ** (p - 1)).coeffs
    extracted = tuple(
        spec.frobenius_inverse(expanded[j]) for j in range(p - 1, len(expanded), p)
    )
    return DifferentialForm(Polynomial(spec, extracted), omega.denominator)


def derivative_criterion(omega: DifferentialForm) -> bool:
    """Check (N D^(p-1))^((p-1)) = -N^p, the derivative form of C omega = omega."""
    p = omega.spec.p
    numerator = omega.numerator
    lifted = numerator * omega.denominator ** (p - 1)
    return lifted.derivative(p - 1) == -numerator.frobenius()


def residue_congruence(omega: DifferentialForm) -> bool:
    """Check N^p D' = N D'^p mod D: every residue N/D' at a root of D lies in F_p.

    Only meaningful for squarefree D with deg N < deg D.
    """
    numerator, denominator = omega.numerator, omega.denominator
    derivative = denominator.derivative()
    spec = omega.spec
    difference = psub(
        spec,
        pmul(spec, numerator.frobenius().coeffs, derivative.coeffs),
        pmul(spec, numerator.coeffs, derivative.frobenius().coeffs),
    )
    return not pdivmod(spec, difference, denominator.coeffs)[1]


def is_logarithmic(omega: DifferentialForm) -> bool:
    """Decide whether omega = df/f for some rational f.

    The verdict is the Cartier fixed point test. The derivative criterion is
    always evaluated alongside it, and the residue congruence too when the
    denominator is squarefree and the fraction proper; any disagreement is
    raised as an internal inconsistency.
    """
    verdict = cartier(omega) == omega
    if derivative_criterion(omega) != verdict:
        raise InternalInconsistencyError(
            f"Cartier and derivative criteria disagree on {omega}"
        )
    denominator = omega.denominator
    if (
        denominator.degree > 0
        and omega.numerator.degree < denominator.degree
        and denominator.is_squarefree()
        and residue_congruence(omega) != verdict
    ):
        raise InternalInconsistencyError(
            f"Cartier and residue criteria disagree on {omega}"
        )
    return verdict


def log_derivative_from_roots(spec: FieldSpec, roots, multiplicities) -> DifferentialForm:
    """Return sum h_i dz / (z - x_i).

    Args:
        spec: The field.
        roots: Distinct locations x_i.
        multiplicities: Integers h_i, each prime to p.

    Returns:
        The reduced form, equal to df/f for f = prod (z - x_i)^h_i.
    """
    roots = [r if isinstance(r, FieldElement) else FieldElement(spec, spec.from_int(r)) for r in roots]
    if len(roots) != len(multiplicities):
        raise PreconditionError(
            f"{len(roots)} roots but {len(multiplicities)} multiplicities"
        )
    if len({r.value for r in roots}) != len(roots):
        raise PreconditionError("Repeated pole location in log_derivative")
    for h in multiplicities:
        if h % spec.p == 0:
            raise PreconditionError(f"Multiplicity {h} is divisible by p = {spec.p}")
    denominator = Polynomial.from_roots(spec, roots)
    numerator = Polynomial.zero(spec)
    for root, h in zip(roots, multiplicities):
        cofactor = denominator // Polynomial.from_roots(spec, [root])
        numerator = numerator + cofactor.scale(h)
    return DifferentialForm(numerator, denominator)


def log_derivative(f: Polynomial, multiplicities) -> DifferentialForm:
    """Return sum h_i dz / (z - x_i) over the roots x_i of a squarefree f.

    Args:
        f: Squarefree polynomial whose roots are the x_i.
        multiplicities: Either one integer applied to every root (no root
            finding needed, the result is h f'/f), or one integer per root,
            matched with the roots of f in increasing encoded order.

    Returns:
        The reduced DifferentialForm.
    """
    spec = f.spec
    multiplicities = list(multiplicities)
    if f.degree < 1:
        raise PreconditionError("log_derivative needs a nonconstant polynomial")
    if not f.is_squarefree():
        raise PreconditionError(f"{f} has a repeated root")
    if len(multiplicities) == 1:
        h = multiplicities[0]
        if h % spec.p == 0:
            raise PreconditionError(f"Multiplicity {h} is divisible by p = {spec.p}")
        return dlog(f) * h
    if len(multiplicities) != f.degree:
        raise PreconditionError(
            f"Expected 1 or {f.degree} multiplicities, got {len(multiplicities)}"
        )
    roots = roots_exhaustive(f)
    if len(roots) != f.degree:
        raise NeedsLargerFieldError(f"{f} does not split over F_{spec.p}^{spec.k}")
    return log_derivative_from_roots(spec, [r for r, _ in roots], multiplicities)
