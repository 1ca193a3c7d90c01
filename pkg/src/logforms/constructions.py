import logging

import numpy as np

from collections import Counter
from dataclasses import dataclass

from src.logforms.errors import (
    DependentBasisError,
    InternalInconsistencyError,
    NeedsLargerFieldError,
    PreconditionError,
)
from src.logforms.field import FieldElement, FieldSpec
from src.logforms.forms import DifferentialForm, poles_and_residues
from src.logforms.polynomial import Polynomial, moore_product, splits
from src.logforms.spaces import LogFormSpace, projective_combinations, validate_space

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HurwitzDatum:
    """Residue classes (h_i) in F_p*, summing to zero mod p.

    Classes are stored as integers in [1, p).
    """

    p: int
    classes: tuple[int, ...]

    def __post_init__(self) -> None:
        classes = tuple(int(h) % self.p for h in self.classes)
        if not classes:
            raise PreconditionError("A Hurwitz datum needs at least one class")
        if any(h == 0 for h in classes):
            raise PreconditionError(f"Hurwitz classes {self.classes} contain a multiple of p = {self.p}")
        if sum(classes) % self.p:
            raise PreconditionError(
                f"Hurwitz classes {self.classes} sum to {sum(classes)}, not 0 mod {self.p}"
            )
        object.__setattr__(self, "classes", classes)

    @property
    def m(self) -> int:
        return len(self.classes) - 1

    def to_record(self) -> dict:
        return {"p": self.p, "classes": list(self.classes)}

    @classmethod
    def from_record(cls, record: dict) -> "HurwitzDatum":
        return cls(int(record["p"]), tuple(int(h) for h in record["classes"]))


def _check_distinct(points: list[FieldElement], name: str) -> None:
    if len({x.value for x in points}) != len(points):
        raise PreconditionError(f"Repeated {name}: {[str(x) for x in points]}")


def _p2_root_polynomial(xs: list[FieldElement], u: FieldElement) -> Polynomial:
    """Monic q of degree n with q(x_i) = sqrt(u x_i), from a Vandermonde solve."""
    spec = u.spec
    n = len(xs)
    gf = spec.galois_field
    vandermonde = gf([[spec.pow(x.value, j) for j in range(n)] for x in xs])
    targets = gf(
        [
            spec.sub(spec.frobenius_inverse(spec.mul(u.value, x.value)), spec.pow(x.value, n))
            for x in xs
        ]
    )
    solution = np.array(np.linalg.solve(vandermonde, targets), dtype=int).tolist()
    return Polynomial(spec, tuple(solution) + (1,))


def p2_certificate(xs: list[FieldElement], u: FieldElement) -> Polynomial:
    """Return f = q^2 + u z with q monic of degree n and q(x_i) = sqrt(u x_i).

    Then f(x_i) = 0 and f' = u, so u dz / f is logarithmic with residue 1 at
    each of its 2n simple poles.

    Args:
        xs: Distinct points x_1..x_n of F_{2^k}.
        u: A nonzero element.

    Returns:
        The polynomial f.
    """
    if u.spec.p != 2:
        raise PreconditionError(f"The Vandermonde construction needs p = 2, got p = {u.spec.p}")
    if not xs:
        raise PreconditionError("Need at least one point x_i")
    if not u:
        raise PreconditionError("u must be nonzero")
    _check_distinct(xs, "x_i")
    q = _p2_root_polynomial(xs, u)
    f = q.frobenius() + Polynomial.monomial(u.spec, u, 1)
    if f.derivative() != Polynomial.constant(u.spec, u):
        raise InternalInconsistencyError(f"f' = {f.derivative()} differs from u = {u}")
    if any(f(x) for x in xs):
        raise InternalInconsistencyError("f does not vanish at every x_i")
    return f


def construct_p2(xs: list[FieldElement], u: FieldElement, v: FieldElement) -> LogFormSpace:
    """Build the L_{2n,2} spanned by u dz/f_1 and v dz/f_2 over F_{2^k}.

    f_1 = q^2 + u z and f_2 = r^2 + v z share exactly the roots x_1..x_n;
    all 3n roots are distinct, which is checked through gcd(f_1, f_2) and
    the auxiliary polynomial sqrt(v) q + sqrt(u) r.

    Args:
        xs: Distinct points x_1..x_n.
        u: Nonzero element.
        v: Nonzero element different from u.

    Returns:
        The LogFormSpace with m = 2n - 1.
    """
    if u == v:
        raise PreconditionError("u and v must differ")
    if not u or not v:
        raise PreconditionError("u and v must be nonzero")
    spec = u.spec
    n = len(xs)
    f_1, f_2 = p2_certificate(xs, u), p2_certificate(xs, v)
    q, r = _p2_root_polynomial(xs, u), _p2_root_polynomial(xs, v)
    shared = Polynomial.from_roots(spec, xs)
    if f_1.gcd(f_2) != shared:
        raise InternalInconsistencyError("f_1 and f_2 share roots beyond x_1..x_n")
    auxiliary = q.scale(v.frobenius_inverse()) + r.scale(u.frobenius_inverse())
    if auxiliary.degree != n or auxiliary % shared:
        raise InternalInconsistencyError("sqrt(v) q + sqrt(u) r is not a degree n multiple of prod (z - x_i)")
    if not (f_1.is_squarefree() and f_2.is_squarefree()):
        raise InternalInconsistencyError("f_1 or f_2 has a repeated root")
    basis = (
        DifferentialForm(Polynomial.constant(spec, u), f_1),
        DifferentialForm(Polynomial.constant(spec, v), f_2),
    )
    return LogFormSpace(spec, 2 * n - 1, basis)


def additive_poly(spec: FieldSpec, a_list: list[FieldElement]) -> Polynomial:
    """Return prod over (eps) in F_p^s of (z - sum eps_i a_i).

    The result has the shape alpha z + P(z^p) and is F_p-linear; both are
    checked.
    """
    points = [0]
    for a in a_list:
        points = [spec.add(x, spec.mul(j, a.value)) for j in range(spec.p) for x in points]
    result = Polynomial.from_roots(spec, [FieldElement(spec, x) for x in points])
    if any(c and i != 1 and i % spec.p for i, c in enumerate(result.coeffs)) or result.coefficient(0):
        raise InternalInconsistencyError(f"{result} is not of the form alpha z + P(z^p)")
    rng = np.random.default_rng(len(a_list))
    for _ in range(4):
        x, y = spec.random_element(rng), spec.random_element(rng)
        if result(x + y) != result(x) + result(y):
            raise InternalInconsistencyError(f"{result} is not additive")
    return result


def additive_space(a_list: list[FieldElement]) -> LogFormSpace:
    """Build the L_{m+1,n} with m+1 = p^(n-1)(p-1) from independent a_1..a_n.

    For each j, Ad_j is the additive polynomial of the a_i with i != j,
    alpha_j its linear coefficient and u_j = -alpha_j Ad_j(a_j)^(p-2). The
    form omega_j = u_j dz / (Ad_j^(p-1) - Ad_j(a_j)^(p-1)) has a simple pole
    at every sum eps_i a_i with eps_j != 0, with residue eps_j.

    Args:
        a_list: F_p-linearly independent elements of F_{p^k}.

    Returns:
        The LogFormSpace.
    """
    a_list = list(a_list)
    if not a_list:
        raise PreconditionError("Need at least one a_i")
    spec = a_list[0].spec
    p, n = spec.p, len(a_list)
    if n == 1 and p == 2:
        raise PreconditionError("n = 1 needs p >= 3 (m+1 = p-1 must exceed 1)")
    if moore_product(*[Polynomial.constant(spec, a) for a in a_list]).is_zero():
        raise DependentBasisError("The a_i are F_p-dependent (Moore determinant zero)")
    basis, units = [], []
    for j, a_j in enumerate(a_list):
        others = a_list[:j] + a_list[j + 1 :]
        ad = additive_poly(spec, others)
        alpha = ad.coefficient(1)
        value = ad(a_j)
        u_j = -alpha * value ** (p - 2)
        denominator = ad ** (p - 1) - Polynomial.constant(spec, value ** (p - 1))
        form = DifferentialForm(Polynomial.constant(spec, u_j), denominator)
        _check_additive_residues(form, a_list, j)
        basis.append(form)
        units.append(u_j)
    for coefficients in projective_combinations(p, n):
        total = spec.zero
        for c, u in zip(coefficients, units):
            total = total + u * c
        if not total:
            raise DependentBasisError(f"The u_j are F_p-dependent: {coefficients}")
    return LogFormSpace(spec, p ** (n - 1) * (p - 1) - 1, tuple(basis))


def _check_additive_residues(form: DifferentialForm, a_list: list[FieldElement], j: int) -> None:
    spec = form.spec
    derivative = form.denominator.derivative()
    count = 0
    for eps in np.ndindex(*([spec.p] * len(a_list))):
        if eps[j] == 0:
            continue
        point = spec.zero
        for e, a in zip(eps, a_list):
            point = point + a * int(e)
        count += 1
        if form.denominator(point) or form.numerator(point) / derivative(point) != spec.element(int(eps[j])):
            raise InternalInconsistencyError(
                f"Residue of omega_{j + 1} at {point} is not {eps[j]}"
            )
    if count != form.denominator.degree:
        raise InternalInconsistencyError("Pole count of an additive basis form is off")


def etale_map(alpha: FieldElement, big_p: Polynomial) -> Polynomial:
    """Return Phi(t) = alpha t + P(t^p)."""
    spec = alpha.spec
    return Polynomial.monomial(spec, alpha, 1) + big_p.compose(Polynomial.monomial(spec, 1, spec.p))


def pullback_etale(space: LogFormSpace, alpha: FieldElement, big_p: Polynomial) -> LogFormSpace:
    """Pull a space back along Phi(t) = alpha t + P(t^p).

    Each basis form g(z) dz becomes alpha g(Phi(t)) dt since Phi' = alpha.
    The result is validated as an L_{(m+1) deg Phi, n}.

    Args:
        space: A valid space.
        alpha: Nonzero linear coefficient.
        big_p: The polynomial P.

    Returns:
        The pulled back LogFormSpace.
    """
    if not alpha:
        raise PreconditionError("alpha must be nonzero for an etale map")
    phi = etale_map(alpha, big_p)
    report = validate_space(space)
    if not report.valid:
        raise PreconditionError(f"Input space is not valid: {report.criterion}")
    basis = tuple(form.pullback(phi) for form in space.basis)
    for form in basis:
        if not splits(form.denominator):
            raise NeedsLargerFieldError(
                f"Poles of the pullback do not lie in F_{space.p}^{space.k}"
            )
    result = LogFormSpace(space.spec, (space.m + 1) * phi.degree - 1, basis)
    report = validate_space(result)
    if not report.valid:
        raise InternalInconsistencyError(
            f"Pullback fails {report.criterion} at {report.coefficients}"
        )
    return result


def hurwitz_from_form(omega: DifferentialForm) -> HurwitzDatum:
    """Read the Hurwitz datum off the residues of omega, ordered by pole location."""
    p = omega.spec.p
    classes = []
    for pole in poles_and_residues(omega):
        if pole.order != 1:
            raise PreconditionError(f"Pole at {pole.location} has order {pole.order}")
        if not pole.residue.in_prime_field():
            raise PreconditionError(f"Residue {pole.residue} at {pole.location} is outside F_{p}")
        classes.append(pole.residue.value)
    return HurwitzDatum(p, tuple(classes))


def hurwitz_substitution(
    roots: list[FieldElement], classes, big_q: Polynomial
) -> tuple[DifferentialForm, HurwitzDatum]:
    """Substitute z = Q(t) into f = prod (z - x_i)^h_i.

    Args:
        roots: Distinct pole locations x_i.
        classes: Integers h_i prime to p (a HurwitzDatum's classes or a tuple).
        big_q: The substitution Q, with Q' dividing f(Q(t)).

    Returns:
        d(f o Q)/(f o Q) and its Hurwitz datum.
    """
    if isinstance(classes, HurwitzDatum):
        classes = classes.classes
    spec = big_q.spec
    p = spec.p
    _check_distinct(list(roots), "pole location")
    classes = [int(h) % p for h in classes]
    if len(classes) != len(roots) or 0 in classes:
        raise PreconditionError(f"Need one class in F_{p}* per root, got {classes}")
    derivative = big_q.derivative()
    if derivative.is_zero():
        raise PreconditionError(f"Q = {big_q} has zero derivative")
    composed = Polynomial.one(spec)
    for root, h in zip(roots, classes):
        composed = composed * (big_q - Polynomial.constant(spec, root)) ** h
    if not (composed % derivative).is_zero():
        raise PreconditionError(f"Q' = {derivative} does not divide f(Q(t))")
    omega = DifferentialForm.polynomial(Polynomial.zero(spec))
    for root, h in zip(roots, classes):
        omega = omega + DifferentialForm(derivative.scale(h), big_q - Polynomial.constant(spec, root))
    if not omega.denominator.is_squarefree():
        raise PreconditionError("The substitution makes poles coincide")
    datum = hurwitz_from_form(omega)
    degree = big_q.degree
    if big_q == Polynomial.monomial(spec, 1, degree) and degree > 1:
        expected = Counter()
        for root, h in zip(roots, classes):
            if root.value == 0:
                if (degree * h) % p:
                    expected[(degree * h) % p] += 1
            else:
                expected[h] += degree
        if Counter(datum.classes) != expected:
            raise InternalInconsistencyError(
                f"Datum {datum.classes} after z = t^{degree} differs from {dict(expected)}"
            )
    return omega, datum
