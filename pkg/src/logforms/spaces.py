import itertools
import logging

import pandas as pd

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from src.logforms.errors import (
    DependentBasisError,
    FieldMismatchError,
    InternalInconsistencyError,
    NeedsLargerFieldError,
    PreconditionError,
)
from src.logforms.field import FieldSpec, field_spec
from src.logforms.forms import (
    DifferentialForm,
    is_logarithmic,
    order_at_infinity,
    poles_and_residues,
)
from src.logforms.polynomial import Polynomial, moore_product

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LogFormSpace:
    """A candidate F_p-space L_{m+1,n} spanned by n differential forms.

    Attributes:
        spec: The working field F_{p^k}.
        m: Every nonzero element should have m+1 simple poles and a zero of
            order m-1 at infinity.
        basis: The spanning forms.
    """

    spec: FieldSpec
    m: int
    basis: tuple[DifferentialForm, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "basis", tuple(self.basis))
        if not self.basis:
            raise PreconditionError("A LogFormSpace needs a nonempty basis")
        if self.m < 1 or self.m % self.spec.p == 0:
            raise PreconditionError(
                f"m = {self.m} must be positive and prime to p = {self.spec.p}"
            )
        for form in self.basis:
            if form.spec != self.spec:
                raise FieldMismatchError(f"Basis form over {form.spec}, space over {self.spec}")

    @property
    def p(self) -> int:
        return self.spec.p

    @property
    def k(self) -> int:
        return self.spec.k

    @property
    def n(self) -> int:
        return len(self.basis)

    def combination(self, coefficients) -> DifferentialForm:
        """Return sum c_i omega_i for integer coefficients c_i."""
        total = DifferentialForm.polynomial(Polynomial.zero(self.spec))
        for c, form in zip(coefficients, self.basis):
            if c % self.p:
                total = total + form * c
        return total

    def to_record(self) -> dict:
        return {
            "p": self.p,
            "k": self.k,
            "modulus": list(self.spec.modulus),
            "m": self.m,
            "n": self.n,
            "basis": [form.to_record() for form in self.basis],
        }

    @classmethod
    def from_record(cls, record: dict) -> "LogFormSpace":
        modulus = tuple(record["modulus"]) if "modulus" in record else None
        spec = field_spec(int(record["p"]), int(record["k"]), modulus)
        basis = tuple(DifferentialForm.from_record(spec, r) for r in record["basis"])
        if "n" in record and int(record["n"]) != len(basis):
            raise PreconditionError(
                f"Record declares n = {record['n']} but has {len(basis)} basis forms"
            )
        return cls(spec, int(record["m"]), basis)


def projective_combinations(p: int, n: int) -> list[tuple[int, ...]]:
    """Representatives of P^(n-1)(F_p): nonzero vectors whose first nonzero entry is 1."""
    return [
        c
        for c in itertools.product(range(p), repeat=n)
        if any(c) and next(x for x in c if x) == 1
    ]


@dataclass(frozen=True)
class CombinationCheck:
    """Outcome of checking one projective combination of a basis."""

    coefficients: tuple[int, ...]
    pole_count: int
    simple_poles: bool
    order_at_infinity: int
    logarithmic: bool
    poles: tuple[int, ...] | None
    failure: str | None


@dataclass(frozen=True)
class SpaceFailure:
    """Report naming the first combination violating the definition."""

    coefficients: tuple[int, ...]
    criterion: str
    detail: str

    valid = False

    def to_record(self) -> dict:
        return {
            "valid": False,
            "coefficients": list(self.coefficients),
            "criterion": self.criterion,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class SpaceDiagnostics:
    """Pole combinatorics of a validated space.

    Attributes:
        total_poles: Number of distinct poles of all forms in the space.
        common_poles: Number of poles shared by every basis form.
        checks: One CombinationCheck per projective combination.
    """

    p: int
    m: int
    n: int
    total_poles: int
    common_poles: int
    checks: tuple[CombinationCheck, ...] = field(repr=False)

    valid = True

    @property
    def combination_table(self) -> pd.DataFrame:
        """Per-combination pole data as a pandas data frame."""
        return pd.DataFrame(
            {
                "coefficients": [list(c.coefficients) for c in self.checks],
                "pole_count": [c.pole_count for c in self.checks],
                "order_at_infinity": [c.order_at_infinity for c in self.checks],
                "logarithmic": [c.logarithmic for c in self.checks],
                "poles": [list(c.poles) if c.poles is not None else None for c in self.checks],
            }
        )

    def to_record(self) -> dict:
        return {
            "valid": True,
            "p": self.p,
            "m": self.m,
            "n": self.n,
            "total_poles": self.total_poles,
            "common_poles": self.common_poles,
            "combinations": self.combination_table.to_dict(orient="records"),
        }


def _check_combination(space: LogFormSpace, coefficients: tuple[int, ...]) -> CombinationCheck:
    omega = space.combination(coefficients)
    if omega.is_zero():
        raise DependentBasisError(
            f"The combination {coefficients} of the basis vanishes"
        )
    denominator = omega.denominator
    pole_count = denominator.degree
    simple = denominator.is_squarefree()
    order = order_at_infinity(omega)
    logarithmic = is_logarithmic(omega)
    try:
        poles = tuple(d.location.value for d in poles_and_residues(omega))
    except NeedsLargerFieldError:
        poles = None
    failure = None
    if pole_count != space.m + 1:
        failure = "pole_count"
    elif not simple:
        failure = "simple_poles"
    elif order != space.m - 1:
        failure = "order_at_infinity"
    elif not logarithmic:
        failure = "logarithmic"
    return CombinationCheck(coefficients, pole_count, simple, order, logarithmic, poles, failure)


def _check_combination_task(args) -> CombinationCheck:
    return _check_combination(*args)


def _leading_coefficients_independent(space: LogFormSpace) -> bool:
    """Over the monic common denominator P, the numerators' leading terms are F_p-independent."""
    common = Polynomial.one(space.spec)
    for form in space.basis:
        common = common.lcm(form.denominator)
    numerators = [form.numerator * (common // form.denominator) for form in space.basis]
    degree = max(q.degree for q in numerators)
    leads = [q.coefficient(degree) for q in numerators]
    for coefficients in projective_combinations(space.p, space.n):
        total = space.spec.zero
        for c, lead in zip(coefficients, leads):
            total = total + lead * c
        if not total:
            return False
    return True


def validate_space(space: LogFormSpace, jobs: int = 1) -> SpaceDiagnostics | SpaceFailure:
    """Check that a candidate basis spans an L_{m+1,n}.

    Every projective combination is checked for m+1 poles, simple poles, a
    zero of order m-1 at infinity and logarithmicity. Scaling by F_p* keeps
    all four properties, so projective representatives suffice.

    Args:
        space: The candidate.
        jobs: Number of worker processes; 1 checks in-process.

    Returns:
        SpaceDiagnostics when valid, with the pole counts checked against
        (m+1)(p^n-1)/((p-1)p^(n-1)) and (p-1)^(n-1)(m+1)/p^(n-1); otherwise a
        SpaceFailure naming the first violating combination and criterion.

    Raises:
        DependentBasisError: Some nonzero combination vanishes.
    """
    p, n, m = space.p, space.n, space.m
    combinations = projective_combinations(p, n)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            checks = list(
                executor.map(_check_combination_task, [(space, c) for c in combinations])
            )
    else:
        checks = [_check_combination(space, c) for c in combinations]
    for check in checks:
        if check.failure is not None:
            detail = {
                "pole_count": f"{check.pole_count} poles, expected {m + 1}",
                "simple_poles": "denominator is not squarefree",
                "order_at_infinity": f"order {check.order_at_infinity}, expected {m - 1}",
                "logarithmic": "Cartier operator does not fix the form",
            }[check.failure]
            return SpaceFailure(check.coefficients, check.failure, detail)

    statistics = pole_statistics(list(space.basis))
    expected_total = (m + 1) * (p**n - 1) // ((p - 1) * p ** (n - 1))
    expected_common = (p - 1) ** (n - 1) * (m + 1) // p ** (n - 1)
    if (m + 1) % p ** (n - 1):
        raise InternalInconsistencyError(
            f"Valid space with m+1 = {m + 1} not divisible by p^(n-1) = {p ** (n - 1)}"
        )
    if statistics.total != expected_total or statistics.common != expected_common:
        raise InternalInconsistencyError(
            f"Pole counts T = {statistics.total}, common = {statistics.common}; "
            f"expected {expected_total} and {expected_common}"
        )
    if not _leading_coefficients_independent(space):
        raise InternalInconsistencyError("Leading numerator coefficients are F_p-dependent")
    return SpaceDiagnostics(p, m, n, statistics.total, statistics.common, tuple(checks))


@dataclass(frozen=True)
class PoleStatistics:
    """Inclusion-exclusion data for the poles of a family of forms.

    Attributes:
        table: One row per nonempty index subset with its shared pole count.
        total: Number of distinct poles over all forms.
        common: Number of poles shared by all forms.
    """

    table: pd.DataFrame
    total: int
    common: int


def pole_statistics(forms: list[DifferentialForm]) -> PoleStatistics:
    """Count shared poles N_{i1..ik} for every subset of forms.

    Counts are degrees of gcds of denominators, so poles are counted over the
    algebraic closure without root finding. The total is assembled by
    inclusion-exclusion and checked against the degree of the lcm.

    Args:
        forms: Forms with simple poles only.

    Returns:
        A PoleStatistics.
    """
    if not forms:
        raise PreconditionError("pole_statistics needs at least one form")
    for form in forms:
        if form.denominator.degree > 0 and not form.denominator.is_squarefree():
            raise PreconditionError(f"{form} has a pole of order at least 2")
    rows = []
    total = 0
    for size in range(1, len(forms) + 1):
        for subset in itertools.combinations(range(len(forms)), size):
            shared = forms[subset[0]].denominator
            for i in subset[1:]:
                shared = shared.gcd(forms[i].denominator)
            count = max(shared.degree, 0)
            rows.append({"subset": list(subset), "size": size, "shared_poles": count})
            total += (-1) ** (size + 1) * count
    union = Polynomial.one(forms[0].spec)
    for form in forms:
        union = union.lcm(form.denominator)
    if total != union.degree:
        raise InternalInconsistencyError(
            f"Inclusion-exclusion total {total} differs from lcm degree {union.degree}"
        )
    table = pd.DataFrame(rows)
    return PoleStatistics(table, total, int(table["shared_poles"].iloc[-1]))


def _require_valid(space: LogFormSpace) -> SpaceDiagnostics:
    report = validate_space(space)
    if not report.valid:
        raise PreconditionError(
            f"Not a valid L_{{m+1,n}}: combination {report.coefficients} fails "
            f"{report.criterion} ({report.detail})"
        )
    return report


def extract_pair(space: LogFormSpace) -> tuple[Polynomial, Polynomial]:
    """Recover (A, B) with omega_1 = A dz/M, omega_2 = B dz/M, M = A^p B - A B^p.

    Writes omega_1 = u P_0 / P dz and omega_2 = v P_p / P dz over the monic
    common denominator P, sets a = u/v and picks alpha with
    alpha^p v (a^p - a) = 1; then A = alpha a P_0 and B = alpha P_p.

    Args:
        space: A valid two-dimensional space.

    Returns:
        The pair (A, B), both of degree (m+1)/p.
    """
    if space.n != 2:
        raise PreconditionError(f"extract_pair needs n = 2, got n = {space.n}")
    _require_valid(space)
    spec, p = space.spec, space.p
    first, second = space.basis
    if first.numerator.degree != 0 or second.numerator.degree != 0:
        raise InternalInconsistencyError("Basis numerators of a valid space must be constant")
    common = first.denominator.lcm(second.denominator)
    p_0 = common // first.denominator
    p_p = common // second.denominator
    u, v = first.numerator.leading, second.numerator.leading
    a = u / v
    if a.in_prime_field():
        raise InternalInconsistencyError(f"u/v = {a} lies in F_{p}")
    alpha = (v * (a**p - a)).inverse().frobenius_inverse()
    big_a, big_b = p_0.scale(alpha * a), p_p.scale(alpha)
    expected = (space.m + 1) // p
    for i, j in projective_combinations(p, 2):
        if (big_a.scale(i) + big_b.scale(j)).degree != expected:
            raise InternalInconsistencyError(
                f"deg({i}A + {j}B) differs from (m+1)/p = {expected}"
            )
    return big_a, big_b


@dataclass(frozen=True)
class PairForms:
    """The two forms built from (A, B) and the two logarithmicity verdicts."""

    omega_1: DifferentialForm
    omega_2: DifferentialForm
    derivative_condition: bool
    logarithmic: bool


def forms_from_pair(big_a: Polynomial, big_b: Polynomial) -> PairForms:
    """Build omega_1 = A dz/M and omega_2 = B dz/M with M = A^p B - A B^p.

    The derivative condition ((A^p - A B^(p-1))^(p-1))^((p-1)) = -1 is
    reported next to the Cartier verdict on both forms; they must agree.

    Args:
        big_a: A.
        big_b: B, of the same degree as A.

    Returns:
        A PairForms.
    """
    if big_a.spec != big_b.spec:
        raise FieldMismatchError("A and B live over different fields")
    spec, p = big_a.spec, big_a.spec.p
    moore = moore_product(big_a, big_b)
    if moore.is_zero():
        raise DependentBasisError("A and B are F_p-dependent (Moore determinant zero)")
    degrees = {
        (big_a.scale(i) + big_b.scale(j)).degree for i, j in projective_combinations(p, 2)
    }
    if len(degrees) != 1:
        raise PreconditionError(
            f"deg(iA + jB) is not constant over P^1(F_{p}): {sorted(degrees)}"
        )
    omega_1 = DifferentialForm(big_a, moore)
    omega_2 = DifferentialForm(big_b, moore)
    f = big_a.frobenius() - big_a * big_b ** (p - 1)
    condition = (f ** (p - 1)).derivative(p - 1) == Polynomial.constant(spec, -1)
    logarithmic = is_logarithmic(omega_1) and is_logarithmic(omega_2)
    if condition != logarithmic:
        raise InternalInconsistencyError(
            f"Derivative condition says {condition}, Cartier says {logarithmic}"
        )
    return PairForms(omega_1, omega_2, condition, logarithmic)


@dataclass(frozen=True)
class MooreRelation:
    """P^e against the Moore determinant of the numerators Q_i over P."""

    moore: Polynomial
    exponent: int
    gamma: Polynomial | None


def moore_relation(space: LogFormSpace) -> MooreRelation:
    """Diagnostic form of P^(1+p+...+p^(n-2)) = gamma * Moore(Q_1, ..., Q_n).

    Writes omega_i = Q_i / P dz with P the monic common denominator. gamma is
    returned when P^e is a constant multiple of the Moore determinant and is
    None otherwise; no normalization of gamma is imposed.
    """
    common = Polynomial.one(space.spec)
    for form in space.basis:
        common = common.lcm(form.denominator)
    numerators = [form.numerator * (common // form.denominator) for form in space.basis]
    moore = moore_product(*numerators)
    exponent = sum(space.p**i for i in range(space.n - 1))
    gamma = None
    if not moore.is_zero():
        quotient, remainder = divmod(common**exponent, moore)
        if remainder.is_zero() and quotient.degree == 0:
            gamma = quotient
    return MooreRelation(moore, exponent, gamma)
