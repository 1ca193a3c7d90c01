import logging

from dataclasses import dataclass, field

from src.logforms.errors import FieldMismatchError, InternalInconsistencyError, PreconditionError
from src.logforms.field import FieldElement, FieldSpec, field_spec
from src.logforms.polynomial import Polynomial

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WittRing:
    """W_N(F_{p^k}) presented as (Z/p^N)[y]/(M(y)).

    M has the integer coefficients of the field modulus; being monic and
    irreducible mod p, it defines the unramified extension of degree k.
    Elements are tuples of k integers in [0, p^N), low degree first.

    Attributes:
        p: Characteristic of the residue field.
        k: Residue field degree.
        N: Precision; the ring is W/p^N.
    """

    p: int
    k: int
    N: int
    modulus: tuple[int, ...] | None = None
    spec: FieldSpec = field(init=False, repr=False, compare=False)
    order: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.N < 1:
            raise PreconditionError(f"Precision N = {self.N} must be at least 1")
        spec = field_spec(self.p, self.k, self.modulus)
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "modulus", spec.modulus)
        object.__setattr__(self, "order", self.p**self.N)

    @classmethod
    def over(cls, spec: FieldSpec, N: int) -> "WittRing":
        return cls(spec.p, spec.k, N, spec.modulus)

    # Raw arithmetic on coordinate tuples.

    def normalize(self, coords) -> tuple[int, ...]:
        coords = list(coords)
        coords += [0] * (self.k - len(coords))
        return tuple(int(c) % self.order for c in coords[: self.k])

    def add(self, a, b) -> tuple[int, ...]:
        return tuple((x + y) % self.order for x, y in zip(a, b))

    def sub(self, a, b) -> tuple[int, ...]:
        return tuple((x - y) % self.order for x, y in zip(a, b))

    def neg(self, a) -> tuple[int, ...]:
        return tuple(-x % self.order for x in a)

    def scalar(self, a, n: int) -> tuple[int, ...]:
        return tuple((x * n) % self.order for x in a)

    def mul(self, a, b) -> tuple[int, ...]:
        k, order, modulus = self.k, self.order, self.modulus
        product = [0] * (2 * k - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    product[i + j] += x * y
        # y^k = -(M_0 + ... + M_{k-1} y^{k-1})
        for d in range(2 * k - 2, k - 1, -1):
            c = product[d]
            if c:
                for i in range(k):
                    product[d - k + i] -= c * modulus[i]
        return tuple(c % order for c in product[:k])

    def pow(self, a, e: int) -> tuple[int, ...]:
        if e < 0:
            return self.pow(self.invert(a), -e)
        result, base = self.one_coords(), tuple(a)
        while e:
            if e & 1:
                result = self.mul(result, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return result

    def one_coords(self) -> tuple[int, ...]:
        return (1 % self.order,) + (0,) * (self.k - 1)

    def zero_coords(self) -> tuple[int, ...]:
        return (0,) * self.k

    def residue(self, a) -> FieldElement:
        return FieldElement(self.spec, self.spec.from_digits([c % self.p for c in a]))

    def lift_coords(self, x: FieldElement) -> tuple[int, ...]:
        if x.spec != self.spec:
            raise FieldMismatchError(f"Element of {x.spec} lifted to W over {self.spec}")
        return tuple(x.coeffs)

    def invert(self, a) -> tuple[int, ...]:
        """Newton iteration x <- x(2 - a x) from the inverse of the residue."""
        residue = self.residue(a)
        if not residue:
            raise PreconditionError("Inverting a non-unit of the Witt ring")
        x = self.lift_coords(residue.inverse())
        two = self.scalar(self.one_coords(), 2)
        precision = 1
        while precision < self.N:
            x = self.mul(x, self.sub(two, self.mul(a, x)))
            precision *= 2
        if self.mul(a, x) != self.one_coords():
            raise InternalInconsistencyError("Newton inversion did not converge")
        return x

    def teichmuller_coords(self, x: FieldElement) -> tuple[int, ...]:
        """The unique lift with T^q = T, as the limit of a -> a^q from any lift."""
        a = self.lift_coords(x)
        for _ in range(self.N):
            a = self.pow(a, self.spec.q)
        return a

    # Element constructors.

    def element(self, coords) -> "WittElement":
        return WittElement(self, self.normalize(coords))

    def from_int(self, n: int) -> "WittElement":
        return self.element((n,))

    @property
    def zero(self) -> "WittElement":
        return WittElement(self, self.zero_coords())

    @property
    def one(self) -> "WittElement":
        return WittElement(self, self.one_coords())

    def lift(self, x: FieldElement) -> "WittElement":
        """The lift with coordinates in [0, p)."""
        return WittElement(self, self.lift_coords(x))

    def teichmuller(self, x: FieldElement) -> "WittElement":
        return WittElement(self, self.teichmuller_coords(x))


@dataclass(frozen=True)
class WittElement:
    """An element of W_N(F_{p^k})."""

    ring: WittRing
    coords: tuple[int, ...]

    def _coerce(self, other) -> tuple[int, ...]:
        if isinstance(other, WittElement):
            if other.ring != self.ring:
                raise FieldMismatchError(f"Cannot combine elements of {self.ring} and {other.ring}")
            return other.coords
        if isinstance(other, int):
            return self.ring.normalize((other,))
        return NotImplemented

    def __add__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return WittElement(self.ring, self.ring.add(self.coords, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return WittElement(self.ring, self.ring.sub(self.coords, b))

    def __rsub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return WittElement(self.ring, self.ring.sub(b, self.coords))

    def __neg__(self):
        return WittElement(self.ring, self.ring.neg(self.coords))

    def __mul__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return WittElement(self.ring, self.ring.mul(self.coords, b))

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        return WittElement(self.ring, self.ring.pow(self.coords, exponent))

    def __bool__(self) -> bool:
        return any(self.coords)

    def inverse(self) -> "WittElement":
        return WittElement(self.ring, self.ring.invert(self.coords))

    def reduce(self) -> FieldElement:
        return self.ring.residue(self.coords)

    def is_unit(self) -> bool:
        return bool(self.reduce())

    def divisible_by(self, n: int) -> bool:
        return all(c % n == 0 for c in self.coords)

    def divide_exact(self, n: int) -> "WittElement":
        """Divide every coordinate by n; the top p-adic digit is then undetermined."""
        if not self.divisible_by(n):
            raise PreconditionError(f"{self.coords} is not divisible by {n}")
        return WittElement(self.ring, tuple(c // n for c in self.coords))

    def __str__(self) -> str:
        return f"W{list(self.coords)}"

    def to_record(self) -> dict:
        ring = self.ring
        return {"p": ring.p, "k": ring.k, "N": ring.N, "ramified": False, "coords": list(self.coords)}

    @classmethod
    def from_record(cls, record: dict, ring: WittRing | None = None) -> "WittElement":
        if record.get("ramified"):
            raise PreconditionError("Record describes a ramified element")
        if ring is None:
            ring = WittRing(int(record["p"]), int(record["k"]), int(record["N"]))
        return ring.element(int(c) for c in record["coords"])


@dataclass(frozen=True)
class WittPolynomial:
    """A polynomial in X over W_N(F_{p^k}), coefficients low degree first."""

    ring: WittRing
    coeffs: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        coeffs = [self.ring.normalize(c) for c in self.coeffs]
        zero = self.ring.zero_coords()
        while coeffs and coeffs[-1] == zero:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def from_elements(cls, ring: WittRing, elements) -> "WittPolynomial":
        return cls(ring, tuple(e.coords for e in elements))

    @classmethod
    def one(cls, ring: WittRing) -> "WittPolynomial":
        return cls(ring, (ring.one_coords(),))

    @classmethod
    def monomial(cls, ring: WittRing, c: WittElement, degree: int) -> "WittPolynomial":
        return cls(ring, (ring.zero_coords(),) * degree + (c.coords,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coefficient(self, i: int) -> WittElement:
        if 0 <= i < len(self.coeffs):
            return WittElement(self.ring, self.coeffs[i])
        return self.ring.zero

    def _other(self, other: "WittPolynomial") -> tuple:
        if not isinstance(other, WittPolynomial) or other.ring != self.ring:
            raise FieldMismatchError("Witt polynomials over different rings")
        return other.coeffs

    def __add__(self, other: "WittPolynomial") -> "WittPolynomial":
        b = self._other(other)
        ring, zero = self.ring, self.ring.zero_coords()
        size = max(len(self.coeffs), len(b))
        return WittPolynomial(
            ring,
            tuple(
                ring.add(
                    self.coeffs[i] if i < len(self.coeffs) else zero,
                    b[i] if i < len(b) else zero,
                )
                for i in range(size)
            ),
        )

    def __neg__(self) -> "WittPolynomial":
        return WittPolynomial(self.ring, tuple(self.ring.neg(c) for c in self.coeffs))

    def __sub__(self, other: "WittPolynomial") -> "WittPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "WittPolynomial":
        ring = self.ring
        if isinstance(other, WittElement):
            return WittPolynomial(ring, tuple(ring.mul(c, other.coords) for c in self.coeffs))
        if isinstance(other, int):
            return WittPolynomial(ring, tuple(ring.scalar(c, other) for c in self.coeffs))
        b = self._other(other)
        if not self.coeffs or not b:
            return WittPolynomial(ring, ())
        product = [ring.zero_coords()] * (len(self.coeffs) + len(b) - 1)
        for i, x in enumerate(self.coeffs):
            if any(x):
                for j, y in enumerate(b):
                    product[i + j] = ring.add(product[i + j], ring.mul(x, y))
        return WittPolynomial(ring, tuple(product))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "WittPolynomial":
        result, base = WittPolynomial.one(self.ring), self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def truncate(self, precision: int) -> "WittPolynomial":
        """Keep the terms of degree below precision."""
        return WittPolynomial(self.ring, self.coeffs[:precision])

    def series_inverse(self, precision: int) -> "WittPolynomial":
        """Inverse power series modulo X^precision; the constant term must be a unit."""
        ring = self.ring
        inverse_lead = ring.invert(self.coefficient(0).coords)
        result = [inverse_lead]
        for i in range(1, precision):
            total = ring.zero_coords()
            for j in range(1, i + 1):
                total = ring.add(total, ring.mul(self.coefficient(j).coords, result[i - j]))
            result.append(ring.neg(ring.mul(total, inverse_lead)))
        return WittPolynomial(ring, tuple(result))

    def reduce(self) -> Polynomial:
        spec = self.ring.spec
        return Polynomial(spec, tuple(self.ring.residue(c).value for c in self.coeffs))

    def divisible_by(self, n: int) -> bool:
        return all(c % n == 0 for coords in self.coeffs for c in coords)

    def divide_exact(self, n: int) -> "WittPolynomial":
        if not self.divisible_by(n):
            raise PreconditionError(f"Polynomial is not divisible by {n}")
        return WittPolynomial(self.ring, tuple(tuple(c // n for c in coords) for coords in self.coeffs))

    def to_record(self) -> list[dict]:
        return [WittElement(self.ring, c).to_record() for c in self.coeffs]

    @classmethod
    def from_record(cls, ring: WittRing, record: list[dict]) -> "WittPolynomial":
        return cls.from_elements(ring, [WittElement.from_record(r, ring) for r in record])


@dataclass(frozen=True)
class RamifiedWittRing:
    """W_N(F_{2^k})[pi] with pi^e = -2, an Eisenstein extension of degree e.

    Elements are tuples of e coordinate tuples of the base ring, the i-th
    being the coefficient of pi^i.
    """

    base: WittRing
    e: int

    def __post_init__(self) -> None:
        if self.base.p != 2:
            raise PreconditionError("The ramified extension pi^e = -2 is for p = 2")
        if self.e < 1:
            raise PreconditionError(f"Ramification index e = {self.e} must be positive")

    def normalize(self, coords) -> tuple[tuple[int, ...], ...]:
        coords = list(coords) + [self.base.zero_coords()] * (self.e - len(coords))
        return tuple(self.base.normalize(c) for c in coords[: self.e])

    def element(self, coords) -> "RamifiedElement":
        return RamifiedElement(self, self.normalize(coords))

    def from_base(self, w: WittElement) -> "RamifiedElement":
        return self.element((w.coords,))

    def pi_power(self, j: int) -> "RamifiedElement":
        """pi^j = pi^(j mod e) (-2)^(j div e)."""
        quotient, remainder = divmod(j, self.e)
        coords = [self.base.zero_coords()] * self.e
        coords[remainder] = self.base.scalar(self.base.one_coords(), (-2) ** quotient)
        return RamifiedElement(self, tuple(coords))

    def add(self, a, b):
        return tuple(self.base.add(x, y) for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(self.base.sub(x, y) for x, y in zip(a, b))

    def mul(self, a, b):
        base, e = self.base, self.e
        product = [base.zero_coords()] * (2 * e - 1)
        for i, x in enumerate(a):
            if any(x):
                for j, y in enumerate(b):
                    product[i + j] = base.add(product[i + j], base.mul(x, y))
        for d in range(2 * e - 2, e - 1, -1):
            product[d - e] = base.add(product[d - e], base.scalar(product[d], -2))
        return tuple(product[:e])


@dataclass(frozen=True)
class RamifiedElement:
    """An element of the ramified ring W_N(F_{2^k})[pi]."""

    ring: RamifiedWittRing
    coords: tuple[tuple[int, ...], ...]

    def __add__(self, other: "RamifiedElement") -> "RamifiedElement":
        return RamifiedElement(self.ring, self.ring.add(self.coords, other.coords))

    def __sub__(self, other: "RamifiedElement") -> "RamifiedElement":
        return RamifiedElement(self.ring, self.ring.sub(self.coords, other.coords))

    def __mul__(self, other: "RamifiedElement") -> "RamifiedElement":
        return RamifiedElement(self.ring, self.ring.mul(self.coords, other.coords))

    def divisible_by(self, n: int) -> bool:
        """Divisibility by an integer, coordinatewise since 1, pi, ..., pi^(e-1) is a W-basis."""
        return all(c % n == 0 for coords in self.coords for c in coords)

    def divide_exact(self, n: int) -> "RamifiedElement":
        if not self.divisible_by(n):
            raise PreconditionError(f"Ramified element is not divisible by {n}")
        return RamifiedElement(self.ring, tuple(tuple(c // n for c in coords) for coords in self.coords))

    def reduce(self) -> FieldElement:
        """Image in the residue field R/pi = F_{2^k}."""
        return self.ring.base.residue(self.coords[0])

    def to_record(self) -> dict:
        base = self.ring.base
        return {
            "p": base.p,
            "k": base.k,
            "N": base.N,
            "ramified": True,
            "e": self.ring.e,
            "coords": [list(c) for c in self.coords],
        }
