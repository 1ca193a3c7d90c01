import logging
import operator
import re

import galois
import numpy as np

from dataclasses import dataclass
from functools import lru_cache

from src.logforms import field_table
from src.logforms.errors import FieldMismatchError, PreconditionError

logger = logging.getLogger(__name__)


class FieldSpec:
    """The finite field F_{p^k} = F_p[t]/(modulus).

    Elements are encoded as integers: the element c_0 + c_1 t + ... + c_{k-1}
    t^{k-1} is the integer c_0 + c_1 p + ... + c_{k-1} p^{k-1}. Arithmetic
    on encoded values goes through exponent and logarithm tables generated
    once with galois. The attribute add is bound at construction to the
    fastest addition available for the field (xor, table or digitwise).

    Attributes:
        p: Characteristic.
        k: Extension degree.
        q: Field size p^k.
        modulus: Monic irreducible polynomial of degree k over F_p, low
            degree first.
        galois_field: The galois FieldArray class of the same field.
    """

    # Odd characteristic fields up to this size get a full addition table.
    _add_table_limit = 1024

    @classmethod
    def _resolve_modulus(cls, p: int, k: int, modulus) -> tuple[int, ...]:
        """Pick the modulus: explicit, tabulated, then Conway from galois."""
        if modulus is not None:
            return tuple(int(i) for i in modulus)
        if k == 1:
            return (0, 1)
        tabulated = field_table.default_modulus(p, k)
        if tabulated is not None:
            return tabulated
        logger.info("falling back to the Conway polynomial for p=%d k=%d", p, k)
        try:
            conway = galois.conway_poly(p, k)
        except LookupError as error:
            raise PreconditionError(
                f"No default modulus for F_{p}^{k}; pass one explicitly"
            ) from error
        return tuple(int(i) for i in conway.coeffs[::-1])

    def __init__(self, p: int, k: int = 1, modulus=None) -> None:
        """Initialize FieldSpec.

        Args:
            p: A prime.
            k: Extension degree, at least 1.
            modulus: Optional monic irreducible polynomial of degree k over
                F_p, as integer coefficients low degree first. Defaults to the
                field table entry.

        Raises:
            PreconditionError: p is not prime, k < 1, or the modulus is not a
                monic irreducible polynomial of degree k.
        """
        if not galois.is_prime(p):
            raise PreconditionError(f"p = {p} is not prime")
        if k < 1:
            raise PreconditionError(f"Extension degree k = {k} must be at least 1")
        self.p = p
        self.k = k
        self.q = p**k
        self.modulus = self._resolve_modulus(p, k, modulus)
        if len(self.modulus) != k + 1 or self.modulus[-1] != 1:
            raise PreconditionError(
                f"Modulus {self.modulus} is not monic of degree {k}"
            )
        if any(not 0 <= i < p for i in self.modulus):
            raise PreconditionError(f"Modulus {self.modulus} has entries outside [0, {p})")
        prime_field = galois.GF(p)
        if k == 1:
            self.galois_field = prime_field
        else:
            irreducible = galois.Poly(list(reversed(self.modulus)), field=prime_field)
            if not irreducible.is_irreducible():
                raise PreconditionError(
                    f"Modulus {self.modulus} is reducible over F_{p}"
                )
            self.galois_field = galois.GF(p**k, irreducible_poly=irreducible)
        self._build_tables()

    def _build_tables(self) -> None:
        gf = self.galois_field
        elements = gf(np.arange(self.q))
        powers = np.array(gf.primitive_element ** np.arange(self.q - 1), dtype=int)
        exp = powers.tolist()
        log = [0] * self.q
        for i, value in enumerate(exp):
            log[value] = i
        # Doubled so that exp[log a + log b] needs no reduction.
        self._exp = exp + exp
        self._log = log
        self._neg = np.array(-elements, dtype=int).tolist()
        self._digits = None
        self._add_table = None
        if self.p == 2:
            self.add = operator.xor
        elif self.q <= self._add_table_limit:
            table = np.array(elements[:, None] + elements[None, :], dtype=int)
            self._add_table = table.ravel().tolist()
            self.add = self._table_add
        else:
            self._digits = [self._to_digits(i) for i in range(self.q)]
            self._place_values = [self.p**i for i in range(self.k)]
            self.add = self._digit_add

    def _to_digits(self, value: int) -> tuple[int, ...]:
        digits = []
        for _ in range(self.k):
            value, digit = divmod(value, self.p)
            digits.append(digit)
        return tuple(digits)

    def _table_add(self, a: int, b: int) -> int:
        return self._add_table[a * self.q + b]

    def _digit_add(self, a: int, b: int) -> int:
        p = self.p
        return sum(
            ((x + y) % p) * w
            for x, y, w in zip(self._digits[a], self._digits[b], self._place_values)
        )

    def __reduce__(self):
        return (field_spec, (self.p, self.k, self.modulus))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FieldSpec):
            return NotImplemented
        return (self.p, self.k, self.modulus) == (other.p, other.k, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.k, self.modulus))

    def __repr__(self) -> str:
        return f"FieldSpec(p={self.p}, k={self.k}, modulus={self.modulus})"

    def neg(self, a: int) -> int:
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self._neg[b])

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in F_{self.p}^{self.k}")
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e > 0:
                return 0
            if e == 0:
                return 1
            raise ZeroDivisionError(f"0 raised to negative power {e}")
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    def frobenius(self, a: int) -> int:
        return self.pow(a, self.p)

    def frobenius_inverse(self, a: int) -> int:
        """Return the unique b with b^p = a, computed as a^(p^(k-1))."""
        return self.pow(a, self.p ** (self.k - 1))

    def from_int(self, n: int) -> int:
        """Encode the integer n, read mod p, as a prime field element."""
        return n % self.p

    def digits(self, a: int) -> tuple[int, ...]:
        """Return the k power-basis coordinates of a, low degree first."""
        return self._to_digits(a)

    def from_digits(self, digits) -> int:
        if len(digits) != self.k:
            raise PreconditionError(
                f"Expected {self.k} coordinates, got {len(digits)}"
            )
        value = 0
        for digit in reversed(digits):
            if not 0 <= digit < self.p:
                raise PreconditionError(f"Coordinate {digit} outside [0, {self.p})")
            value = value * self.p + digit
        return value

    @property
    def generator(self) -> int:
        """Encoded class of t, a root of the modulus.

        For k = 1 with the default modulus z this is 0, so F_p elements are
        written as integers and parse rejects t.
        """
        return self.p if self.k > 1 else self.neg(self.modulus[0])

    def is_prime_field(self, a: int) -> bool:
        return a < self.p

    def element(self, value: int) -> "FieldElement":
        if not 0 <= value < self.q:
            raise PreconditionError(f"{value} does not encode an element of F_{self.p}^{self.k}")
        return FieldElement(self, value)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    @property
    def t(self) -> "FieldElement":
        return FieldElement(self, self.generator)

    def elements(self) -> list["FieldElement"]:
        return [FieldElement(self, i) for i in range(self.q)]

    def prime_field_elements(self) -> list["FieldElement"]:
        return [FieldElement(self, i) for i in range(self.p)]

    def random_element(self, rng: np.random.Generator, nonzero: bool = False) -> "FieldElement":
        low = 1 if nonzero else 0
        return FieldElement(self, int(rng.integers(low, self.q)))

    _term_pattern = re.compile(r"^(\d+)?\*?(t(?:\^(\d+))?)?$")

    def parse(self, text: str) -> "FieldElement":
        """Parse a polynomial in the generator t, such as "2*t^2 + t + 1".

        Args:
            text: The expression. Integer coefficients are read mod p.

        Returns:
            The FieldElement.
        """
        compact = text.replace(" ", "")
        if not re.fullmatch(r"([+-]?[^+-]+)+", compact):
            raise PreconditionError(f"Cannot parse field element {text!r}")
        value = 0
        for sign, term in re.findall(r"([+-]?)([^+-]+)", compact):
            match = self._term_pattern.match(term)
            if match is None:
                raise PreconditionError(f"Cannot parse field element term {term!r}")
            coefficient, power_part, exponent = match.groups()
            if coefficient is None and power_part is None:
                raise PreconditionError(f"Cannot parse field element term {term!r}")
            term_value = self.from_int(int(coefficient) if coefficient else 1)
            if power_part:
                if not self.generator:
                    raise PreconditionError(
                        f"t is 0 in F_{self.p} with modulus z; write {text!r} with integers"
                    )
                power = int(exponent) if exponent else 1
                term_value = self.mul(term_value, self.pow(self.generator, power))
            if sign == "-":
                term_value = self.neg(term_value)
            value = self.add(value, term_value)
        return FieldElement(self, value)

    def format(self, a: int) -> str:
        terms = []
        for power, digit in reversed(list(enumerate(self._to_digits(a)))):
            if digit == 0:
                continue
            match power:
                case 0:
                    terms.append(str(digit))
                case 1:
                    terms.append("t" if digit == 1 else f"{digit}*t")
                case _:
                    terms.append(f"t^{power}" if digit == 1 else f"{digit}*t^{power}")
        return " + ".join(terms) if terms else "0"

    def element_record(self, a: int) -> dict:
        return {"p": self.p, "k": self.k, "coeffs": list(self._to_digits(a))}


@lru_cache(maxsize=64)
def field_spec(p: int, k: int = 1, modulus: tuple[int, ...] | None = None) -> FieldSpec:
    """Return the shared FieldSpec for the given parameters.

    FieldSpecs are immutable once built, so one instance per parameter set is
    kept and reused; building the tables is the expensive step.
    """
    return FieldSpec(p, k, modulus)


@dataclass(frozen=True, slots=True)
class FieldElement:
    """An element of F_{p^k}, stored as its integer encoding."""

    spec: FieldSpec
    value: int

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise FieldMismatchError(
                    f"Cannot combine elements of {self.spec} and {other.spec}"
                )
            return other.value
        if isinstance(other, (int, np.integer)):
            return self.spec.from_int(int(other))
        return NotImplemented

    def __add__(self, other):
        value = self._coerce(other)
        if value is NotImplemented:
            return value
        return FieldElement(self.spec, self.spec.add(self.value, value))

    __radd__ = __add__

    def __sub__(self, other):
        value = self._coerce(other)
        if value is NotImplemented:
            return value
        return FieldElement(self.spec, self.spec.sub(self.value, value))

    def __rsub__(self, other):
        value = self._coerce(other)
        if value is NotImplemented:
            return value
        return FieldElement(self.spec, self.spec.sub(value, self.value))

    def __neg__(self):
        return FieldElement(self.spec, self.spec.neg(self.value))

    def __mul__(self, other):
        value = self._coerce(other)
        if value is NotImplemented:
            return value
        return FieldElement(self.spec, self.spec.mul(self.value, value))

    __rmul__ = __mul__

    def __truediv__(self, other):
        value = self._coerce(other)
        if value is NotImplemented:
            return value
        return FieldElement(self.spec, self.spec.div(self.value, value))

    def __rtruediv__(self, other):
        value = self._coerce(other)
        if value is NotImplemented:
            return value
        return FieldElement(self.spec, self.spec.div(value, self.value))

    def __pow__(self, exponent: int):
        return FieldElement(self.spec, self.spec.pow(self.value, exponent))

    def __bool__(self) -> bool:
        return self.value != 0

    def __str__(self) -> str:
        return self.spec.format(self.value)

    def inverse(self) -> "FieldElement":
        return FieldElement(self.spec, self.spec.inv(self.value))

    def frobenius(self) -> "FieldElement":
        return FieldElement(self.spec, self.spec.frobenius(self.value))

    def frobenius_inverse(self) -> "FieldElement":
        return FieldElement(self.spec, self.spec.frobenius_inverse(self.value))

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.spec.digits(self.value)

    def in_prime_field(self) -> bool:
        return self.spec.is_prime_field(self.value)

    def to_record(self) -> dict:
        return self.spec.element_record(self.value)

    @classmethod
    def from_record(cls, record: dict, spec: FieldSpec | None = None) -> "FieldElement":
        """Decode {p, k, coeffs}; the default modulus is used unless spec is given."""
        if spec is None:
            spec = field_spec(int(record["p"]), int(record["k"]))
        elif (spec.p, spec.k) != (record["p"], record["k"]):
            raise FieldMismatchError(
                f"Record over F_{record['p']}^{record['k']} does not match {spec}"
            )
        return FieldElement(spec, spec.from_digits([int(i) for i in record["coeffs"]]))
