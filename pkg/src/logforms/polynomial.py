import itertools

import galois
import numpy as np

from dataclasses import dataclass

from src.logforms.errors import FieldMismatchError, PreconditionError
from src.logforms.field import FieldElement, FieldSpec

# Raw kernels. A raw polynomial is a tuple of encoded coefficients, low
# degree first, with no trailing zeros; () is the zero polynomial.


def trim(coeffs) -> tuple[int, ...]:
    end = len(coeffs)
    while end and coeffs[end - 1] == 0:
        end -= 1
    return tuple(coeffs[:end])


def padd(F: FieldSpec, a, b) -> tuple[int, ...]:
    if len(a) < len(b):
        a, b = b, a
    add = F.add
    result = list(a)
    for i, c in enumerate(b):
        if c:
            result[i] = add(result[i], c)
    return trim(result)


def pneg(F: FieldSpec, a) -> tuple[int, ...]:
    neg = F._neg
    return tuple(neg[c] for c in a)


def psub(F: FieldSpec, a, b) -> tuple[int, ...]:
    return padd(F, a, pneg(F, b))


def pscale(F: FieldSpec, a, c: int) -> tuple[int, ...]:
    if c == 0:
        return ()
    mul = F.mul
    return tuple(mul(x, c) for x in a)


def pmul(F: FieldSpec, a, b) -> tuple[int, ...]:
    if not a or not b:
        return ()
    exp, log, add = F._exp, F._log, F.add
    logs_b = [(j, log[c]) for j, c in enumerate(b) if c]
    result = [0] * (len(a) + len(b) - 1)
    for i, c in enumerate(a):
        if c:
            log_c = log[c]
            for j, log_d in logs_b:
                result[i + j] = add(result[i + j], exp[log_c + log_d])
    return tuple(result)


def pdivmod(F: FieldSpec, a, b) -> tuple[tuple[int, ...], tuple[int, ...]]:
    if not b:
        raise ZeroDivisionError("Polynomial division by the zero polynomial")
    if len(a) < len(b):
        return (), tuple(a)
    exp, log, add, neg = F._exp, F._log, F.add, F._neg
    inverse_lead = F.inv(b[-1])
    shift = len(b) - 1
    logs_b = [(j, log[c]) for j, c in enumerate(b[:-1]) if c]
    remainder = list(a)
    quotient = [0] * (len(a) - shift)
    for i in range(len(a) - 1, shift - 1, -1):
        c = remainder[i]
        if c == 0:
            continue
        factor = F.mul(c, inverse_lead)
        quotient[i - shift] = factor
        log_f = log[neg[factor]]
        for j, log_d in logs_b:
            position = i - shift + j
            remainder[position] = add(remainder[position], exp[log_f + log_d])
        remainder[i] = 0
    return trim(quotient), trim(remainder[:shift])


def pmod(F: FieldSpec, a, b) -> tuple[int, ...]:
    return pdivmod(F, a, b)[1]


def pderiv(F: FieldSpec, a) -> tuple[int, ...]:
    mul, from_int = F.mul, F.from_int
    return trim([mul(c, from_int(i)) for i, c in enumerate(a)][1:])


def pmonic(F: FieldSpec, a) -> tuple[int, ...]:
    if not a:
        return ()
    return pscale(F, a, F.inv(a[-1]))


def pgcd(F: FieldSpec, a, b) -> tuple[int, ...]:
    while b:
        a, b = b, pmod(F, a, b)
    return pmonic(F, a)


def ppow(F: FieldSpec, a, e: int) -> tuple[int, ...]:
    if e < 0:
        raise PreconditionError(f"Negative polynomial power {e}")
    result, base = (1,), tuple(a)
    while e:
        if e & 1:
            result = pmul(F, result, base)
        e >>= 1
        if e:
            base = pmul(F, base, base)
    return result


def ppowmod(F: FieldSpec, a, e: int, m) -> tuple[int, ...]:
    result, base = pmod(F, (1,), m), pmod(F, a, m)
    while e:
        if e & 1:
            result = pmod(F, pmul(F, result, base), m)
        e >>= 1
        if e:
            base = pmod(F, pmul(F, base, base), m)
    return result


def peval(F: FieldSpec, a, x: int) -> int:
    result = 0
    mul, add = F.mul, F.add
    for c in reversed(a):
        result = add(mul(result, x), c)
    return result


def pcompose(F: FieldSpec, a, b) -> tuple[int, ...]:
    result = ()
    for c in reversed(a):
        result = padd(F, pmul(F, result, b), (c,) if c else ())
    return result


def pfrobenius(F: FieldSpec, a) -> tuple[int, ...]:
    """Return a^p, using (sum c_i z^i)^p = sum c_i^p z^(ip)."""
    if not a:
        return ()
    p = F.p
    result = [0] * ((len(a) - 1) * p + 1)
    for i, c in enumerate(a):
        result[i * p] = F.frobenius(c)
    return tuple(result)


@dataclass(frozen=True)
class Polynomial:
    """A polynomial in z over F_{p^k}.

    Attributes:
        spec: The coefficient field.
        coeffs: Encoded coefficients, low degree first, no trailing zeros.
    """

    spec: FieldSpec
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", trim(tuple(int(c) for c in self.coeffs)))

    @classmethod
    def zero(cls, spec: FieldSpec) -> "Polynomial":
        return cls(spec, ())

    @classmethod
    def one(cls, spec: FieldSpec) -> "Polynomial":
        return cls(spec, (1,))

    @classmethod
    def z(cls, spec: FieldSpec) -> "Polynomial":
        return cls(spec, (0, 1))

    @classmethod
    def constant(cls, spec: FieldSpec, c) -> "Polynomial":
        return cls(spec, (_value(spec, c),))

    @classmethod
    def monomial(cls, spec: FieldSpec, c, degree: int) -> "Polynomial":
        return cls(spec, (0,) * degree + (_value(spec, c),))

    @classmethod
    def from_elements(cls, spec: FieldSpec, elements) -> "Polynomial":
        return cls(spec, tuple(_value(spec, c) for c in elements))

    @classmethod
    def from_roots(cls, spec: FieldSpec, roots) -> "Polynomial":
        """Return the monic polynomial with the given roots (with repetition)."""
        result = (1,)
        for root in roots:
            result = pmul(spec, result, (spec.neg(_value(spec, root)), 1))
        return cls(spec, result)

    def _other(self, other) -> tuple[int, ...]:
        if isinstance(other, Polynomial):
            if other.spec != self.spec:
                raise FieldMismatchError(
                    f"Cannot combine polynomials over {self.spec} and {other.spec}"
                )
            return other.coeffs
        if isinstance(other, (FieldElement, int, np.integer)):
            return trim((_value(self.spec, other),))
        return NotImplemented

    def _wrap(self, coeffs) -> "Polynomial":
        return Polynomial(self.spec, coeffs)

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> FieldElement:
        return FieldElement(self.spec, self.coeffs[-1] if self.coeffs else 0)

    def coefficient(self, i: int) -> FieldElement:
        return FieldElement(self.spec, self.coeffs[i] if 0 <= i < len(self.coeffs) else 0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __add__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return self._wrap(padd(self.spec, self.coeffs, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return self._wrap(psub(self.spec, self.coeffs, b))

    def __rsub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return self._wrap(psub(self.spec, b, self.coeffs))

    def __neg__(self):
        return self._wrap(pneg(self.spec, self.coeffs))

    def __mul__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return self._wrap(pmul(self.spec, self.coeffs, b))

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        return self._wrap(ppow(self.spec, self.coeffs, exponent))

    def __divmod__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        quotient, remainder = pdivmod(self.spec, self.coeffs, b)
        return self._wrap(quotient), self._wrap(remainder)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __call__(self, x) -> FieldElement:
        return FieldElement(self.spec, peval(self.spec, self.coeffs, _value(self.spec, x)))

    def derivative(self, times: int = 1) -> "Polynomial":
        coeffs = self.coeffs
        for _ in range(times):
            coeffs = pderiv(self.spec, coeffs)
        return self._wrap(coeffs)

    def compose(self, inner: "Polynomial") -> "Polynomial":
        """Return self(inner(z))."""
        return self._wrap(pcompose(self.spec, self.coeffs, self._other(inner)))

    def gcd(self, other: "Polynomial") -> "Polynomial":
        """Monic greatest common divisor; gcd(0, 0) = 0."""
        return self._wrap(pgcd(self.spec, self.coeffs, self._other(other)))

    def lcm(self, other: "Polynomial") -> "Polynomial":
        if self.is_zero() or other.is_zero():
            return Polynomial.zero(self.spec)
        return (self * other // self.gcd(other)).monic()

    def monic(self) -> "Polynomial":
        return self._wrap(pmonic(self.spec, self.coeffs))

    def scale(self, c) -> "Polynomial":
        return self._wrap(pscale(self.spec, self.coeffs, _value(self.spec, c)))

    def frobenius(self) -> "Polynomial":
        """The p-th power of the polynomial."""
        return self._wrap(pfrobenius(self.spec, self.coeffs))

    def powmod(self, exponent: int, modulus: "Polynomial") -> "Polynomial":
        return self._wrap(ppowmod(self.spec, self.coeffs, exponent, modulus.coeffs))

    def is_squarefree(self) -> bool:
        """True iff no irreducible factor is repeated.

        Over a perfect field this is gcd(f, f') = 1. A factor of multiplicity
        divisible by p survives in f' as well, and f' = 0 leaves gcd(f, 0) = f.
        """
        if self.is_zero():
            return False
        return pgcd(self.spec, self.coeffs, pderiv(self.spec, self.coeffs)) == (1,)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            element = self.spec.format(c)
            coefficient = f"({element})" if " " in element else element
            match i:
                case 0:
                    terms.append(coefficient)
                case 1:
                    terms.append("z" if c == 1 else f"{coefficient}*z")
                case _:
                    terms.append(f"z^{i}" if c == 1 else f"{coefficient}*z^{i}")
        return " + ".join(terms)

    def to_record(self) -> list[dict]:
        return [self.spec.element_record(c) for c in self.coeffs]

    @classmethod
    def from_record(cls, spec: FieldSpec, record: list[dict]) -> "Polynomial":
        return cls(spec, tuple(FieldElement.from_record(r, spec).value for r in record))


def _value(spec: FieldSpec, c) -> int:
    if isinstance(c, FieldElement):
        if c.spec != spec:
            raise FieldMismatchError(f"Element of {c.spec} used over {spec}")
        return c.value
    return spec.from_int(int(c))


def roots_exhaustive(f: Polynomial) -> list[tuple[FieldElement, int]]:
    """Find all roots of f in F_{p^k} by evaluating at every element.

    Args:
        f: A nonzero polynomial.

    Returns:
        (root, multiplicity) pairs ordered by encoded value; multiplicities
        are found by repeated division and sum to at most deg f.
    """
    if f.is_zero():
        raise PreconditionError("The zero polynomial has no finite root set")
    if f.degree == 0:
        return []
    spec = f.spec
    gf = spec.galois_field
    evaluated = galois.Poly(gf(list(reversed(f.coeffs))))(gf.elements)
    roots = np.flatnonzero(np.asarray(evaluated, dtype=int) == 0).tolist()
    result = []
    for root in roots:
        multiplicity, remaining = 0, f.coeffs
        linear = (spec.neg(root), 1)
        while True:
            quotient, remainder = pdivmod(spec, remaining, linear)
            if remainder:
                break
            multiplicity, remaining = multiplicity + 1, quotient
        result.append((FieldElement(spec, root), multiplicity))
    return result


def splits(f: Polynomial) -> bool:
    """True iff f is a product of linear factors over its field."""
    return sum(m for _, m in roots_exhaustive(f)) == f.degree


def pth_root_coeffwise(f: Polynomial) -> Polynomial:
    """Apply the Frobenius inverse to every coefficient, keeping degrees."""
    spec = f.spec
    return Polynomial(spec, tuple(spec.frobenius_inverse(c) for c in f.coeffs))


def moore_product(*polys: Polynomial) -> Polynomial:
    """Moore determinant of Q_1, ..., Q_n as a product of F_p-combinations.

    The product runs from the last argument backwards: the i-th factor block
    is prod over (j_1..j_{i-1}) in F_p of (Q_{n+1-i} + sum j_r Q_{n+1-i+r}),
    so that two arguments give moore_product(A, B) = A^p B - A B^p.

    Args:
        polys: One or more polynomials over the same field.

    Returns:
        The product; zero iff the arguments are F_p-linearly dependent.
    """
    if not polys:
        raise PreconditionError("moore_product needs at least one polynomial")
    spec = polys[0].spec
    ordered = list(reversed(polys))
    result = Polynomial.one(spec)
    for i, leading_poly in enumerate(ordered):
        previous = ordered[:i]
        for combination in itertools.product(range(spec.p), repeat=i):
            term = leading_poly
            for j, poly in zip(combination, previous):
                if j:
                    term = term + poly.scale(j)
            result = result * term
            if result.is_zero():
                return result
    return result


def embed_field(source: FieldSpec, target: FieldSpec):
    """Return the embedding F_{p^k} -> F_{p^(kj)} sending t to a root of the modulus.

    Args:
        source: The smaller field.
        target: A field of the same characteristic whose degree is a multiple
            of the source degree.

    Returns:
        A function mapping source FieldElements to target FieldElements.
    """
    if source.p != target.p or target.k % source.k:
        raise PreconditionError(f"{source} does not embed into {target}")
    image_of_t = roots_exhaustive(Polynomial(target, source.modulus))[0][0].value
    powers = [target.pow(image_of_t, i) for i in range(source.k)]

    def embed(x: FieldElement) -> FieldElement:
        if x.spec != source:
            raise FieldMismatchError(f"Element of {x.spec} passed to embedding of {source}")
        value = 0
        for digit, power in zip(source.digits(x.value), powers):
            value = target.add(value, target.mul(digit, power))
        return FieldElement(target, value)

    return embed
