import hypothesis.strategies as st
from hypothesis import assume

from src.logforms.field import FieldElement, FieldSpec, field_spec
from src.logforms.polynomial import Polynomial

SMALL_FIELDS = [
    field_spec(2, 1),
    field_spec(2, 2),
    field_spec(2, 3),
    field_spec(3, 1),
    field_spec(3, 2),
    field_spec(3, 3),
    field_spec(5, 1),
    field_spec(5, 2),
    field_spec(5, 3),
    field_spec(7, 1),
    field_spec(7, 2),
]


def fields() -> st.SearchStrategy[FieldSpec]:
    return st.sampled_from(SMALL_FIELDS)


def elements(spec: FieldSpec, nonzero: bool = False) -> st.SearchStrategy[FieldElement]:
    return st.integers(1 if nonzero else 0, spec.q - 1).map(lambda value: FieldElement(spec, value))


def polynomials(spec: FieldSpec, max_degree: int = 6, monic: bool = False) -> st.SearchStrategy[Polynomial]:
    coefficients = st.lists(st.integers(0, spec.q - 1), min_size=0, max_size=max_degree + 1)
    if monic:
        return coefficients.map(lambda c: Polynomial(spec, tuple(c) + (1,)))
    return coefficients.map(lambda c: Polynomial(spec, tuple(c)))


@st.composite
def field_and_elements(draw, count: int = 2, nonzero: bool = False):
    spec = draw(fields())
    return (spec, *[draw(elements(spec, nonzero)) for _ in range(count)])


@st.composite
def field_and_polynomials(draw, count: int = 2, max_degree: int = 6, monic: bool = False):
    spec = draw(fields())
    return (spec, *[draw(polynomials(spec, max_degree, monic)) for _ in range(count)])


@st.composite
def forms(draw, max_degree: int = 5):
    """Draw a field with a numerator and a nonzero denominator.

    Half of the draws are f' and f, so that df/f shows up as often as a
    random fraction does.
    """
    spec = draw(fields())
    if draw(st.booleans()):
        f = draw(polynomials(spec, max_degree, monic=True))
        return spec, f.derivative(), f
    numerator = draw(polynomials(spec, max_degree))
    denominator = draw(polynomials(spec, max_degree, monic=True))
    return spec, numerator, denominator


@st.composite
def independent_pairs(draw, max_degree: int = 3):
    """Draw (A, B) of equal degree whose leading coefficients are F_p-independent.

    deg(iA + jB) is then the same for every (i : j) in P^1(F_p).
    """
    spec = draw(st.sampled_from([s for s in SMALL_FIELDS if s.k > 1]))
    degree = draw(st.integers(1, max_degree))
    lead_a = draw(elements(spec, nonzero=True))
    lead_b = draw(elements(spec, nonzero=True))
    assume(all(lead_b != lead_a * j for j in range(1, spec.p)))
    tail_a = draw(st.lists(st.integers(0, spec.q - 1), min_size=degree, max_size=degree))
    tail_b = draw(st.lists(st.integers(0, spec.q - 1), min_size=degree, max_size=degree))
    big_a = Polynomial(spec, tuple(tail_a) + (lead_a.value,))
    big_b = Polynomial(spec, tuple(tail_b) + (lead_b.value,))
    return big_a, big_b
