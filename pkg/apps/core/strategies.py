"""Hypothesis strategies shared by the app test suites."""
from fractions import Fraction

from hypothesis import strategies as st

SMALL_PRIMES = (2, 3, 5, 7)

primes = st.sampled_from(SMALL_PRIMES)


@st.composite
def rationals(draw, bound=10**4, nonzero=False):
    numerator = draw(st.integers(min_value=-bound, max_value=bound).filter(lambda n: n or not nonzero))
    denominator = draw(st.integers(min_value=1, max_value=bound))
    return Fraction(numerator, denominator)


@st.composite
def scalars(draw, tower, degree=1, bound=10**4, nonzero=False):
    """Elements of Q_{p^degree} with small rational coordinates."""
    coords = [draw(rationals(bound=bound)) for _ in range(degree)]
    if nonzero and not any(coords):
        coords[0] = Fraction(1)
    value = tower.zero(degree)
    basis = tower.one(degree)
    generator = tower.parse([0, 1] + [0] * (degree - 2), degree) if degree > 1 else basis
    for c in coords:
        value = value + tower.from_rational(c.numerator, c.denominator, degree) * basis
        basis = basis * generator
    return value

