import logging
from functools import lru_cache

from sympy import isprime

from apps.core.conf import padic_setting, working_digits
from apps.core.exceptions import DegreeCapExceeded, ReducibleModulus
from apps.scalars import numbers, roots
from apps.scalars.fields import unramified_field

logger = logging.getLogger(__name__)


class FieldTower:
    """Q_p and its unramified extensions up to ``degree_cap`` at precision N.

    The tower is the single handle the rest of the library takes: it fixes
    p, N, the guard digits and the extension cap, and builds scalars.
    """

    def __init__(self, p, precision, degree_cap, guard_digits):
        if not isprime(p):
            raise ReducibleModulus(f'{p} is not prime.')
        self.p = p
        self.precision = precision
        self.degree_cap = degree_cap
        self.guard_digits = guard_digits

    def __repr__(self):
        return f'FieldTower(p={self.p}, N={self.precision}, cap={self.degree_cap})'

    @property
    def working_digits(self):
        return working_digits(self.precision, self.guard_digits)

    @property
    def base(self):
        return unramified_field(self.p, 1)

    def field(self, degree=1):
        if degree > self.degree_cap:
            raise DegreeCapExceeded(
                f'Degree {degree} exceeds the cap {self.degree_cap}.', degree=degree, cap=self.degree_cap,
            )
        return unramified_field(self.p, degree)

    def from_rational(self, a, b=1, degree=1):
        return numbers.from_rational(a, b, field=self.field(degree), precision=self.precision)

    def zero(self, degree=1):
        return numbers.zero(self.field(degree))

    def one(self, degree=1):
        return numbers.one(self.field(degree), self.precision)

    def uniformizer_power(self, exponent, degree=1):
        return self.from_rational(self.p, 1, degree) ** exponent

    def parse(self, token, degree=1):
        return numbers.parse_scalar(token, self.field(degree), self.precision)

    def teichmuller(self, residue, degree):
        return roots.teichmuller(residue, self.field(degree), self.precision)

    def roots_of_unity(self, n, degree=None):
        return roots.roots_of_unity(n, self.p, self.precision, self.degree_cap, degree)

    def hensel_root(self, poly, seed, degree=1):
        return roots.hensel_root(poly, seed, self.field(degree), self.precision)

    def polynomial_roots(self, coeffs, degree=1):
        return roots.polynomial_roots(coeffs, self.field(degree), self.precision, self.working_digits)


@lru_cache(maxsize=None)
def _tower(p, precision, degree_cap, guard_digits):
    logger.debug('new tower p=%s N=%s cap=%s G=%s', p, precision, degree_cap, guard_digits)
    return FieldTower(p, precision, degree_cap, guard_digits)


def get_tower(p, precision=None, degree_cap=None, guard_digits=None):
    """Shared tower for (p, N, cap, G); unset values come from ``settings.PADIC``."""
    return _tower(
        p,
        padic_setting('PRECISION') if precision is None else precision,
        padic_setting('DEGREE_CAP') if degree_cap is None else degree_cap,
        padic_setting('GUARD_DIGITS') if guard_digits is None else guard_digits,
    )
