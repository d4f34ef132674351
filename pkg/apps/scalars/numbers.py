"""Fixed-precision elements of Q_p and of its unramified extensions.

An element is stored capped-relative: ``p**valuation * u`` where the unit
``u`` is a digit vector over the power basis 1, w, ..., w^{f-1} known mod
``p**precision``. Every zero has valuation ``INF``. For the exact zero
``precision`` is ``INF``; a zero left by cancellation stores the absolute
bound k of O(p^k) there instead.
"""
import math
import re
from fractions import Fraction

from sympy import multiplicity

from apps.core.exceptions import DivisionByZero, FieldMismatch, PrecisionExhausted
from apps.core.conf import padic_setting
from apps.scalars.fields import unramified_field

INF = math.inf


def _make(field, valuation, digits, precision):
    """Normalize raw digits into an element: reduce, strip powers of p."""
    if precision <= 0:
        return zero(field, valuation + precision)
    p = field.p
    q = p**precision
    digits = [d % q for d in digits]
    if not any(digits):
        return zero(field, valuation + precision)
    shift = min(multiplicity(p, d) for d in digits if d)
    if shift:
        scale = p**shift
        digits = [d // scale for d in digits]
        valuation += shift
        precision -= shift
    cls = PAdicScalar if field.degree == 1 else ExtScalar
    return cls(field, valuation, tuple(digits), precision)


def zero(field, bound=INF):
    """The exact zero, or O(p**bound) when ``bound`` is finite."""
    cls = PAdicScalar if field.degree == 1 else ExtScalar
    return cls(field, INF, (0,) * field.degree, bound)


def _capped(x, bound):
    if bound == INF:
        return x
    if x.is_zero():
        return zero(x.field, min(x.precision, bound))
    if x.valuation >= bound:
        return zero(x.field, bound)
    return _make(x.field, x.valuation, x.digits, min(x.precision, bound - x.valuation))


def _product_bound(x, y):
    """Valuation bound of x * y when one factor is a zero."""
    return sum(z.precision if z.is_zero() else z.valuation for z in (x, y))


def one(field, precision):
    return _make(field, 0, (1,) + (0,) * (field.degree - 1), precision)


def from_digits(field, valuation, digits, precision):
    """Element p**valuation * sum(digits[i] * w**i) known to ``precision`` digits."""
    digits = tuple(digits) + (0,) * (field.degree - len(digits))
    return _make(field, valuation, digits, precision)


def from_rational(a, b=1, *, field, precision):
    """The image of a/b in ``field``: v = ord(a) - ord(b), unit mod p**precision."""
    if b == 0:
        raise DivisionByZero(f'{a}/0 is not a rational number.')
    value = Fraction(a) / Fraction(b)
    if value == 0:
        return zero(field)
    p = field.p
    num, den = value.numerator, value.denominator
    v_num = multiplicity(p, num)
    v_den = multiplicity(p, den)
    q = p**precision
    unit = ((num // p**v_num) * pow(den // p**v_den, -1, q)) % q
    return _make(field, v_num - v_den, (unit,) + (0,) * (field.degree - 1), precision)


def from_residue(field, residue, precision):
    """Naive lift of a residue-field element (digits taken in [0, p))."""
    return from_digits(field, 0, field.residue.to_digits(residue), precision)


class ExtScalar:
    __slots__ = ('field', 'valuation', 'digits', 'precision')

    def __init__(self, field, valuation, digits, precision):
        self.field = field
        self.valuation = valuation
        self.digits = digits
        self.precision = precision

    @property
    def prime(self):
        return self.field.p

    @property
    def degree(self):
        return self.field.degree

    @property
    def absolute_precision(self):
        if self.is_zero():
            return self.precision
        return self.valuation + self.precision

    def is_zero(self):
        return self.valuation == INF

    def norm(self):
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.prime) ** (-self.valuation)

    def residue(self):
        if self.valuation < 0:
            raise ValueError(f'{self!r} is not integral.')
        if self.valuation > 0:
            return ()
        return self.field.residue.from_digits(self.digits)

    def coordinates(self):
        base = unramified_field(self.prime, 1)
        if self.is_zero():
            return [zero(base, self.precision)] * self.degree
        return [_make(base, self.valuation, (d,), self.precision) for d in self.digits]

    def with_precision(self, precision):
        """Same value truncated to at most ``precision`` relative digits."""
        if self.is_zero():
            return self
        if precision <= 0:
            raise PrecisionExhausted(f'Cannot keep {precision} digits of {self!r}.')
        return _make(self.field, self.valuation, self.digits, min(precision, self.precision))

    def embed(self, target):
        if target is self.field:
            return self
        if not target.contains(self.field):
            raise FieldMismatch(f'{self.field!r} does not embed into {target!r}.')
        if self.is_zero():
            return zero(target, self.precision)
        digits = target.embed_digits(self.digits, self.degree, self.precision)
        return _make(target, self.valuation, digits, self.precision)

    def project(self, target):
        if target is self.field:
            return self
        if not self.field.contains(target):
            raise FieldMismatch(f'{target!r} is not a subfield of {self.field!r}.')
        if self.is_zero():
            return zero(target, self.precision)
        digits = self.field.project_digits(self.digits, target.degree, self.precision)
        if digits is None:
            raise FieldMismatch(f'{self!r} does not lie in {target!r}.')
        return _make(target, self.valuation, digits, self.precision)

    def _coercion_precision(self):
        if self.is_zero():
            return padic_setting('PRECISION')
        return max(self.precision, self.absolute_precision, padic_setting('PRECISION'))

    def _coerce(self, other):
        if isinstance(other, ExtScalar):
            if other.field is self.field:
                return self, other
            if other.prime != self.prime:
                raise FieldMismatch(f'Cannot mix p={self.prime} and p={other.prime}.')
            if self.field.contains(other.field):
                return self, other.embed(self.field)
            if other.field.contains(self.field):
                return self.embed(other.field), other
            raise FieldMismatch(f'{self.field!r} and {other.field!r} do not embed into each other.')
        if isinstance(other, (int, Fraction)):
            return self, from_rational(other, field=self.field, precision=self._coercion_precision())
        return None

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        x, y = pair
        if x.is_zero():
            return _capped(y, x.precision)
        if y.is_zero():
            return _capped(x, y.precision)
        if x.valuation > y.valuation:
            x, y = y, x
        shift = y.valuation - x.valuation
        if shift >= x.precision:
            return x
        p = x.prime
        precision = min(x.precision, shift + y.precision)
        scale = p**shift
        digits = [a + scale * b for a, b in zip(x.digits, y.digits)]
        return _make(x.field, x.valuation, digits, precision)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        q = self.prime**self.precision
        return type(self)(self.field, self.valuation, tuple((-d) % q for d in self.digits), self.precision)

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        x, y = pair
        return x + (-y)

    def __rsub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        x, y = pair
        return y + (-x)

    def __mul__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        x, y = pair
        if x.is_zero() or y.is_zero():
            return zero(x.field, _product_bound(x, y))
        precision = min(x.precision, y.precision)
        digits = x.field.mul_digits(x.digits, y.digits, x.prime**precision)
        return type(x)(x.field, x.valuation + y.valuation, digits, precision)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            if self.precision != INF:
                raise PrecisionExhausted(f'Cannot invert O({self.prime}^{self.precision}): no significant digits left.')
            raise DivisionByZero('Zero has no inverse.')
        digits = self.field.inv_digits(self.digits, self.precision)
        return type(self)(self.field, -self.valuation, digits, self.precision)

    def __truediv__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        x, y = pair
        return x * y.inverse()

    def __rtruediv__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return NotImplemented
        x, y = pair
        return y * x.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return one(self.field, self._coercion_precision())
        if self.is_zero():
            return zero(self.field, n * self.precision)
        digits = self.field.pow_digits(self.digits, n, self.prime**self.precision)
        return type(self)(self.field, n * self.valuation, digits, self.precision)

    def equals(self, other, digits=None):
        """Equality at precision M: |x - y|_p <= p^{-M} (default M = N - G)."""
        if digits is None:
            digits = padic_setting('PRECISION') - padic_setting('GUARD_DIGITS')
        return (self - other).valuation >= digits

    def __eq__(self, other):
        if not isinstance(other, ExtScalar):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero() and self.prime == other.prime and self.degree == other.degree
        return (
            self.prime == other.prime
            and self.degree == other.degree
            and self.valuation == other.valuation
            and self.precision == other.precision
            and self.digits == other.digits
        )

    def __hash__(self):
        if self.is_zero():
            return hash((self.prime, self.degree, INF))
        return hash((self.prime, self.degree, self.valuation, self.precision, self.digits))

    def render(self):
        return [c.render() for c in self.coordinates()]

    def __str__(self):
        return '[' + ', '.join(self.render()) + ']'

    def __repr__(self):
        return f'{type(self).__name__}({self}, field={self.field!r})'


class PAdicScalar(ExtScalar):
    """Element of Q_p: ``p**valuation * unit`` with ``unit`` known mod ``p**precision``."""
    __slots__ = ()

    @property
    def unit(self):
        return self.digits[0]

    def render(self):
        if self.is_zero():
            return '0'
        p = self.prime
        unit = self.unit
        terms = []
        for i in range(self.precision):
            unit, d = divmod(unit, p)
            if i == 0:
                terms.append(f'{d}')
            elif i == 1:
                terms.append(f'{d}*{p}')
            else:
                terms.append(f'{d}*{p}^{i}')
        return f'{p}^{self.valuation} * ({" + ".join(terms)}) + O({p}^{self.absolute_precision})'

    def __str__(self):
        return self.render()


DIGIT_FORMAT = re.compile(
    r'^\s*(?P<p>\d+)\^(?P<v>-?\d+)\s*\*\s*\((?P<terms>[^)]*)\)\s*(?:\+\s*O\((?P<q>\d+)\^(?P<abs>-?\d+)\))?\s*$'
)
TERM = re.compile(r'^(?P<d>\d+)(?:\*(?P<p>\d+)(?:\^(?P<i>\d+))?)?$')
RATIONAL = re.compile(r'^\s*-?\d+(?:\s*/\s*-?\d+)?\s*$')


def parse_digit_string(text, field, precision):
    match = DIGIT_FORMAT.match(text)
    if match is None:
        raise ValueError(f'{text!r} is not in digit format.')
    p = field.p
    if int(match['p']) != p:
        raise FieldMismatch(f'{text!r} is written in base {match["p"]}, expected {p}.')
    valuation = int(match['v'])
    unit = 0
    count = 0
    for term in match['terms'].split('+'):
        term = term.strip().replace(' ', '')
        parsed = TERM.match(term)
        if parsed is None:
            raise ValueError(f'Bad digit term {term!r}.')
        digit = int(parsed['d'])
        if digit >= p:
            raise ValueError(f'Digit {digit} is not below {p}.')
        exponent = 0 if parsed['p'] is None else int(parsed['i'] or 1)
        unit += digit * p**exponent
        count = max(count, exponent + 1)
    if match['abs'] is not None:
        digits = int(match['abs']) - valuation
    else:
        digits = max(count, precision)
    return from_digits(unramified_field(p, 1), valuation, (unit,), digits)


def parse_scalar(token, field, precision):
    """Parse an int, a Fraction, a rational or digit string, or a coordinate list."""
    if isinstance(token, ExtScalar):
        return token.embed(field)
    if isinstance(token, bool):
        raise ValueError('Booleans are not scalars.')
    if isinstance(token, (int, Fraction)):
        return from_rational(token, field=field, precision=precision)
    if isinstance(token, str):
        text = token.strip()
        if text == '0':
            return zero(field)
        if RATIONAL.match(text):
            numerator, _, denominator = text.replace(' ', '').partition('/')
            return from_rational(int(numerator), int(denominator or 1), field=field, precision=precision)
        return parse_digit_string(text, field, precision).embed(field)
    if isinstance(token, (list, tuple)):
        source = unramified_field(field.p, len(token))
        base = unramified_field(field.p, 1)
        coords = [parse_scalar(c, base, precision) for c in token]
        value = zero(source)
        power = one(source, precision)
        generator = from_digits(source, 0, (0, 1), precision) if source.degree > 1 else one(source, precision)
        for c in coords:
            value = value + c.embed(source) * power
            power = power * generator
        return value.embed(field)
    raise ValueError(f'Cannot read a scalar from {token!r}.')


def rational_reconstruction(x):
    """Smallest a/b with a/b = x to the known precision of x (Q_p only)."""
    if x.degree != 1:
        raise FieldMismatch('Rational reconstruction needs an element of Q_p.')
    if x.is_zero():
        return Fraction(0)
    p = x.prime
    modulus = p**x.precision
    bound = math.isqrt(modulus // 2)
    r0, r1 = modulus, x.unit
    s0, s1 = 0, 1
    while r1 > bound:
        quotient = r0 // r1
        r0, r1 = r1, r0 - quotient * r1
        s0, s1 = s1, s0 - quotient * s1
    if s1 == 0 or abs(s1) > bound:
        raise PrecisionExhausted(f'{x!r} has no small rational representative.')
    return Fraction(r1, s1) * Fraction(p) ** x.valuation
