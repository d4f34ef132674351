"""Dense univariate polynomials over the scalar tower, lowest coefficient first."""
from fractions import Fraction

from apps.scalars.numbers import ExtScalar, INF, from_rational, zero


def as_scalars(coeffs, field, precision):
    out = []
    for c in coeffs:
        if isinstance(c, ExtScalar):
            out.append(c.embed(field))
        else:
            out.append(from_rational(c, field=field, precision=precision))
    return out


def trim(coeffs):
    coeffs = list(coeffs)
    while len(coeffs) > 1 and coeffs[-1].is_zero():
        coeffs.pop()
    return coeffs


def degree(coeffs):
    coeffs = trim(coeffs)
    if len(coeffs) == 1 and coeffs[0].is_zero():
        return -1
    return len(coeffs) - 1


def horner(coeffs, x):
    acc = None
    for c in reversed(coeffs):
        acc = c if acc is None else acc * x + c
    return acc


def derivative(coeffs, order=1):
    coeffs = list(coeffs)
    for _ in range(order):
        if len(coeffs) <= 1:
            return [zero(coeffs[0].field)] if coeffs else []
        coeffs = [c * i for i, c in enumerate(coeffs)][1:]
    return coeffs


def taylor_shift(coeffs, a):
    """Coefficients of P(a + y)."""
    shifted = list(coeffs)
    n = len(shifted) - 1
    for i in range(n):
        for j in range(n - 1, i - 1, -1):
            shifted[j] = shifted[j] + a * shifted[j + 1]
    return shifted


def scale_variable(coeffs, c):
    """Coefficients of P(c * y)."""
    out = [coeffs[0]]
    power = c
    for coeff in coeffs[1:]:
        out.append(coeff * power)
        power = power * c
    return out


def mul(a, b):
    out = [None] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            term = ai * bj
            out[i + j] = term if out[i + j] is None else out[i + j] + term
    return out


def add(a, b):
    if len(a) < len(b):
        a, b = b, a
    return [x + y for x, y in zip(a, b)] + list(a[len(b):])


def newton_polygon(coeffs):
    """Lower convex hull of (i, v(c_i)) as (slope, horizontal length) segments.

    Exact zero coefficients are skipped; slopes are exact fractions, in
    increasing order. A segment of slope s and length l accounts for l
    roots of valuation -s.
    """
    points = [(i, c.valuation) for i, c in enumerate(coeffs) if c.valuation != INF]
    hull = []
    for point in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point when it lies on or above the chord
            if (y2 - y1) * (point[0] - x1) >= (point[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(point)
    return [
        (Fraction(y2 - y1, x2 - x1), x2 - x1)
        for (x1, y1), (x2, y2) in zip(hull, hull[1:])
    ]
