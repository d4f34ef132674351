"""Division-free characteristic polynomials (Berkowitz)."""
from apps.scalars.numbers import one, zero
from apps.scalars.polynomials import mul as poly_mul


def _matvec(rows, column, field):
    return [sum((a * b for a, b in zip(row, column) if not (a.is_zero() or b.is_zero())), zero(field)) for row in rows]


def _berkowitz(rows, field, precision):
    """det(xI - A) for the square list ``rows``, highest coefficient first."""
    m = len(rows)
    unit = one(field, precision)
    if m == 0:
        return [unit]
    if m == 1:
        return [unit, -rows[0][0]]
    a = rows[0][0]
    r = rows[0][1:]
    c = [row[0] for row in rows[1:]]
    sub = [row[1:] for row in rows[1:]]
    q = _berkowitz(sub, field, precision)
    # Toeplitz column: 1, -a, -R C, -R A C, -R A^2 C, ...
    column = [unit, -a]
    power = c
    for _ in range(m - 1):
        column.append(-sum((x * y for x, y in zip(r, power)), zero(field)))
        power = _matvec(sub, power, field)
    out = []
    for i in range(m + 1):
        acc = zero(field)
        for j in range(min(i, m - 1) + 1):
            acc = acc + column[i - j] * q[j]
        out.append(acc)
    return out


def char_poly(a):
    """Coefficients of det(xI - A), lowest first; monic of degree d."""
    field = a.field
    precision = a.precision
    if a.is_upper_triangular():
        coeffs = [one(field, precision)]
        for value in a.diagonal_entries():
            coeffs = poly_mul(coeffs, [-value, one(field, precision)])
        return coeffs
    return list(reversed(_berkowitz([list(row) for row in a.rows], field, precision)))
