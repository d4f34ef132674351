"""Dense square matrices over the scalar tower with the max-entry norm."""
import logging
from fractions import Fraction

from apps.core.conf import padic_setting
from apps.core.exceptions import DimensionMismatch, FieldMismatch, SingularToPrecision
from apps.scalars.numbers import ExtScalar, INF, one, parse_scalar, zero

logger = logging.getLogger(__name__)


def _widest_field(fields):
    fields = list(fields)
    widest = max(fields, key=lambda f: f.degree)
    for f in fields:
        if not widest.contains(f):
            raise FieldMismatch(f'{f!r} does not embed into {widest!r}.')
    return widest


class PAdicMatrix:
    """Square matrix of ExtScalar entries, all in one field.

    ``@`` is the matrix product and ``*`` scales by a scalar; the norm is
    the largest entry norm, which is the operator norm for the sup norm.
    """
    __slots__ = ('rows', 'field')

    def __init__(self, rows):
        rows = [list(row) for row in rows]
        size = len(rows)
        if not size or any(len(row) != size for row in rows):
            raise DimensionMismatch(f'Expected a square matrix, got rows of lengths {[len(r) for r in rows]}.')
        field = _widest_field(x.field for row in rows for x in row)
        self.rows = tuple(tuple(x.embed(field) for x in row) for row in rows)
        self.field = field

    @classmethod
    def from_entries(cls, entries, field, precision=None):
        precision = padic_setting('PRECISION') if precision is None else precision
        return cls([[parse_scalar(token, field, precision) for token in row] for row in entries])

    @classmethod
    def identity(cls, size, field, precision=None):
        return cls.scalar(one(field, padic_setting('PRECISION') if precision is None else precision), size)

    @classmethod
    def zeros(cls, size, field):
        return cls([[zero(field)] * size for _ in range(size)])

    @classmethod
    def scalar(cls, c, size):
        return cls.diagonal([c] * size)

    @classmethod
    def diagonal(cls, values):
        values = list(values)
        z = zero(values[0].field)
        return cls([[v if i == j else z for j in range(len(values))] for i, v in enumerate(values)])

    @property
    def size(self):
        return len(self.rows)

    @property
    def precision(self):
        return max((x.precision for row in self.rows for x in row if not x.is_zero()), default=padic_setting('PRECISION'))

    def __getitem__(self, index):
        i, j = index
        return self.rows[i][j]

    def __iter__(self):
        return iter(self.rows)

    def __repr__(self):
        return f'PAdicMatrix(size={self.size}, field={self.field!r})'

    def __str__(self):
        return '\n'.join('  '.join(str(x) for x in row) for row in self.rows)

    def render(self):
        return [[x.render() for x in row] for row in self.rows]

    @property
    def valuation(self):
        """min entry valuation, INF for the zero matrix."""
        return min((x.valuation for row in self.rows for x in row), default=INF)

    def norm(self):
        v = self.valuation
        return Fraction(0) if v == INF else Fraction(self.field.p) ** (-v)

    def is_zero(self):
        return self.valuation == INF

    def is_upper_triangular(self):
        return all(self.rows[i][j].is_zero() for i in range(self.size) for j in range(i))

    def diagonal_entries(self):
        return [self.rows[i][i] for i in range(self.size)]

    def equals(self, other, digits=None):
        if digits is None:
            digits = padic_setting('PRECISION') - padic_setting('GUARD_DIGITS')
        return (self - other).valuation >= digits

    def embed(self, field):
        if field is self.field:
            return self
        return PAdicMatrix([[x.embed(field) for x in row] for row in self.rows])

    def _aligned(self, other):
        if other.size != self.size:
            raise DimensionMismatch(f'Sizes {self.size} and {other.size} differ.')
        if other.field is self.field:
            return self, other
        field = _widest_field([self.field, other.field])
        return self.embed(field), other.embed(field)

    def block_repeat(self, copies):
        """diag(A, ..., A) with ``copies`` blocks."""
        size = self.size
        z = zero(self.field)
        rows = []
        for block in range(copies):
            for row in self.rows:
                rows.append([z] * (block * size) + list(row) + [z] * ((copies - block - 1) * size))
        return PAdicMatrix(rows)

    def __add__(self, other):
        if not isinstance(other, PAdicMatrix):
            return NotImplemented
        a, b = self._aligned(other)
        return PAdicMatrix([[x + y for x, y in zip(r, s)] for r, s in zip(a.rows, b.rows)])

    def __neg__(self):
        return PAdicMatrix([[-x for x in row] for row in self.rows])

    def __sub__(self, other):
        if not isinstance(other, PAdicMatrix):
            return NotImplemented
        return self + (-other)

    def __matmul__(self, other):
        if not isinstance(other, PAdicMatrix):
            return NotImplemented
        a, b = self._aligned(other)
        columns = list(zip(*b.rows))
        out = []
        for row in a.rows:
            out_row = []
            for column in columns:
                acc = zero(a.field)
                for x, y in zip(row, column):
                    if not (x.is_zero() or y.is_zero()):
                        acc = acc + x * y
                out_row.append(acc)
            out.append(out_row)
        return PAdicMatrix(out)

    def __mul__(self, c):
        if isinstance(c, PAdicMatrix):
            return NotImplemented
        if not isinstance(c, (ExtScalar, int, Fraction)):
            return NotImplemented
        return PAdicMatrix([[x * c for x in row] for row in self.rows])

    __rmul__ = __mul__

    def __pow__(self, k):
        result = PAdicMatrix.identity(self.size, self.field, self.precision)
        for _ in range(k):
            result = result @ self
        return result

    def shift(self, c):
        """A - c I."""
        if not isinstance(c, ExtScalar):
            c = parse_scalar(c, self.field, self.precision)
        return self - PAdicMatrix.scalar(c, self.size)

    def apply(self, vector):
        return [sum((x * v for x, v in zip(row, vector)), zero(self.field)) for row in self.rows]

    def inverse(self):
        return mat_inverse(self)


def mat_add(a, b):
    return a + b


def mat_mul(a, b):
    return a @ b


def mat_scale(c, a):
    return a * c


def mat_norm(a):
    return a.norm()


def mat_inverse(a):
    """Gauss-Jordan elimination, pivoting on the entry of least valuation in each column."""
    size = a.size
    identity = PAdicMatrix.identity(size, a.field, a.precision)
    work = [list(row) + list(unit) for row, unit in zip(a.rows, identity.rows)]
    for col in range(size):
        pivot_row = min(range(col, size), key=lambda i: work[i][col].valuation)
        pivot = work[pivot_row][col]
        if pivot.is_zero():
            raise SingularToPrecision(f'No nonzero pivot in column {col}.', column=col)
        work[col], work[pivot_row] = work[pivot_row], work[col]
        inverse = pivot.inverse()
        work[col] = [x * inverse for x in work[col]]
        for i in range(size):
            factor = work[i][col]
            if i == col or factor.is_zero():
                continue
            work[i] = [x - factor * y for x, y in zip(work[i], work[col])]
    logger.debug('inverted %sx%s matrix over %r', size, size, a.field)
    return PAdicMatrix([row[size:] for row in work])
