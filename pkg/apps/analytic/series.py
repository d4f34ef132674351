"""Truncated power series on closed discs (Krasner analytic pieces)."""
from fractions import Fraction
from math import comb

from apps.core.exceptions import IncompatibleDomains, OutsideDomain
from apps.geometry.discs import CLOSED, Disc
from apps.scalars.numbers import INF, zero
from apps.scalars.polynomials import add as poly_add
from apps.scalars.polynomials import horner, mul as poly_mul, taylor_shift


class PowerSeriesOnDisc:
    """f(x) = sum c_k (x - a)^k on D_a(r).

    ``floor`` is the truncation exponent N: trailing terms with
    r^k |c_k| < p^-N are dropped and the tail is declared below that floor.
    ``floor=None`` keeps every coefficient (exact polynomials).
    """

    def __init__(self, disc, coeffs, floor=None):
        if disc.kind != CLOSED:
            disc = disc.as_kind(CLOSED)
        coeffs = list(coeffs) or [zero(disc.center.field)]
        self.disc = disc
        self.floor = floor
        if floor is not None:
            while len(coeffs) > 1 and self._term_valuation(coeffs, len(coeffs) - 1) > floor:
                coeffs.pop()
        self.coeffs = tuple(coeffs)

    def _term_valuation(self, coeffs, k):
        return coeffs[k].valuation + k * self.disc.radius.exponent

    def __repr__(self):
        return f'PowerSeriesOnDisc(center={self.center}, radius={self.radius}, terms={len(self.coeffs)})'

    @property
    def center(self):
        return self.disc.center

    @property
    def radius(self):
        return self.disc.radius

    @property
    def truncation(self):
        return len(self.coeffs)

    def term_valuation(self, k):
        """-log_p of r^k |c_k|_p."""
        return self._term_valuation(self.coeffs, k)

    def krasner_certificate(self):
        """Stored terms are finite and the last one sits at or above the floor."""
        if self.floor is None:
            return True
        last = self.term_valuation(len(self.coeffs) - 1)
        return last == INF and len(self.coeffs) == 1 or last <= self.floor

    def eval(self, x):
        if not self.disc.contains(x):
            raise OutsideDomain(f'{x} is outside {self.disc}.', point=str(x))
        return horner(self.coeffs, x - self.center)

    __call__ = eval

    def sup_valuation(self):
        return min(self.term_valuation(k) for k in range(len(self.coeffs)))

    def sup_norm(self):
        """max_k r^k |c_k|_p, the maximum of |f| on the disc."""
        v = self.sup_valuation()
        if v == INF:
            return Fraction(0)
        return Fraction(self.center.prime) ** (-v)

    def taylor_coefficient(self, point, order):
        """Coefficient of (x - point)^order in the expansion at ``point``."""
        if not self.disc.contains(point):
            raise OutsideDomain(f'{point} is outside {self.disc}.', point=str(point))
        offset = point - self.center
        total = zero(self.center.field)
        power = None  # offset^(k - order)
        for k in range(order, len(self.coeffs)):
            c = self.coeffs[k] * comb(k, order)
            total = total + (c if power is None else c * power)
            power = offset if power is None else power * offset
        return total

    def recenter(self, center, radius=None):
        """Re-expansion on D_center(radius), a subdisc of this disc."""
        radius = self.radius if radius is None else radius
        target = Disc(center, radius)
        if not self.disc.contains_disc(target):
            raise IncompatibleDomains(f'{target} is not inside {self.disc}.')
        return PowerSeriesOnDisc(target, taylor_shift(self.coeffs, center - self.center), self.floor)

    def _floor_with(self, other):
        if self.floor is None:
            return other.floor
        if other.floor is None:
            return self.floor
        return min(self.floor, other.floor)

    def _check_same_disc(self, other):
        if other.radius != self.radius or not self.disc.contains(other.center):
            raise IncompatibleDomains('Series live on different discs.')
        if other.center == self.center:
            return other
        return other.recenter(self.center)

    def __add__(self, other):
        other = self._check_same_disc(other)
        return PowerSeriesOnDisc(self.disc, poly_add(self.coeffs, other.coeffs), self._floor_with(other))

    def __mul__(self, other):
        other = self._check_same_disc(other)
        return PowerSeriesOnDisc(self.disc, poly_mul(self.coeffs, other.coeffs), self._floor_with(other))

    def scale(self, c):
        return PowerSeriesOnDisc(self.disc, [c * a for a in self.coeffs], self.floor)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)
