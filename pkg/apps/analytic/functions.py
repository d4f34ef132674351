"""Locally analytic functions: power series on pairwise disjoint discs of one radius."""
import logging
from fractions import Fraction

from apps.core.conf import padic_setting
from apps.core.exceptions import (
    IncompatibleDomains,
    NotCovering,
    NotCoveringSigma,
    NotDisjoint,
    OutsideDomain,
    PoleInsideCover,
)
from apps.geometry.discs import distance_exponent, refine_cover
from apps.analytic.series import PowerSeriesOnDisc
from apps.scalars.numbers import ExtScalar, INF, zero
from apps.scalars.numbers import from_rational as scalar_from_rational
from apps.scalars.polynomials import as_scalars, mul as poly_mul, taylor_shift, trim

logger = logging.getLogger(__name__)


class LocallyAnalyticFn:
    """f in B_r(sigma): one PowerSeriesOnDisc per closed disc, all of radius r.

    ``sigma`` is the finite set the function is attached to (the spectrum,
    for the calculus); it decides which pieces must survive alignment.
    """

    def __init__(self, pieces, sigma=()):
        pieces = tuple(pieces)
        if not pieces:
            raise NotCoveringSigma('A locally analytic function needs at least one piece.')
        radius = pieces[0].radius
        for piece in pieces:
            if piece.radius != radius:
                raise IncompatibleDomains(f'Pieces at radii {radius} and {piece.radius}.')
        for i, a in enumerate(pieces):
            for b in pieces[i + 1:]:
                if distance_exponent(a.center, b.center) >= radius.exponent:
                    raise NotDisjoint(f'Pieces at {a.center} and {b.center} overlap.')
        self.pieces = pieces
        self.sigma = tuple(sigma)

    def __repr__(self):
        return f'LocallyAnalyticFn(pieces={len(self.pieces)}, radius={self.radius})'

    @property
    def radius(self):
        return self.pieces[0].radius

    @property
    def discs(self):
        return [piece.disc for piece in self.pieces]

    @property
    def centers(self):
        return [piece.center for piece in self.pieces]

    def piece_at(self, x):
        for piece in self.pieces:
            if piece.disc.contains(x):
                return piece
        return None

    def eval(self, x):
        piece = self.piece_at(x)
        if piece is None:
            raise OutsideDomain(f'{x} lies in no piece of {self!r}.', point=str(x))
        return piece.eval(x)

    __call__ = eval

    def sup_norm(self):
        """Max over the pieces of the coefficient norm max_k r^k |c_k|."""
        return max(piece.sup_norm() for piece in self.pieces)

    def taylor_coefficient(self, x, order):
        piece = self.piece_at(x)
        if piece is None:
            raise OutsideDomain(f'{x} lies in no piece of {self!r}.', point=str(x))
        return piece.taylor_coefficient(x, order)

    def restrict(self, cover):
        """Re-expand on the discs of a finer cover.

        Discs without a point of the cover's set may be dropped; a disc
        holding such a point must sit inside some piece.
        """
        pieces = []
        for disc in cover.discs():
            source = next((piece for piece in self.pieces if piece.disc.contains_disc(disc)), None)
            if source is None:
                if any(disc.contains(x) for x in cover.points):
                    raise IncompatibleDomains(
                        f'{disc.center} at radius {disc.radius} is not inside a piece.', center=str(disc.center),
                    )
                continue
            pieces.append(source.recenter(disc.center, disc.radius))
        return LocallyAnalyticFn(pieces, cover.points)

    def _shared_sigma(self, other):
        return self.sigma or other.sigma

    def align(self, other):
        """Both operands as series on the same discs (the finer radius wins)."""
        if other.radius < self.radius:
            right, left = other.align(self)
            return left, right
        sigma = self._shared_sigma(other)
        left, right = [], []
        for piece in self.pieces:
            source = next((q for q in other.pieces if q.disc.contains_disc(piece.disc)), None)
            if source is None:
                if not sigma or any(piece.disc.contains(x) for x in sigma):
                    raise IncompatibleDomains(
                        f'No piece of the other function contains the disc at {piece.center}.',
                        center=str(piece.center),
                    )
                continue
            left.append(piece)
            right.append(source.recenter(piece.center, piece.radius))
        if sigma:
            for x in sigma:
                if not any(piece.disc.contains(x) for piece in left):
                    raise IncompatibleDomains(f'{x} is lost when aligning the two functions.', point=str(x))
        return LocallyAnalyticFn(left, sigma), LocallyAnalyticFn(right, sigma)

    def _combine(self, other, op):
        if isinstance(other, (int, Fraction, ExtScalar)):
            other = constant_like(self, other)
        left, right = self.align(other)
        return LocallyAnalyticFn([op(a, b) for a, b in zip(left.pieces, right.pieces)], left.sigma)

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, ExtScalar)):
            return self.scale(other)
        return self._combine(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def scale(self, c):
        return LocallyAnalyticFn([piece.scale(c) for piece in self.pieces], self.sigma)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)


def _field_and_precision(cover, precision):
    return cover.centers[0].field, padic_setting('PRECISION') if precision is None else precision


def constant_like(f, c):
    pieces = []
    for piece in f.pieces:
        value = as_scalars([c], piece.center.field, padic_setting('PRECISION'))[0]
        pieces.append(PowerSeriesOnDisc(piece.disc, [value]))
    return LocallyAnalyticFn(pieces, f.sigma)


def constant(cover, c, precision=None):
    field, precision = _field_and_precision(cover, precision)
    value = as_scalars([c], field, precision)[0]
    return LocallyAnalyticFn([PowerSeriesOnDisc(disc, [value]) for disc in cover.discs()], cover.points)


def from_polynomial(coeffs, cover, precision=None):
    """Exact Taylor re-expansion of a polynomial at every center of the cover."""
    field, precision = _field_and_precision(cover, precision)
    coeffs = trim(as_scalars(coeffs, field, precision)) if coeffs else [zero(field)]
    pieces = [PowerSeriesOnDisc(disc, taylor_shift(coeffs, disc.center)) for disc in cover.discs()]
    return LocallyAnalyticFn(pieces, cover.points)


def indicator(cover, selected, precision=None):
    field, precision = _field_and_precision(cover, precision)
    selected = set(selected)
    unknown = selected - set(range(len(cover.centers)))
    if unknown:
        raise IncompatibleDomains(f'Disc indices {sorted(unknown)} are not in the cover.')
    pieces = []
    for i, disc in enumerate(cover.discs()):
        value = scalar_from_rational(1 if i in selected else 0, field=field, precision=precision)
        pieces.append(PowerSeriesOnDisc(disc, [value]))
    return LocallyAnalyticFn(pieces, cover.points)


def from_series(cover, coefficient_lists, precision=None, floor=None):
    """One explicit coefficient list in (x - a_i) per disc of the cover."""
    field, precision = _field_and_precision(cover, precision)
    if len(coefficient_lists) != len(cover.centers):
        raise IncompatibleDomains(
            f'{len(coefficient_lists)} coefficient lists for {len(cover.centers)} discs.',
        )
    floor = precision if floor is None else floor
    pieces = [
        PowerSeriesOnDisc(disc, as_scalars(coeffs, field, precision), floor)
        for disc, coeffs in zip(cover.discs(), coefficient_lists)
    ]
    return LocallyAnalyticFn(pieces, cover.points)


def series_inverse(coeffs, radius_exponent, floor):
    """Coefficients of 1/Q(a + y) while the constant term dominates on |y| <= r.

    Stops once ``len(coeffs) - 1`` consecutive terms have r^k |s_k| below
    p^-floor; every later term is then below it too.
    """
    q0 = coeffs[0]
    inverse_q0 = q0.inverse()
    width = max(len(coeffs) - 1, 1)
    out = [inverse_q0]
    quiet = 0
    k = 0
    while quiet < width:
        k += 1
        acc = None
        for j in range(1, min(k, len(coeffs) - 1) + 1):
            term = coeffs[j] * out[k - j]
            acc = term if acc is None else acc + term
        s_k = zero(q0.field) if acc is None else -(acc * inverse_q0)
        out.append(s_k)
        quiet = quiet + 1 if s_k.valuation + k * radius_exponent > floor else 0
    return out[: len(out) - width] or out[:1]


def _pole_check(poles, disc):
    for pole in poles:
        if disc.contains(pole):
            raise PoleInsideCover(f'Pole {pole} lies in the disc at {disc.center}.', pole=str(pole))


def from_rational(numerator, denominator, cover, poles=(), precision=None):
    """P/Q expanded on every disc; Q shifted to the center must have a dominant constant term."""
    field, precision = _field_and_precision(cover, precision)
    numerator = trim(as_scalars(numerator, field, precision)) if numerator else [zero(field)]
    denominator = trim(as_scalars(denominator, field, precision))
    if len(denominator) == 1:
        if denominator[0].is_zero():
            raise PoleInsideCover('The denominator vanishes identically.')
        inverse = denominator[0].inverse()
        return from_polynomial([c * inverse for c in numerator], cover, precision)
    poles = [p if isinstance(p, ExtScalar) else as_scalars([p], field, precision)[0] for p in poles]
    pieces = []
    for disc in cover.discs():
        _pole_check(poles, disc)
        m = disc.radius.exponent
        shifted = taylor_shift(denominator, disc.center)
        lead = shifted[0].valuation
        if lead == INF or any(c.valuation + k * m <= lead for k, c in enumerate(shifted) if k):
            raise PoleInsideCover(
                f'The denominator has a zero in the disc at {disc.center}.', center=str(disc.center),
            )
        floor = precision + abs(lead)
        inverse = series_inverse(shifted, m, floor)
        coeffs = poly_mul(taylor_shift(numerator, disc.center), inverse)
        pieces.append(PowerSeriesOnDisc(disc, coeffs, floor))
        logger.debug('rational piece at %s: %s terms', disc.center, len(pieces[-1].coeffs))
    return LocallyAnalyticFn(pieces, cover.points)


def fitted_cover(f, sigma):
    """The cover of sigma by the pieces of f that meet it, with the kept piece indices."""
    try:
        return refine_cover(sigma, f.centers, f.radius)
    except NotCovering as exc:
        raise NotCoveringSigma(str(exc.detail), **exc.extra) from exc


def check_Br(f, sigma):
    """Common radius r with f in B_r(sigma) for the stored representation."""
    fitted_cover(f, sigma)
    return f.radius
