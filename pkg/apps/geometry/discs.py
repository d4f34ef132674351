"""Radii in p^Z, closed and open discs, and disjoint covers of finite sets."""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

from sympy import multiplicity

from apps.core.exceptions import (
    EmptySet,
    IncompatibleDomains,
    NotCovering,
    NotDisjoint,
    RadiusUnrealizable,
)
from apps.scalars.numbers import INF

logger = logging.getLogger(__name__)

CLOSED = 'closed'
OPEN = 'open'


@total_ordering
@dataclass(frozen=True)
class Radius:
    """r = p^{-exponent}; the zero radius has exponent INF."""
    prime: int
    exponent: float

    @classmethod
    def zero(cls, p):
        return cls(p, INF)

    @classmethod
    def from_norm(cls, p, norm):
        norm = Fraction(norm)
        if norm == 0:
            return cls.zero(p)
        if norm < 0:
            raise RadiusUnrealizable(f'{norm} is not a radius.')
        exponent = multiplicity(p, norm.denominator) - multiplicity(p, norm.numerator)
        if Fraction(p) ** (-exponent) != norm:
            raise RadiusUnrealizable(f'{norm} is not a power of {p}.', norm=str(norm))
        return cls(p, exponent)

    @property
    def value(self):
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.prime) ** (-self.exponent)

    def is_zero(self):
        return self.exponent == INF

    def __lt__(self, other):
        if not isinstance(other, Radius):
            return NotImplemented
        return self.exponent > other.exponent

    def __str__(self):
        return '0' if self.is_zero() else f'{self.prime}^{-self.exponent}'


def distance_exponent(x, y):
    """-log_p |x - y|_p, INF when x = y."""
    return (x - y).valuation


@dataclass(frozen=True)
class Disc:
    center: object
    radius: Radius
    kind: str = CLOSED

    def contains(self, x):
        d = distance_exponent(x, self.center)
        if self.kind == CLOSED:
            return d >= self.radius.exponent
        return d > self.radius.exponent

    def contains_disc(self, other):
        if not self.contains(other.center):
            return False
        if other.radius < self.radius:
            return True
        if other.radius == self.radius:
            return self.kind == CLOSED or other.kind == OPEN
        return False

    def meets(self, other):
        return self.contains_disc(other) or other.contains_disc(self)

    def same_set(self, other):
        return self.contains_disc(other) and other.contains_disc(self)

    def recenter(self, point):
        if not self.contains(point):
            raise NotCovering('New center lies outside the disc.')
        return Disc(point, self.radius, self.kind)

    def as_kind(self, kind):
        return Disc(self.center, self.radius, kind)


def dist_to_set(x, sigma):
    """min over s in sigma of |x - s|_p, as an exact fraction."""
    if not sigma:
        raise EmptySet('Distance to an empty set.')
    return min((x - s).norm() for s in sigma)


@dataclass(frozen=True)
class DiscCover:
    """Pairwise disjoint closed discs D_{a_i}(r) whose open parts cover ``points``."""
    points: tuple
    radius: Radius
    centers: tuple

    def disc(self, index, kind=CLOSED):
        return Disc(self.centers[index], self.radius, kind)

    def discs(self, kind=CLOSED):
        return [self.disc(i, kind) for i in range(len(self.centers))]

    def index_of(self, x, kind=OPEN):
        for i, center in enumerate(self.centers):
            if Disc(center, self.radius, kind).contains(x):
                return i
        return None

    def members(self, index):
        disc = self.disc(index, OPEN)
        return [x for x in self.points if disc.contains(x)]

    def validate(self):
        m = self.radius.exponent
        for i, a in enumerate(self.centers):
            for b in self.centers[i + 1:]:
                if distance_exponent(a, b) >= m:
                    raise NotDisjoint(f'Discs at {a} and {b} overlap at radius {self.radius}.')
        for x in self.points:
            if self.index_of(x) is None:
                raise NotCovering(f'{x} lies in no open disc of the cover.', point=str(x))
        return self


def _clusters(points, exponent):
    """Classes of the relation |x - y| < p^-exponent, in input order."""
    clusters = []
    for x in points:
        for cluster in clusters:
            if distance_exponent(x, cluster[0]) > exponent:
                cluster.append(x)
                break
        else:
            clusters.append([x])
    return clusters


def build_cover(sigma, s):
    """Disjoint cover of a finite set at some radius r < s with centers in the set.

    Points closer than s are clustered; r is taken one step below s when a
    power of p fits strictly between the widest cluster and s. Otherwise the
    scale drops to the widest cluster diameter and the set is reclustered.
    """
    points = tuple(sigma)
    if not points:
        raise EmptySet('Cannot cover an empty set.')
    if s.is_zero():
        raise RadiusUnrealizable('The radius bound must be positive.')
    scale = s.exponent
    while True:
        clusters = _clusters(points, scale)
        widest = min(
            (distance_exponent(x, y) for cluster in clusters for x in cluster for y in cluster if x is not y),
            default=INF,
        )
        if scale + 1 < widest:
            break
        logger.debug('no radius between p^-%s and p^-%s, reclustering', scale, widest)
        scale = widest
    radius = Radius(s.prime, scale + 1)
    cover = DiscCover(points, radius, tuple(cluster[0] for cluster in clusters))
    try:
        cover.validate()
    except (NotDisjoint, NotCovering) as exc:
        raise RadiusUnrealizable(str(exc.detail)) from exc
    logger.info('cover of %s points: %s discs at radius %s', len(points), len(clusters), radius)
    return cover


def refine_cover(sigma, candidates, radius):
    """Keep the candidate discs D_b(r^-) that meet the set and recenter them on it.

    Returns the cover and the sorted indices of the kept candidates.
    """
    points = tuple(sigma)
    m = radius.exponent
    for i, a in enumerate(candidates):
        for b in candidates[i + 1:]:
            if distance_exponent(a, b) >= m:
                raise NotDisjoint(f'Candidates {a} and {b} overlap at radius {radius}.')
    centers = {}
    for x in points:
        index = next((i for i, b in enumerate(candidates) if distance_exponent(x, b) > m), None)
        if index is None:
            raise NotCovering(f'{x} lies in no candidate disc.', point=str(x))
        centers.setdefault(index, x)
    kept = sorted(centers)
    cover = DiscCover(points, radius, tuple(centers[i] for i in kept))
    return cover, kept


def intersect_covers(small, large):
    """Pairs (i, j) with D_{a_i}(r) inside D_{b_j}(s), for covers with r <= s."""
    if large.radius < small.radius:
        raise IncompatibleDomains(f'Radius {small.radius} exceeds {large.radius}.')
    pairs = []
    for i, disc in enumerate(small.discs()):
        for j, big in enumerate(large.discs()):
            if big.contains_disc(disc):
                pairs.append((i, j))
                break
    return pairs
