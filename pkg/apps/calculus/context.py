"""Everything the functional calculus needs about A: spectrum, idempotents, cover, circles."""
import logging
from dataclasses import dataclass

from apps.analytic.functions import fitted_cover
from apps.calculus.inductive import InductiveElement
from apps.core.conf import padic_setting
from apps.core.exceptions import FunctionNotInFA, NotCoveringSigma, RadiusUnrealizable
from apps.geometry.discs import DiscCover, Radius, build_cover
from apps.linalg.decomposition import spectral_decomposition
from apps.linalg.spectrum import spectrum
from apps.shnirelman.integral import CircleSpec, SchedulePolicy

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CalculusContext:
    """A with its verified spectrum and a disjoint cover D_{a_i}(r) of it.

    ``unit`` picks Gamma = p^m * unit on every circle |x - a_i| = r.
    """
    matrix: object
    spectrum: object
    decomposition: object
    cover: DiscCover
    tower: object
    schedule: SchedulePolicy
    unit: object = None
    cross_check: bool = True

    @property
    def radius(self):
        return self.cover.radius

    @property
    def size(self):
        return self.matrix.size

    @property
    def field(self):
        return self.spectrum.field

    @property
    def digits(self):
        return self.tower.working_digits

    def circle(self, center):
        return CircleSpec.around(center, self.cover.radius, self.unit)

    @property
    def circles(self):
        return tuple(self.circle(center) for center in self.cover.centers)

    @property
    def gamma(self):
        return self.circle(self.cover.centers[0]).gamma

    def with_cover(self, cover, unit=None):
        """The same A over another admissible cover (and Gamma unit)."""
        return CalculusContext(
            self.matrix, self.spectrum, self.decomposition, admissible_cover(cover, self.spectrum.values),
            self.tower, self.schedule, self.unit if unit is None else unit, self.cross_check,
        )


def admissible_cover(cover, sigma):
    """``cover`` re-attached to sigma, checked disjoint and covering."""
    return DiscCover(tuple(sigma), cover.radius, tuple(cover.centers)).validate()


def make_context(a, tower, s=None, f=None, cover=None, unit=None, schedule=None, claimed=None, cross_check=None):
    """Context for A (a matrix, or an inductive element through its final level).

    The cover is, in order of preference: the one given; the pieces of ``f``
    that meet the spectrum; a fresh cover at some radius below ``s``.
    """
    if isinstance(a, InductiveElement):
        a = a.final
    cross_check = padic_setting('FCALC_CROSS_CHECK') if cross_check is None else cross_check
    spec = spectrum(a, tower, claimed)
    decomposition = spectral_decomposition(a, spec, tower, cross_check)
    sigma = spec.values
    if cover is not None:
        cover = admissible_cover(cover, sigma)
    elif f is not None:
        try:
            cover, _ = fitted_cover(f, sigma)
        except NotCoveringSigma as exc:
            raise FunctionNotInFA(str(exc.detail), **exc.extra) from exc
    else:
        cover = build_cover(sigma, s or Radius(tower.p, 0))
    schedule = schedule or SchedulePolicy(tower.working_digits + 1, 2)
    if unit is not None and unit.valuation != 0:
        raise RadiusUnrealizable(f'Gamma unit {unit} is not a unit.', unit=str(unit))
    ctx = CalculusContext(decomposition.matrix, spec, decomposition, cover, tower, schedule, unit, cross_check)
    logger.info('calculus context: %s discs at radius %s', len(cover.centers), cover.radius)
    return ctx
