"""Shnirelman integrals: limits of averages over scaled roots of unity on a circle."""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from sympy import divisors

from apps.core.conf import padic_setting
from apps.core.exceptions import (
    DegreeCapExceeded,
    DimensionMismatch,
    EvaluationError,
    NoStabilization,
    NotCoprime,
    PadicError,
    RadiusUnrealizable,
)
from apps.geometry.discs import Radius
from apps.scalars.numbers import ExtScalar, from_rational
from apps.scalars.tower import get_tower

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CircleSpec:
    """The circle |x - center| = r parametrized as center + xi * gamma, |gamma| = r."""
    center: ExtScalar
    gamma: ExtScalar
    radius: Radius

    def __post_init__(self):
        if self.gamma.valuation != self.radius.exponent:
            raise RadiusUnrealizable(
                f'|gamma| = p^{-self.gamma.valuation} does not match r = {self.radius}.',
                gamma=str(self.gamma), radius=str(self.radius),
            )

    @classmethod
    def around(cls, center, radius, unit=None):
        """Gamma = p^m * unit for r = p^-m; the unit defaults to 1."""
        scale = Fraction(center.prime) ** radius.exponent
        gamma = from_rational(scale, field=center.field, precision=padic_setting('PRECISION'))
        if unit is not None:
            gamma = gamma * unit
        return cls(center, gamma, radius)

    @property
    def prime(self):
        return self.center.prime

    @property
    def degree(self):
        return max(self.center.degree, self.gamma.degree)


@dataclass(frozen=True)
class SchedulePolicy:
    """n runs over the divisors of p^F - 1 that are >= start, at most ``count`` of them.

    Taking n | p^F - 1 keeps every mu_n inside one working field Q_{p^F}.
    """
    start: int
    count: int

    @classmethod
    def from_settings(cls, start=None, count=None):
        return cls(
            padic_setting('SCHEDULE_START') if start is None else start,
            padic_setting('SCHEDULE_COUNT') if count is None else count,
        )

    def points(self, p, degree):
        return [n for n in divisors(p**degree - 1) if n >= self.start][: self.count]

    def working_degree(self, p, base_degree, cap):
        """Smallest multiple of ``base_degree`` up to ``cap`` offering ``count`` points."""
        for degree in range(base_degree, cap + 1, base_degree):
            if len(self.points(p, degree)) >= self.count:
                return degree
        raise DegreeCapExceeded(
            f'No degree <= {cap} gives {self.count} schedule points from n >= {self.start}.',
            start=self.start, count=self.count, cap=cap,
        )


@dataclass
class ShnirelmanResult:
    value: object
    schedule: tuple
    trace: tuple = field(default=())
    certified_digits: int = 0
    degree: int = 1

    def trace_norms(self, p):
        """The trace as exact norms p^-v of the successive differences."""
        return [Radius(p, v).value for v in self.trace]


def _evaluate(f, x):
    try:
        return f(x)
    except PadicError as exc:
        raise EvaluationError(
            f'Integrand failed at {x}: {exc.detail}', point=str(x), cause=exc.code,
        ) from exc


def partial_sum(f, circle, n, tower=None, degree=None, workers=None):
    """S_n = (1/n) * sum over xi^n = 1 of f(center + xi * gamma), in Teichmüller index order."""
    p = circle.prime
    if gcd(n, p) != 1:
        raise NotCoprime(f'n={n} is divisible by p={p}.', n=n)
    tower = tower or get_tower(p)
    workers = padic_setting('WORKERS') if workers is None else workers
    roots = tower.roots_of_unity(n, degree)
    points = [circle.center + xi * circle.gamma for xi in roots]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(lambda x: _evaluate(f, x), points))
    else:
        values = [_evaluate(f, x) for x in points]
    total = values[0]
    for value in values[1:]:
        total = total + value
    return total * tower.from_rational(1, n)


def _integrate(f, circle, schedule, tower, degree, digits, workers, check=None):
    tower = tower or get_tower(circle.prime)
    schedule = schedule or SchedulePolicy.from_settings()
    digits = tower.working_digits if digits is None else digits
    if degree is None:
        degree = schedule.working_degree(tower.p, circle.degree, tower.degree_cap)
    points = schedule.points(tower.p, degree)
    used, trace = [], []
    previous = None
    for n in points:
        current = partial_sum(f, circle, n, tower, degree, workers)
        if check is not None:
            check(current)
        used.append(n)
        if previous is not None:
            v = (current - previous).valuation
            trace.append(v)
            logger.debug('S_%s vs previous: valuation %s', n, v)
            if v >= digits:
                logger.info('stabilized at n=%s after %s points', n, len(used))
                return ShnirelmanResult(current, tuple(used), tuple(trace), digits, degree)
        previous = current
    raise NoStabilization(
        f'No two consecutive partial sums agree to {digits} digits.',
        schedule=used, trace=[str(v) for v in trace],
    )


def integrate_scalar(f, circle, schedule=None, tower=None, degree=None, digits=None, workers=None):
    def check(value):
        if not isinstance(value, ExtScalar):
            raise EvaluationError('Scalar integrand returned a non-scalar value.')

    return _integrate(f, circle, schedule, tower, degree, digits, workers, check)


def integrate_matrix(F, circle, schedule=None, tower=None, degree=None, digits=None, workers=None):
    """Entrywise Shnirelman integral of a matrix-valued integrand of constant size."""
    shapes = set()

    def check(value):
        shapes.add(value.size)
        if len(shapes) > 1:
            raise DimensionMismatch(f'Integrand changed size: {sorted(shapes)}.')

    return _integrate(F, circle, schedule, tower, degree, digits, workers, check)


def oracle_series_integral(coeffs):
    """The integral of sum c_k (x - a)^k over any circle around a is c_0."""
    coeffs = getattr(coeffs, 'coeffs', coeffs)
    return coeffs[0]
