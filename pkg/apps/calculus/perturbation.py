"""Constructive perturbation bounds: N_eps, delta, and checks of their conclusions."""
import logging
from dataclasses import dataclass, field
from fractions import Fraction

from apps.calculus.context import make_context
from apps.calculus.fcalc import fcalc, fit_function
from apps.core.exceptions import LawViolation, NotCovering, NotDisjoint, OnSpectrum
from apps.geometry.discs import Radius, distance_exponent
from apps.linalg.spectrum import resolvent, spectrum
from apps.scalars.numbers import INF

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ResolventBound:
    """N_eps = p^exponent bounds ||R(x; A)|| off D_sigma(eps^-); attained by the witness term."""
    prime: int
    exponent: int
    eigenvalue: int
    order: int

    @property
    def norm(self):
        return Fraction(self.prime) ** self.exponent


def resolvent_bound(ctx, epsilon):
    """max_j max_{nu < nu_j} ||(A - x_j)^nu E_j|| eps^-(nu + 1)."""
    best = None
    for j in range(len(ctx.spectrum.eigenvalues)):
        for nu, term in enumerate(ctx.decomposition.nilpotent_powers(j)):
            v = term.valuation
            if v == INF:
                continue
            exponent = (nu + 1) * epsilon.exponent - v
            if best is None or exponent > best.exponent:
                best = ResolventBound(epsilon.prime, exponent, j, nu)
    logger.debug('N_eps at %s: p^%s', epsilon, best.exponent)
    return best


def perturbation_delta(ctx, epsilon):
    """delta = min(eps / N_eps^2, 1 / N_eps); ||A - B|| < delta keeps sigma_B inside D_sigma(eps^-)."""
    e = resolvent_bound(ctx, epsilon).exponent
    return Radius(epsilon.prime, max(epsilon.exponent + 2 * e, e))


def _contained(points, sigma, epsilon):
    return all(any(distance_exponent(y, x) > epsilon.exponent for x in sigma) for y in points)


def sample_points(sigma, epsilon, count):
    """Points x with |x - x_j| >= eps for every j: x_j + c p^t for t <= -log_p eps."""
    p = epsilon.prime
    samples = []
    t = epsilon.exponent
    while len(samples) < count and t > epsilon.exponent - count:
        for x in sigma:
            for c in range(1, p):
                point = x + Fraction(c) * Fraction(p) ** t
                if all(distance_exponent(point, y) <= epsilon.exponent for y in sigma):
                    samples.append(point)
                if len(samples) == count:
                    return samples
        t -= 1
    return samples


@dataclass
class PerturbationReport:
    delta: Radius
    distance: object
    within_delta: bool
    contained: bool
    bound: ResolventBound
    samples: list = field(default_factory=list)

    @property
    def holds(self):
        return self.contained and all(observed >= bound for _, observed, bound in self.samples)


def perturbation_check(ctx, b, epsilon, samples=10):
    """Recompute sigma_B and compare R(x; A) with R(x; B) at sample points off D_sigma(eps^-).

    Raises LawViolation only when ||A - B|| < delta and a conclusion fails.
    """
    a = ctx.matrix
    bound = resolvent_bound(ctx, epsilon)
    delta = perturbation_delta(ctx, epsilon)
    distance = (a - b).valuation
    within = distance > delta.exponent
    sigma = ctx.spectrum.values
    sigma_b = spectrum(b, ctx.tower).values
    report = PerturbationReport(delta, distance, within, _contained(sigma_b, sigma, epsilon), bound)
    for x in sample_points(sigma, epsilon, samples):
        try:
            observed = (resolvent(x, a) - resolvent(x, b)).valuation
        except OnSpectrum:
            observed = -INF
        report.samples.append((x, observed, distance - 2 * bound.exponent))
    if within and not report.holds:
        raise LawViolation(
            f'||A - B|| = p^-{distance} is below delta = {delta} but the perturbation bounds fail.',
            contained=report.contained,
        )
    if not within:
        logger.warning('||A - B|| = p^-%s is not below delta = %s', distance, delta)
    return report


@dataclass
class ContinuityReport:
    epsilon: Fraction
    radius: Radius
    rho: list
    kappa: Fraction
    bound: ResolventBound
    delta: Fraction
    distance: Fraction
    precondition_gap: bool
    contained: bool
    difference: Fraction = None

    @property
    def holds(self):
        return self.contained and self.difference is not None and self.difference < self.epsilon


def fcalc_continuity_check(a, b, f, ctx, epsilon):
    """||f(A) - f(B)|| < eps whenever ||A - B|| is below min(kappa / N_r^2, 1 / N_r).

    kappa = eps / (r (1 + max_i rho_i)) with rho_i the sup of f on disc i. A
    distance above that threshold is reported as a precondition gap.
    """
    epsilon = Fraction(epsilon.value if isinstance(epsilon, Radius) else epsilon)
    radius = ctx.radius
    fitted = fit_function(ctx, f)
    rho = [piece.sup_norm() for piece in fitted.pieces]
    kappa = epsilon / (radius.value * (1 + max(rho)))
    bound = resolvent_bound(ctx, radius)
    delta = min(kappa / bound.norm ** 2, 1 / bound.norm)
    distance = (a - b).norm()
    report = ContinuityReport(
        epsilon, radius, rho, kappa, bound, delta, distance, not distance < delta, False,
    )
    if report.precondition_gap:
        logger.warning('precondition gap: ||A - B|| = %s is not below %s', distance, delta)
    try:
        ctx_b = make_context(b, ctx.tower, cover=ctx.cover, schedule=ctx.schedule, cross_check=ctx.cross_check)
    except (NotCovering, NotDisjoint) as exc:
        logger.warning('sigma_B escapes the cover: %s', exc.detail)
        return report
    report.contained = True
    report.difference = (fcalc(ctx, f) - fcalc(ctx_b, f)).norm()
    if not report.precondition_gap and not report.holds:
        raise LawViolation(
            f'||f(A) - f(B)|| = {report.difference} is not below {epsilon}.', difference=str(report.difference),
        )
    return report
