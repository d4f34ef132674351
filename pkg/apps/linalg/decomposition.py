"""Spectral idempotents E(x_j) and nilpotent parts (A - x_j) E(x_j)."""
import logging
from dataclasses import dataclass

from apps.core.conf import padic_setting
from apps.core.exceptions import DegreeCapExceeded, SpectrumUnverified
from apps.geometry.discs import Radius, distance_exponent
from apps.linalg.matrices import PAdicMatrix
from apps.linalg.spectrum import resolvent
from apps.scalars.numbers import one, zero
from apps.scalars.polynomials import mul as poly_mul, taylor_shift
from apps.shnirelman.integral import CircleSpec, SchedulePolicy, integrate_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectralDecomposition:
    matrix: PAdicMatrix
    spectrum: object
    idempotents: tuple
    nilpotents: tuple

    def nilpotent_powers(self, j):
        """[E_j, N_j, N_j^2, ...] up to N_j^(nu_j - 1)."""
        powers = [self.idempotents[j]]
        for _ in range(self.spectrum.multiplicities[j] - 1):
            powers.append(self.nilpotents[j] @ powers[-1])
        return powers


def _truncated_inverse(coeffs, terms):
    """First ``terms`` coefficients of 1 / sum c_k t^k."""
    inverse_c0 = coeffs[0].inverse()
    out = [inverse_c0]
    for k in range(1, terms):
        acc = None
        for j in range(1, min(k, len(coeffs) - 1) + 1):
            term = coeffs[j] * out[k - j]
            acc = term if acc is None else acc + term
        out.append(zero(coeffs[0].field) if acc is None else -(acc * inverse_c0))
    return out


def _crt_idempotent(a, shifted, spec, j, precision):
    """E_j = s_j(A - x_j) P_j(A) with P_j = prod_{i != j} (x - x_i)^nu_i and s_j P_j = 1 mod (x - x_j)^nu_j."""
    field = spec.field
    unit = one(field, precision)
    others = PAdicMatrix.identity(a.size, field, precision)
    poly = [unit]
    for i, (value, m) in enumerate(spec.eigenvalues):
        if i == j:
            continue
        for _ in range(m):
            others = others @ shifted[i]
            poly = poly_mul(poly, [-value, unit])
    x_j, nu = spec.eigenvalues[j]
    s = _truncated_inverse(taylor_shift(poly, x_j), nu)
    series = PAdicMatrix.zeros(a.size, field)
    power = PAdicMatrix.identity(a.size, field, precision)
    for coeff in s:
        series = series + power * coeff
        power = power @ shifted[j]
    return series @ others


def isolating_circle(spec, j):
    """A circle around x_j whose closed disc holds no other eigenvalue."""
    x_j = spec.values[j]
    m = max((distance_exponent(x_j, x) for i, x in enumerate(spec.values) if i != j), default=-1) + 1
    return CircleSpec.around(x_j, Radius(x_j.prime, m))


def _integral_check(a, spec, idempotents, tower):
    digits = tower.working_digits
    schedule = SchedulePolicy(digits + 1, 2)
    for j, x_j in enumerate(spec.values):
        circle = isolating_circle(spec, j)
        try:
            degree = schedule.working_degree(tower.p, spec.field.degree, tower.degree_cap)
        except DegreeCapExceeded:
            logger.warning('integral cross-check skipped: no working degree within cap %s', tower.degree_cap)
            return
        result = integrate_matrix(
            lambda x, x_j=x_j: resolvent(x, a) * (x - x_j), circle, schedule, tower, degree,
        )
        if not result.value.equals(idempotents[j], digits):
            raise SpectrumUnverified(
                f'Contour integral and interpolation disagree for E({x_j}).',
                eigenvalue=str(x_j), valuation=str((result.value - idempotents[j]).valuation),
            )
        logger.debug('E(%s) confirmed by contour integral, schedule %s', x_j, result.schedule)


def spectral_decomposition(a, spec, tower, cross_check=None):
    """Idempotents by CRT interpolation, optionally confirmed by contour integrals."""
    if not spec.verified:
        raise SpectrumUnverified('Spectrum residuals are below working precision.', residuals=list(spec.residuals))
    a = a.embed(spec.field)
    precision = tower.precision
    shifted = [a.shift(value) for value in spec.values]
    idempotents = []
    nilpotents = []
    for j in range(len(spec.eigenvalues)):
        e = _crt_idempotent(a, shifted, spec, j, precision)
        idempotents.append(e)
        nilpotents.append(shifted[j] @ e)
    if padic_setting('FCALC_CROSS_CHECK') if cross_check is None else cross_check:
        _integral_check(a, spec, idempotents, tower)
    logger.info('spectral decomposition with %s idempotents', len(idempotents))
    return SpectralDecomposition(a, spec, tuple(idempotents), tuple(nilpotents))
