"""Spectra of matrices over the tower: char poly roots with multiplicities and residuals."""
import logging
from dataclasses import dataclass

from apps.core.conf import working_digits
from apps.core.exceptions import (
    EigenvalueOutsideTower,
    FieldMismatch,
    OnSpectrum,
    SingularToPrecision,
    UserSpectrumMismatch,
)
from apps.linalg.charpoly import char_poly
from apps.linalg.matrices import PAdicMatrix
from apps.scalars.numbers import one
from apps.scalars.polynomials import horner, mul as poly_mul

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Spectrum:
    """sigma_A as ((value, multiplicity), ...) in one field, with |charpoly(value)| residuals."""
    eigenvalues: tuple
    residuals: tuple
    field: object
    charpoly: tuple
    verified: bool = True

    @property
    def values(self):
        return tuple(value for value, _ in self.eigenvalues)

    @property
    def multiplicities(self):
        return tuple(m for _, m in self.eigenvalues)

    @property
    def dimension(self):
        return sum(self.multiplicities)

    def index_of(self, x, digits):
        for i, value in enumerate(self.values):
            if value.equals(x, digits):
                return i
        return None


def _group(values, digits):
    groups = []
    for value in values:
        for group in groups:
            if group[0].equals(value, digits):
                group[1] += 1
                break
        else:
            groups.append([value, 1])
    return [(value, m) for value, m in groups]


def _residuals(coeffs, eigenvalues):
    return tuple(horner(coeffs, value).valuation for value, _ in eigenvalues)


def _expand(eigenvalues, field, precision):
    coeffs = [one(field, precision)]
    for value, m in eigenvalues:
        for _ in range(m):
            coeffs = poly_mul(coeffs, [-value, one(field, precision)])
    return coeffs


def _verify_claim(a, coeffs, claimed, tower):
    digits = tower.working_digits
    fields = [a.field] + [value.field for value, _ in claimed]
    field = max(fields, key=lambda f: f.degree)
    try:
        eigenvalues = tuple((value.embed(field), m) for value, m in claimed)
    except FieldMismatch as exc:
        raise UserSpectrumMismatch(str(exc.detail)) from exc
    if sum(m for _, m in eigenvalues) != a.size:
        raise UserSpectrumMismatch(
            f'Multiplicities sum to {sum(m for _, m in eigenvalues)}, expected {a.size}.',
        )
    expanded = _expand(eigenvalues, field, tower.precision)
    for k, (expected, got) in enumerate(zip(coeffs, expanded)):
        if not got.equals(expected, digits):
            raise UserSpectrumMismatch(
                f'Coefficient {k} of the characteristic polynomial does not match the claim.', index=k,
            )
    return Spectrum(eigenvalues, _residuals(coeffs, eigenvalues), field, tuple(coeffs))


def spectrum(a, tower, claimed=None):
    """Eigenvalues of A with algebraic multiplicities.

    Triangular matrices read the diagonal; otherwise the characteristic
    polynomial is solved in Q_{p^f} for the smallest f (a multiple of the
    entry field degree) that holds every root, up to the degree cap.
    """
    if a.field.p != tower.p:
        raise FieldMismatch(f'Matrix over p={a.field.p} with a p={tower.p} tower.')
    coeffs = char_poly(a)
    digits = tower.working_digits
    if claimed is not None:
        result = _verify_claim(a, coeffs, claimed, tower)
        logger.info('claimed spectrum verified: %s eigenvalues', len(result.eigenvalues))
        return result
    if a.is_upper_triangular():
        eigenvalues = tuple(_group(a.diagonal_entries(), digits))
        field = a.field
    else:
        eigenvalues, field = _solve(coeffs, a.field.degree, tower)
    residuals = _residuals(coeffs, eigenvalues)
    verified = all(v >= digits for v in residuals)
    if not verified:
        logger.warning('spectrum residuals below p^-%s: %s', digits, residuals)
    logger.info('spectrum of %sx%s matrix: %s eigenvalues in degree %s', a.size, a.size, len(eigenvalues), field.degree)
    return Spectrum(eigenvalues, residuals, field, tuple(coeffs), verified)


def _solve(coeffs, base_degree, tower):
    last = None
    for degree in range(base_degree, tower.degree_cap + 1, base_degree):
        try:
            roots = tower.polynomial_roots(coeffs, degree)
        except EigenvalueOutsideTower as exc:
            if exc.extra.get('ramified'):
                raise
            last = exc
            logger.debug('degree %s misses %s root(s)', degree, exc.extra.get('missing'))
            continue
        return tuple(roots), tower.field(degree)
    factor = [str(c) for c in coeffs]
    if last is None:
        raise EigenvalueOutsideTower(
            f'Entry field degree {base_degree} exceeds the cap {tower.degree_cap}.', ramified=False, factor=factor,
        )
    raise EigenvalueOutsideTower(
        f'Some eigenvalues need an extension of degree > {tower.degree_cap}.',
        ramified=False, factor=factor, cap=tower.degree_cap, missing=last.extra.get('missing'),
    )


def _check_off_spectrum(x, spec, digits):
    if spec is None:
        return
    index = spec.index_of(x, digits)
    if index is not None:
        raise OnSpectrum(f'{x} is the eigenvalue {spec.values[index]}.', point=str(x))


def resolvent(x, a, spec=None, digits=None):
    """R(x; A) = (xI - A)^-1."""
    digits = working_digits() if digits is None else digits
    _check_off_spectrum(x, spec, digits)
    try:
        return (PAdicMatrix.scalar(x, a.size) - a).inverse()
    except SingularToPrecision as exc:
        raise OnSpectrum(f'xI - A is singular at x = {x}.', point=str(x)) from exc


def partial_fraction_resolvent(x, decomposition, spec=None, digits=None):
    """sum_j sum_{nu < nu_j} (A - x_j)^nu E_j / (x - x_j)^(nu + 1)."""
    spec = spec or decomposition.spectrum
    digits = working_digits() if digits is None else digits
    _check_off_spectrum(x, spec, digits)
    total = None
    for j, (value, m) in enumerate(spec.eigenvalues):
        inverse = (x - value).inverse()
        scale = inverse
        for term in decomposition.nilpotent_powers(j):
            piece = term * scale
            total = piece if total is None else total + piece
            scale = scale * inverse
    return total
