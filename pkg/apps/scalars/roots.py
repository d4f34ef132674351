"""Teichmüller lifts, roots of unity, Hensel lifting and root isolation."""
import logging
import threading
from fractions import Fraction
from math import gcd

from sympy.ntheory import n_order
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_factor, gf_strip

from apps.core.exceptions import (
    DegreeCapExceeded,
    EigenvalueOutsideTower,
    FieldMismatch,
    NotCoprime,
    NotSimpleRoot,
    PrecisionExhausted,
)
from apps.scalars.fields import unramified_field
from apps.scalars.numbers import ExtScalar, from_rational, from_residue, one, zero
from apps.scalars.polynomials import (
    as_scalars,
    derivative,
    horner,
    newton_polygon,
    scale_variable,
    taylor_shift,
    trim,
)

logger = logging.getLogger(__name__)

_cache_lock = threading.Lock()
_generator_lifts = {}
_unity_cache = {}


def teichmuller(residue, field, precision):
    """The root of unity congruent to a nonzero residue, by y <- y^(p^f) to a fixed point."""
    if not residue:
        raise ValueError('The zero residue has no Teichmüller lift.')
    q = field.residue.order
    y = from_residue(field, residue, precision)
    for _ in range(precision + 1):
        following = y**q
        if following == y:
            return y
        y = following
    raise PrecisionExhausted(f'Teichmüller iteration did not settle in {field!r}.')


def _generator_lift(field, precision):
    key = (field.p, field.degree, precision)
    with _cache_lock:
        cached = _generator_lifts.get(key)
    if cached is None:
        cached = teichmuller(field.residue.generator, field, precision)
        with _cache_lock:
            _generator_lifts.setdefault(key, cached)
    return cached


def unity_degree(p, n):
    """Degree of the unramified extension generated by the n-th roots of unity."""
    if gcd(n, p) != 1:
        raise NotCoprime(f'n={n} is divisible by p={p}.', n=n)
    return 1 if n == 1 else int(n_order(p, n))


def roots_of_unity(n, p, precision, degree_cap, degree=None):
    """The n-th roots of unity as zeta^0, zeta^1, ..., zeta^(n-1).

    zeta is the Teichmüller lift of g^((p^F-1)/n) for the generator g of the
    residue field of degree F, so the order is the Teichmüller index order.
    """
    needed = unity_degree(p, n)
    if degree is None:
        degree = needed
    if degree % needed:
        raise FieldMismatch(f'mu_{n} does not lie in Q_{p}^{degree}.', n=n, degree=degree)
    if degree > degree_cap:
        raise DegreeCapExceeded(
            f'mu_{n} needs degree {degree} > cap {degree_cap}.', n=n, degree=degree, cap=degree_cap,
        )
    key = (p, n, degree, precision)
    with _cache_lock:
        cached = _unity_cache.get(key)
    if cached is not None:
        return list(cached)
    field = unramified_field(p, degree)
    zeta = _generator_lift(field, precision) ** ((field.residue.order - 1) // n)
    roots = [one(field, precision)]
    for _ in range(n - 1):
        roots.append(roots[-1] * zeta)
    with _cache_lock:
        _unity_cache.setdefault(key, tuple(roots))
    logger.debug('cached mu_%s in Q_%s^%s at precision %s', n, p, degree, precision)
    return roots


def hensel_root(poly, seed, field, precision):
    """Newton lift of a simple residue root to a root known mod p^precision."""
    coeffs = as_scalars(poly, field, precision)
    slope_coeffs = derivative(coeffs)
    if isinstance(seed, ExtScalar):
        x = seed.embed(field).with_precision(precision)
    else:
        x = from_residue(field, tuple(seed), precision)
    value = horner(coeffs, x)
    slope = horner(slope_coeffs, x)
    if value.valuation < 1 or slope.valuation != 0:
        raise NotSimpleRoot(
            f'{x} is not a simple residue root.',
            value_valuation=value.valuation, slope_valuation=slope.valuation,
        )
    for step in range(2 * precision.bit_length() + 4):
        if value.is_zero() or value.valuation >= precision:
            logger.debug('hensel lift settled after %s steps', step)
            return x
        x = x - value / slope
        value = horner(coeffs, x)
        slope = horner(slope_coeffs, x)
    raise PrecisionExhausted('Hensel lift did not converge.')


def residue_roots(coeffs, residue_field):
    """Distinct roots in F_{p^f} of a residue polynomial, in enumeration order."""
    p = residue_field.p
    if all(len(c) <= 1 for c in coeffs):
        dense = gf_strip([c[0] if c else 0 for c in reversed(coeffs)])
        _, factors = gf_factor(dense, p, ZZ)
        found = set()
        for factor, _ in factors:
            e = len(factor) - 1
            if residue_field.degree % e:
                continue
            candidates = list(residue_field.subfield_units(e))
            if e == 1:
                candidates.insert(0, ())
            local = [residue_field.from_int(int(c)) for c in reversed(factor)]
            found.update(residue_field.roots(local, candidates))
        return sorted(found, key=residue_field.index)
    return residue_field.roots(coeffs)


def _normalized(coeffs, field, precision):
    shift = min(c.valuation for c in coeffs if not c.is_zero())
    if not shift:
        return coeffs
    scale = from_rational(Fraction(field.p) ** -shift, field=field, precision=precision)
    return [c * scale for c in coeffs]


def _leading_zeros(coeffs):
    count = 0
    for c in coeffs:
        if not c.is_zero():
            break
        count += 1
    return count


def _ramified(slopes, factor):
    raise EigenvalueOutsideTower(
        'Non-integral Newton polygon slope: roots lie in a ramified extension.',
        ramified=True, slopes=[str(s) for s in slopes], factor=[str(c) for c in factor],
    )


class _Unresolved(Exception):
    def __init__(self, missing):
        super().__init__(missing)
        self.missing = missing


def _isolate(coeffs, field, precision, depth, merge_digits):
    """Roots of valuation >= 0 as (root, multiplicity, merged) triples.

    Each residue root r splits off G(r + y); clusters that stay together
    past ``merge_digits`` levels are reported once with ``merged`` set.
    """
    coeffs = _normalized(coeffs, field, precision)
    residues = [c.residue() for c in coeffs]
    integral_count = max((i for i, c in enumerate(coeffs) if c.valuation == 0), default=0)
    if integral_count == 0:
        return []
    p = field.p
    uniformizer = from_rational(p, field=field, precision=precision)
    found = []
    for residue in residue_roots(residues, field.residue):
        r = from_residue(field, residue, precision)
        shifted = taylor_shift(coeffs, r)
        exact = _leading_zeros(shifted)
        slopes = newton_polygon(shifted[exact:])
        inside = [(s, length) for s, length in slopes if s < 0]
        if any(s.denominator != 1 for s, _ in inside):
            _ramified([s for s, _ in inside], coeffs)
        multiplicity = exact + sum(length for _, length in inside)
        if multiplicity == exact:
            found.append((r, multiplicity, False))
        elif multiplicity == 1:
            found.append((hensel_root(coeffs, r, field, precision), 1, False))
        elif depth + 1 >= merge_digits:
            found.append((r, multiplicity, True))
        else:
            cluster = _isolate(scale_variable(shifted, uniformizer), field, precision, depth + 1, merge_digits)
            resolved = sum(m for _, m, _ in cluster)
            if resolved < multiplicity:
                raise _Unresolved(multiplicity - resolved)
            found.extend((r + uniformizer * z, m, flag) for z, m, flag in cluster)
    total = sum(m for _, m, _ in found)
    if total < integral_count:
        raise _Unresolved(integral_count - total)
    return found


def _refine_cluster(coeffs, x, multiplicity, precision):
    """Newton steps on the (m-1)-th derivative, kept only while the residual does not grow."""
    target = derivative(coeffs, multiplicity - 1)
    slope_coeffs = derivative(target)
    best = x
    best_residual = horner(coeffs, x).valuation
    for _ in range(precision.bit_length() + 2):
        value = horner(target, best)
        slope = horner(slope_coeffs, best)
        if value.is_zero() or slope.is_zero():
            break
        candidate = best - value / slope
        residual = horner(coeffs, candidate).valuation
        if residual < best_residual:
            break
        best, best_residual = candidate, residual
    return best


def polynomial_roots(coeffs, field, precision, merge_digits):
    """All roots of a polynomial in ``field`` with multiplicities.

    Raises EigenvalueOutsideTower when a root is ramified (``ramified=True``
    in the error context) or lies outside ``field`` (``ramified=False``).
    """
    coeffs = trim(as_scalars(coeffs, field, precision))
    degree = len(coeffs) - 1
    if degree < 1:
        return []
    roots = []
    exact = _leading_zeros(coeffs)
    if exact:
        roots.append((zero(field), exact))
        coeffs = coeffs[exact:]
    if len(coeffs) == 1:
        return roots
    slopes = newton_polygon(coeffs)
    if any(s.denominator != 1 for s, _ in slopes):
        _ramified([s for s, _ in slopes], coeffs)
    shift = -int(max(s for s, _ in slopes))
    scale = from_rational(field.p, field=field, precision=precision) ** shift
    try:
        scaled_roots = _isolate(scale_variable(coeffs, scale), field, precision, 0, merge_digits)
    except _Unresolved as exc:
        raise EigenvalueOutsideTower(
            f'{exc.missing} root(s) lie outside {field!r}.',
            ramified=False, missing=exc.missing, degree=field.degree,
        ) from None
    for y, m, merged in scaled_roots:
        root = y * scale
        if merged:
            logger.warning('merged %s roots closer than p^-%s', m, merge_digits)
            root = _refine_cluster(coeffs, root, m, precision)
        roots.append((root, m))
    return roots
