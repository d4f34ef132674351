"""The five jobs behind the management commands, JobSpec in, Report out."""
import logging
import random
from fractions import Fraction

from apps.analytic.functions import from_polynomial, from_rational, from_series, indicator
from apps.calculus.context import make_context
from apps.calculus.fcalc import fcalc_inductive, fcalc_result
from apps.calculus.inductive import TowerDescriptor, build_inductive
from apps.calculus.laws import cover_independence, laws_check
from apps.calculus.perturbation import fcalc_continuity_check, perturbation_check, perturbation_delta
from apps.core.exceptions import LawViolation, PadicError
from apps.geometry.discs import DiscCover, Radius, build_cover, intersect_covers, refine_cover
from apps.jobs import reports
from apps.jobs.serializers import SUITES
from apps.linalg.matrices import PAdicMatrix
from apps.linalg.spectrum import resolvent, spectrum
from apps.scalars.numbers import parse_scalar
from apps.scalars.polynomials import horner
from apps.shnirelman.integral import CircleSpec, SchedulePolicy, integrate_matrix, integrate_scalar

logger = logging.getLogger(__name__)


def _degree(token):
    return len(token) if isinstance(token, list) else 1


def _scalar(job, token, degree=None):
    field = job.tower.field(_degree(token) if degree is None else degree)
    return parse_scalar(token, field, job.precision)


def _scalars(job, tokens):
    degree = max((_degree(t) for t in tokens), default=1)
    return [_scalar(job, t, degree) for t in tokens]


def _matrix(job, rows):
    degree = max(_degree(t) for row in rows for t in row)
    return PAdicMatrix.from_entries(rows, job.tower.field(degree), job.precision)


def _radius(job, exponent):
    return None if exponent is None else Radius(job.p, exponent)


def _cover(job, cover):
    if cover is None:
        return None
    return DiscCover((), Radius(job.p, cover['radius']), tuple(_scalars(job, cover['centers'])))


def _claimed(job, claimed):
    if not claimed:
        return None
    return [(_scalar(job, item['value']), item['multiplicity']) for item in claimed]


def _function(job, spec, cover):
    """A function spec expanded on the discs of ``cover``."""
    if 'polynomial' in spec:
        return from_polynomial(_scalars(job, spec['polynomial']), cover, job.precision)
    if 'rational' in spec:
        rational = spec['rational']
        return from_rational(
            _scalars(job, rational['numerator']), _scalars(job, rational['denominator']), cover,
            _scalars(job, rational['poles']), job.precision,
        )
    if 'indicator' in spec:
        return indicator(cover, spec['indicator'], job.precision)
    return from_series(cover, [_scalars(job, coeffs) for coeffs in spec['series']], job.precision)


def _integrand(job, spec, circle):
    """(x -> f(x), oracle) for a scalar function spec on one circle; the oracle may be None."""
    center = circle.center
    if 'polynomial' in spec:
        coeffs = _scalars(job, spec['polynomial'])
        return (lambda x: horner(coeffs, x)), horner(coeffs, center)
    if 'rational' in spec:
        numerator = _scalars(job, spec['rational']['numerator'])
        denominator = _scalars(job, spec['rational']['denominator'])
        return (lambda x: horner(numerator, x) / horner(denominator, x)), None
    disc = DiscCover((center,), circle.radius, (center,))
    f = _function(job, spec, disc)
    return f.eval, f.pieces[0].coeffs[0]


def _spectrum_records(spec):
    return [
        {'value': reports.scalar(value), 'multiplicity': m, 'residual': reports.valuation(residual)}
        for (value, m), residual in zip(spec.eigenvalues, spec.residuals)
    ]


def _context(job, a):
    payload = job.payload
    unit = payload.get('unit')
    return make_context(
        a, job.tower,
        s=_radius(job, payload.get('s')),
        cover=_cover(job, payload.get('cover')),
        unit=None if unit is None else _scalar(job, unit),
        schedule=job.schedule,
        claimed=_claimed(job, payload.get('spectrum')),
    )


def cmd_spectrum(job):
    a = _matrix(job, job.payload['matrix'])
    spec = spectrum(a, job.tower, _claimed(job, job.payload.get('spectrum')))
    return reports.build_report(
        'spectrum', job.echo,
        results={
            'eigenvalues': _spectrum_records(spec),
            'field_degree': spec.field.degree,
            'charpoly': [reports.scalar(c) for c in spec.charpoly],
        },
        certificates={
            'residuals': [reports.valuation(v) for v in spec.residuals],
            'verified': spec.verified,
            'working_digits': job.digits,
        },
    )


def cmd_cover(job):
    payload = job.payload
    points = _scalars(job, payload['points'])
    results = {}
    if 's' in payload:
        cover = build_cover(points, Radius(job.p, payload['s']))
    else:
        cover, kept = refine_cover(points, _scalars(job, payload['candidates']), Radius(job.p, payload['radius']))
        results['kept'] = kept
    results['cover'] = reports.cover(cover)
    results['members'] = [[reports.scalar(x) for x in cover.members(i)] for i in range(len(cover.centers))]
    if 'intersect' in payload:
        large = _cover(job, payload['intersect'])
        results['nesting'] = [list(pair) for pair in intersect_covers(cover, large)]
    return reports.build_report('cover', job.echo, results=results, certificates={'radius': reports.valuation(cover.radius.exponent)})


def cmd_integrate(job):
    payload = job.payload
    spec = payload['circle']
    center = _scalar(job, spec['center'])
    unit = spec.get('unit')
    circle = CircleSpec.around(center, Radius(job.p, spec['radius']), None if unit is None else _scalar(job, unit))
    schedule = job.schedule or SchedulePolicy.from_settings()
    f, oracle = _integrand(job, payload['function'], circle)
    if payload['integrand'] == 'resolvent':
        a = _matrix(job, payload['matrix'])
        result = integrate_matrix(lambda x: resolvent(x, a) * (f(x) * (x - center)), circle, schedule, job.tower)
        oracle = None
    else:
        result = integrate_scalar(f, circle, schedule, job.tower)
    results = {'integral': reports.shnirelman(result, job.p)}
    certificates = {'trace': results['integral']['trace'], 'certified_digits': result.certified_digits}
    if oracle is not None:
        results['oracle'] = reports.scalar(oracle)
        certificates['oracle_agreement'] = reports.valuation((result.value - oracle).valuation)
    return reports.build_report('integrate', job.echo, results=results, certificates=certificates)


def _laws(job, ctx, f):
    laws = job.payload['laws']
    g = _function(job, laws['g'], ctx.cover)
    report = laws_check(ctx, f, g, _scalar(job, laws['alpha']), _scalar(job, laws['beta']), laws['trials'], job.seed)
    summary = {
        'holds': report.holds,
        'linearity': reports.valuation(report.linearity),
        'multiplicativity': reports.valuation(report.multiplicativity),
        'continuity': [[reports.valuation(o), reports.valuation(b)] for o, b in report.continuity],
    }
    report.raise_for_violation()
    return summary


def cmd_fcalc(job):
    payload = job.payload
    element = None
    if 'inductive' in payload:
        spec = payload['inductive']
        descriptor = TowerDescriptor(spec['kind'], tuple(spec['dimensions']))
        element = build_inductive(descriptor, [_matrix(job, rows) for rows in spec['levels']], digits=job.digits)
    ctx = _context(job, element if element is not None else _matrix(job, payload['matrix']))
    f = _function(job, payload['function'], ctx.cover)
    results = {'cover': reports.cover(ctx.cover), 'spectrum': _spectrum_records(ctx.spectrum)}
    certificates = {'working_digits': job.digits}
    if element is not None:
        outcome = fcalc_inductive(element, f, ctx.cover, job.tower, job.schedule, digits=job.digits)
        results.update(value=reports.matrix(outcome.value), level=outcome.level, first_level=outcome.first_level)
        certificates.update(
            levels=[reports.valuation(v) for v in element.certificate],
            converged=element.converged,
            trace=[reports.valuation(v) for v in outcome.trace],
        )
    else:
        outcome = fcalc_result(ctx, f)
        results.update(value=reports.matrix(outcome.value), per_disc=[reports.matrix(m) for m in outcome.per_disc])
        certificates['traces'] = [reports.shnirelman(t, job.p) for t in outcome.traces]
    if 'laws' in payload:
        certificates['laws'] = _laws(job, ctx, f)
    return reports.build_report('fcalc', job.echo, results=results, certificates=certificates)


def _random_scalar(job, rng):
    n = rng.choice((1, -1)) * rng.randint(1, 10**6)
    return _scalar(job, n * job.p ** rng.randint(0, 3))


def _axioms(job, rng, fixture):
    """Ultrametric inequality, dominant-term rule, multiplicative valuation and distributivity."""
    trials = job.payload['trials']
    for _ in range(trials):
        x, y, z = (_random_scalar(job, rng) for _ in range(3))
        vy, vz = y.valuation, z.valuation
        v = (y + z).valuation
        failures = []
        if v < min(vy, vz):
            failures.append('ultrametric')
        if vy != vz and v != min(vy, vz):
            failures.append('dominant_term')
        if (x * y).valuation != x.valuation + vy:
            failures.append('valuation')
        if not (x * (y + z)).equals(x * y + x * z, job.digits):
            failures.append('distributivity')
        if failures:
            raise LawViolation(
                f'Field axioms fail on ({x}, {y}, {z}).', failures=failures, triple=[str(x), str(y), str(z)],
            )
    return {'trials': trials}


def _random_matrix(job, rng):
    """L T L^-1 with T upper triangular, eigenvalues separated mod p, L unipotent."""
    p = job.p
    size = rng.randint(2, min(4, p))
    residues = rng.sample(range(p), size)
    t = [[0] * size for _ in range(size)]
    lower = [[int(i == j) for j in range(size)] for i in range(size)]
    for i in range(size):
        t[i][i] = residues[i] + p * rng.randint(-5, 5)
        for j in range(i + 1, size):
            t[i][j] = rng.randint(-5, 5)
            lower[j][i] = rng.randint(-5, 5)
    field = job.tower.base
    lower = PAdicMatrix.from_entries(lower, field, job.precision)
    return lower @ PAdicMatrix.from_entries(t, field, job.precision) @ lower.inverse()


def _random_polynomial(job, rng):
    return {'polynomial': [rng.randint(-20, 20) for _ in range(rng.randint(1, 4))]}


def _cover_independence(job, rng, fixture):
    """f(A) under the default cover, a cover one radius step finer and another Gamma unit."""
    ctx, f = fixture['context'], fixture['function']
    finer = make_context(ctx.matrix, job.tower, s=ctx.radius, schedule=job.schedule)
    unit = _scalar(job, rng.randint(1, job.p - 1))
    rotated = ctx.with_cover(ctx.cover, unit=unit)
    checks = {
        'finer_cover': cover_independence(ctx, finer, f),
        'gamma_unit': cover_independence(ctx, rotated, f),
    }
    if any(v < job.digits for v in checks.values()):
        raise LawViolation('f(A) depends on the cover.', **{k: str(v) for k, v in checks.items()})
    return {name: reports.valuation(v) for name, v in checks.items()}


def _perturbation(job, rng, fixture):
    """B = A + p^t E just inside delta; resolvent and f(B) bounds."""
    ctx, f = fixture['context'], fixture['function']
    payload = job.payload
    epsilon = _radius(job, payload.get('epsilon')) or ctx.radius
    delta = perturbation_delta(ctx, epsilon)
    if 'perturbation' in payload:
        e = _matrix(job, payload['perturbation'])
    else:
        e = PAdicMatrix.from_entries(
            [[rng.randint(-5, 5) for _ in range(ctx.size)] for _ in range(ctx.size)], job.tower.base, job.precision,
        )
    b = ctx.matrix + e * _scalar(job, Fraction(job.p) ** (delta.exponent + 1))
    report = perturbation_check(ctx, b, epsilon)
    continuity = fcalc_continuity_check(ctx.matrix, b, f, ctx, epsilon)
    return {
        'delta': reports.valuation(delta.exponent),
        'distance': reports.valuation(report.distance),
        'contained': report.contained,
        'samples': [[reports.valuation(o), reports.valuation(bound)] for _, o, bound in report.samples],
        'continuity': {
            'epsilon': str(continuity.epsilon),
            'delta': str(continuity.delta),
            'precondition_gap': continuity.precondition_gap,
            'difference': None if continuity.difference is None else str(continuity.difference),
        },
    }


def _law_suite(job, rng, fixture):
    ctx, f = fixture['context'], fixture['function']
    g = _function(job, _random_polynomial(job, rng), ctx.cover)
    alpha, beta = (_scalar(job, rng.randint(-9, 9)) for _ in range(2))
    report = laws_check(ctx, f, g, alpha, beta, job.payload['trials'], rng.getrandbits(64))
    report.raise_for_violation()
    return {
        'linearity': reports.valuation(report.linearity),
        'multiplicativity': reports.valuation(report.multiplicativity),
        'continuity': [[reports.valuation(o), reports.valuation(b)] for o, b in report.continuity],
    }


SUITE_RUNNERS = {
    'axioms': _axioms,
    'cover_independence': _cover_independence,
    'perturbation': _perturbation,
    'laws': _law_suite,
}


def _fixture(job):
    """A and f shared by the matrix suites: supplied, or drawn from the seed."""
    rng = random.Random(f'{job.seed}/fixture')
    payload = job.payload
    a = _matrix(job, payload['matrix']) if 'matrix' in payload else _random_matrix(job, rng)
    spec = payload.get('function') or _random_polynomial(job, rng)
    ctx = _context(job, a)
    return {'context': ctx, 'function': _function(job, spec, ctx.cover), 'matrix': a}


def cmd_verify(job):
    suites = job.payload.get('suites') or list(SUITES)
    fixture = None
    results = {}
    for name in SUITES:
        if name not in suites:
            continue
        if name != 'axioms' and fixture is None:
            fixture = _fixture(job)
        results[name] = SUITE_RUNNERS[name](job, random.Random(f'{job.seed}/{name}'), fixture)
        logger.info('verify suite %s passed', name)
    certificates = {'seed': job.seed, 'suites': [name for name in SUITES if name in suites]}
    if fixture is not None:
        certificates['matrix'] = reports.matrix(fixture['matrix'])
        certificates['cover'] = reports.cover(fixture['context'].cover)
    return reports.build_report('verify', job.echo, results=results, certificates=certificates)


COMMANDS = {
    'spectrum': cmd_spectrum,
    'cover': cmd_cover,
    'integrate': cmd_integrate,
    'fcalc': cmd_fcalc,
    'verify': cmd_verify,
}


def run_job(job):
    """The report of ``job``; library failures become error reports."""
    try:
        return COMMANDS[job.command](job)
    except PadicError as exc:
        logger.warning('%s failed: %s (%s)', job.command, exc.detail, exc.code)
        return reports.build_report(job.command, job.echo, error=exc)
