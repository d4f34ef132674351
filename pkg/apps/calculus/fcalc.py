"""f(A) = sum_i of the Shnirelman integrals of f(x)(x - a_i)R(x; A) over the cover circles."""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from apps.analytic.functions import check_Br
from apps.calculus.context import make_context
from apps.core.conf import padic_setting
from apps.core.exceptions import (
    CoverNotStable,
    DegreeCapExceeded,
    FunctionNotInFA,
    IncompatibleDomains,
    LimitMismatch,
    NotCauchy,
    NotCovering,
    NotCoveringSigma,
    NotDisjoint,
)
from apps.geometry.discs import OPEN
from apps.linalg.matrices import PAdicMatrix
from apps.linalg.spectrum import resolvent
from apps.shnirelman.integral import integrate_matrix

logger = logging.getLogger(__name__)


@dataclass
class FcalcResult:
    value: PAdicMatrix
    per_disc: tuple
    traces: tuple
    cover: object


def fit_function(ctx, f):
    """f re-expanded on the discs of the context cover, or FunctionNotInFA."""
    try:
        check_Br(f, ctx.spectrum.values)
        return f.restrict(ctx.cover)
    except (NotCoveringSigma, IncompatibleDomains) as exc:
        raise FunctionNotInFA(str(exc.detail), **exc.extra) from exc


def disc_oracle(ctx, piece):
    """Constant Laurent coefficient of f(x)(x - a)R(x; A) at the piece center.

    It is sum over x_j in the open disc of sum_nu f_nu(x_j) (A - x_j)^nu E_j,
    with f_nu the Taylor coefficients of the piece.
    """
    disc = piece.disc.as_kind(OPEN)
    total = PAdicMatrix.zeros(ctx.size, ctx.field)
    for j, value in enumerate(ctx.spectrum.values):
        if not disc.contains(value):
            continue
        for nu, term in enumerate(ctx.decomposition.nilpotent_powers(j)):
            total = total + term * piece.taylor_coefficient(value, nu)
    return total


def disc_integral(ctx, piece, workers=None):
    """The Shnirelman limit of f(x)(x - a)R(x; A) on |x - a| = r, or None past the degree cap."""
    a = ctx.matrix
    center = piece.center

    def integrand(x):
        return resolvent(x, a) * (piece.eval(x) * (x - center))

    try:
        return integrate_matrix(integrand, ctx.circle(center), ctx.schedule, ctx.tower, workers=workers)
    except DegreeCapExceeded:
        logger.warning('limit path skipped at %s: schedule needs a degree above %s', center, ctx.tower.degree_cap)
        return None


def _disc_term(ctx, piece, cross_check):
    oracle = disc_oracle(ctx, piece)
    if not cross_check:
        return oracle, None
    result = disc_integral(ctx, piece, workers=1)
    if result is not None and not result.value.equals(oracle, ctx.digits):
        raise LimitMismatch(
            f'Integral over the circle at {piece.center} disagrees with the coefficient oracle.',
            center=str(piece.center), valuation=str((result.value - oracle).valuation), schedule=list(result.schedule),
        )
    return oracle, result


def fcalc_result(ctx, f, cross_check=None, workers=None):
    """f(A) with the per-disc terms and the Shnirelman traces behind them."""
    cross_check = ctx.cross_check if cross_check is None else cross_check
    workers = padic_setting('WORKERS') if workers is None else workers
    fitted = fit_function(ctx, f)
    pieces = fitted.pieces
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            terms = list(pool.map(lambda piece: _disc_term(ctx, piece, cross_check), pieces))
    else:
        terms = [_disc_term(ctx, piece, cross_check) for piece in pieces]
    total = PAdicMatrix.zeros(ctx.size, ctx.field)
    for oracle, _ in terms:
        total = total + oracle
    logger.info('f(A) over %s discs, cross-checked: %s', len(pieces), bool(cross_check))
    return FcalcResult(total, tuple(t[0] for t in terms), tuple(t[1] for t in terms), ctx.cover)


def fcalc(ctx, f, cross_check=None, workers=None):
    return fcalc_result(ctx, f, cross_check, workers).value


@dataclass
class InductiveResult:
    value: PAdicMatrix
    level: int
    trace: tuple
    first_level: int
    contexts: tuple


def _level_contexts(element, cover, tower, schedule, cross_check):
    contexts = []
    for k, a in element.levels:
        try:
            ctx = make_context(a, tower, cover=cover, schedule=schedule, cross_check=cross_check)
        except (NotCovering, NotDisjoint) as exc:
            contexts.append((k, None, exc))
            continue
        contexts.append((k, ctx, None))
    first = len(contexts)
    while first > 0 and contexts[first - 1][1] is not None:
        first -= 1
    if first == len(contexts):
        failure = contexts[-1][2]
        raise CoverNotStable(
            f'The level {contexts[-1][0]} spectrum escapes the cover: {failure.detail}', level=contexts[-1][0],
        )
    for k, _, exc in contexts[:first]:
        if exc is not None:
            logger.debug('level %s left out: %s', k, exc.detail)
    return [(k, ctx) for k, ctx, _ in contexts[first:]]


def fcalc_inductive(element, f, cover, tower, schedule=None, cross_check=None, digits=None):
    """f(A) at the final stored level, after checking that f(A_k) contracts.

    Levels whose spectrum escapes the cover are dropped from the front; a
    later escape raises CoverNotStable.
    """
    digits = tower.working_digits if digits is None else digits
    contexts = _level_contexts(element, cover, tower, schedule, cross_check)
    values = [(k, fcalc(ctx, f, cross_check)) for k, ctx in contexts]
    trace = []
    for (k, value), (following, next_value) in zip(values, values[1:]):
        v = (element.tower.embed(value, k, following) - next_value).valuation
        if trace and v < min(trace[-1], digits):
            raise NotCauchy(
                f'f(A_{following}) moves further than f(A_{k}) did.',
                trace=[str(t) for t in trace + [v]],
            )
        trace.append(v)
    logger.info('inductive f(A) over levels %s..%s, trace %s', values[0][0], values[-1][0], trace)
    k, value = values[-1]
    return InductiveResult(value, k, tuple(trace), contexts[0][0], tuple(ctx for _, ctx in contexts))
