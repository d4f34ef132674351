"""Algebra laws of h -> h(A): linearity, multiplicativity, continuity in h, cover independence."""
import logging
import random
from dataclasses import dataclass, field

from apps.analytic.functions import from_series
from apps.calculus.fcalc import fcalc, fit_function
from apps.calculus.perturbation import resolvent_bound
from apps.core.conf import padic_setting
from apps.core.exceptions import LawViolation
from apps.scalars.numbers import INF

logger = logging.getLogger(__name__)


@dataclass
class LawReport:
    """Valuations of the differences between both sides of each law."""
    digits: int
    linearity: float
    multiplicativity: float
    continuity: list = field(default_factory=list)

    @property
    def holds(self):
        return (
            self.linearity >= self.digits
            and self.multiplicativity >= self.digits
            and all(observed >= min(bound, self.digits) for observed, bound in self.continuity)
        )

    def raise_for_violation(self):
        if not self.holds:
            raise LawViolation(
                'A functional-calculus law failed at working precision.',
                linearity=str(self.linearity), multiplicativity=str(self.multiplicativity),
                continuity=[[str(o), str(b)] for o, b in self.continuity],
            )


def _perturbation(ctx, rng, shift, terms):
    p = ctx.tower.p
    lists = [
        [rng.choice((1, -1)) * rng.randint(1, p - 1) * p ** shift for _ in range(terms)]
        for _ in ctx.cover.centers
    ]
    return from_series(ctx.cover, lists, ctx.tower.precision)


def continuity_trials(ctx, f, trials=5, seed=None, shift=None):
    """(observed, bound) valuations of ||h(A) - f(A)|| <= ||h - f||_r r N_r for perturbed h."""
    rng = random.Random(padic_setting('DEFAULT_SEED') if seed is None else seed)
    fitted = fit_function(ctx, f)
    base = fcalc(ctx, fitted, cross_check=False)
    n_r = resolvent_bound(ctx, ctx.radius).exponent
    shift = ctx.digits // 2 if shift is None else shift
    out = []
    for _ in range(trials):
        delta = _perturbation(ctx, rng, shift, rng.randint(1, 4))
        sup_valuation = min(piece.sup_valuation() for piece in delta.pieces)
        if sup_valuation == INF:
            continue
        observed = (fcalc(ctx, fitted + delta, cross_check=False) - base).valuation
        out.append((observed, sup_valuation + ctx.radius.exponent - n_r))
    return out


def laws_check(ctx, f, g, alpha, beta, trials=5, seed=None):
    """Both sides of (alpha f + beta g)(A) and (f g)(A), plus the continuity modulus in h."""
    fa, ga = fcalc(ctx, f), fcalc(ctx, g)
    linear = fcalc(ctx, f * alpha + g * beta)
    product = fcalc(ctx, f * g)
    report = LawReport(
        ctx.digits,
        (linear - (fa * alpha + ga * beta)).valuation,
        (product - fa @ ga).valuation,
        continuity_trials(ctx, f, trials, seed),
    )
    logger.info(
        'laws: linearity p^-%s, multiplicativity p^-%s, %s continuity trials',
        report.linearity, report.multiplicativity, len(report.continuity),
    )
    return report


def cover_independence(ctx, other, f):
    """Valuation of f(A) under one context minus f(A) under another (other cover, radius or Gamma)."""
    return (fcalc(ctx, f) - fcalc(other, f)).valuation


def similarity_invariance(ctx, conjugated_ctx, f, s, s_inverse):
    """Valuation of f(S A S^-1) - S f(A) S^-1."""
    return (fcalc(conjugated_ctx, f) - s @ fcalc(ctx, f) @ s_inverse).valuation
