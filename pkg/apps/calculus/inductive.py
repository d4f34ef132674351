"""UHF / TUHF towers of matrix algebras and elements given by their levels."""
import logging
from dataclasses import dataclass
from fractions import Fraction

from apps.core.conf import working_digits
from apps.core.exceptions import DimensionMismatch, NotCauchy, ShapeViolation
from apps.scalars.numbers import INF

logger = logging.getLogger(__name__)

UHF = 'UHF'
TUHF = 'TUHF'


@dataclass(frozen=True)
class TowerDescriptor:
    """Levels M_{d_n} (UHF) or T_{d_n} (TUHF) with d_n | d_{n+1}.

    A level embeds into the next one as diag(A, ..., A) with
    d_{n+1} / d_n blocks.
    """
    kind: str
    dimensions: tuple

    def __post_init__(self):
        if self.kind not in (UHF, TUHF):
            raise ShapeViolation(f'Unknown tower kind {self.kind!r}.', kind=self.kind)
        if not self.dimensions or any(d < 1 for d in self.dimensions):
            raise DimensionMismatch(f'Invalid level dimensions {list(self.dimensions)}.')
        for d, following in zip(self.dimensions, self.dimensions[1:]):
            if following % d:
                raise DimensionMismatch(f'{d} does not divide {following}.', dimensions=list(self.dimensions))

    @property
    def triangular(self):
        return self.kind == TUHF

    def embed(self, matrix, source, target):
        """Image of a level-``source`` matrix at level ``target``."""
        if target < source:
            raise DimensionMismatch(f'Cannot embed level {source} into level {target}.')
        if matrix.size != self.dimensions[source]:
            raise DimensionMismatch(f'Level {source} holds {self.dimensions[source]}x{self.dimensions[source]} matrices.')
        if target == source:
            return matrix
        return matrix.block_repeat(self.dimensions[target] // self.dimensions[source])


@dataclass(frozen=True)
class InductiveElement:
    tower: TowerDescriptor
    levels: tuple
    certificate: tuple
    converged: bool

    @property
    def final(self):
        return self.levels[-1][1]

    def certificate_norms(self, p):
        return [Fraction(0) if v == INF else Fraction(p) ** -v for v in self.certificate]


def build_inductive(tower, matrices, levels=None, digits=None):
    """Validate level matrices A_k against the tower and their Cauchy certificate.

    The certificate lists the valuations of embed(A_k) - A_{k+1}; it must be
    non-decreasing. ``converged`` says the last entry reached p^-M.
    """
    matrices = list(matrices)
    levels = list(range(len(matrices))) if levels is None else list(levels)
    digits = working_digits() if digits is None else digits
    if not matrices or len(levels) != len(matrices):
        raise DimensionMismatch(f'{len(matrices)} matrices for levels {levels}.')
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise DimensionMismatch(f'Levels {levels} are not increasing.')
    for k, a in zip(levels, matrices):
        if k >= len(tower.dimensions) or a.size != tower.dimensions[k]:
            raise DimensionMismatch(f'Matrix of size {a.size} does not fit level {k}.', level=k)
        if tower.triangular and not a.is_upper_triangular():
            raise ShapeViolation(f'Level {k} is not upper triangular.', level=k)
    certificate = []
    for (k, a), (following, b) in zip(zip(levels, matrices), zip(levels[1:], matrices[1:])):
        v = (tower.embed(a, k, following) - b).valuation
        if certificate and v < min(certificate[-1], digits):
            raise NotCauchy(
                f'Level {following} moves further than level {k} did.',
                certificate=[str(c) for c in certificate + [v]],
            )
        certificate.append(v)
    converged = not certificate or certificate[-1] >= digits
    logger.info('inductive %s element with %s levels, certificate %s', tower.kind, len(levels), certificate)
    return InductiveElement(tower, tuple(zip(levels, matrices)), tuple(certificate), converged)
