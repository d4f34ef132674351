import random
from fractions import Fraction
from unittest import mock

from django.test import SimpleTestCase
from sympy import Matrix, eye

from apps.analytic.functions import constant, from_polynomial, from_rational, indicator
from apps.calculus.context import make_context
from apps.calculus.fcalc import fcalc, fcalc_inductive, fcalc_result
from apps.calculus.inductive import TUHF, UHF, TowerDescriptor, build_inductive
from apps.calculus.laws import cover_independence, laws_check, similarity_invariance
from apps.calculus.perturbation import (
    fcalc_continuity_check,
    perturbation_check,
    perturbation_delta,
    resolvent_bound,
)
from apps.core.exceptions import (
    CoverNotStable,
    DimensionMismatch,
    FunctionNotInFA,
    LimitMismatch,
    NotCauchy,
    NotCovering,
    RadiusUnrealizable,
    ShapeViolation,
)
from apps.geometry.discs import DiscCover, Radius, build_cover
from apps.linalg.matrices import PAdicMatrix
from apps.scalars.tower import get_tower

TOWER = get_tower(5, precision=24, degree_cap=8, guard_digits=4)
M = TOWER.working_digits


def q(value, b=1):
    return TOWER.from_rational(value, b)


def matrix(entries):
    return PAdicMatrix.from_entries(entries, TOWER.base, TOWER.precision)


def horner_matrix(coeffs, a):
    """sum c_k A^k by matrix arithmetic."""
    result = PAdicMatrix.zeros(a.size, a.field)
    for c in reversed(coeffs):
        result = result @ a + PAdicMatrix.identity(a.size, a.field) * c
    return result


def diagonalizable(rng, eigenvalues):
    """Integer S D S^-1 with S = L U unit triangular, so det S = 1."""
    size = len(eigenvalues)
    lower = eye(size)
    upper = eye(size)
    for i in range(size):
        for j in range(i):
            lower[i, j] = rng.randint(-3, 3)
            upper[j, i] = rng.randint(-3, 3)
    s = lower * upper
    a = s * Matrix.diag(*eigenvalues) * s.inv()
    return matrix([[int(a[i, j]) for j in range(size)] for i in range(size)])


def context(a, **kwargs):
    kwargs.setdefault('cross_check', False)
    return make_context(a, TOWER, **kwargs)


class ContextTests(SimpleTestCase):
    def test_two_point_spectrum(self):
        ctx = context(matrix([[0, 0], [0, 5]]))
        self.assertEqual(ctx.radius, Radius(5, 2))
        self.assertEqual(len(ctx.cover.centers), 2)
        self.assertEqual(ctx.gamma.valuation, 2)

    def test_scalar_matrix_gives_one_disc(self):
        ctx = context(matrix([[3, 0, 0], [0, 3, 0], [0, 0, 3]]))
        self.assertEqual(len(ctx.cover.centers), 1)

    def test_constant_inductive_element_uses_level_cover(self):
        a = matrix([[0, 0], [0, 5]])
        element = build_inductive(TowerDescriptor(UHF, (2, 4)), [a, a.block_repeat(2)])
        self.assertEqual(context(element).radius, context(a).radius)

    def test_gamma_unit_must_be_a_unit(self):
        with self.assertRaises(RadiusUnrealizable):
            context(matrix([[1]]), unit=q(5))

    def test_given_cover_must_cover_the_spectrum(self):
        cover = DiscCover((q(0),), Radius(5, 2), (q(0),))
        with self.assertRaises(NotCovering):
            context(matrix([[0, 0], [0, 5]]), cover=cover)

    def test_cover_from_function(self):
        cover = build_cover([q(0), q(1)], Radius(5, 0))
        f = from_polynomial([0, 1], cover)
        ctx = context(matrix([[0, 0], [0, 1]]), f=f)
        self.assertEqual(ctx.radius, cover.radius)


class FcalcTests(SimpleTestCase):
    def setUp(self):
        self.rng = random.Random(7)
        self.a = matrix([[0, 0], [0, 5]])
        self.ctx = context(self.a)

    def test_unit_law(self):
        result = fcalc(self.ctx, constant(self.ctx.cover, 1))
        self.assertTrue(result.equals(PAdicMatrix.identity(2, TOWER.base), M))

    def test_identity_function(self):
        result = fcalc(self.ctx, from_polynomial([0, 1], self.ctx.cover))
        self.assertTrue(result.equals(self.a, M))

    def test_indicator_is_spectral_idempotent(self):
        zero_disc = self.ctx.cover.index_of(q(0))
        result = fcalc(self.ctx, indicator(self.ctx.cover, [zero_disc]))
        self.assertTrue(result.equals(matrix([[1, 0], [0, 0]]), M))
        j = self.ctx.spectrum.index_of(q(0), M)
        self.assertTrue(result.equals(self.ctx.decomposition.idempotents[j], M))

    def test_rational_function(self):
        f = from_rational([1], [-1, 1], self.ctx.cover)
        expected = self.a.shift(1).inverse()
        self.assertTrue(fcalc(self.ctx, f).equals(expected, M))

    def test_polynomial_consistency(self):
        for _ in range(10):
            size = self.rng.randint(1, 4)
            a = diagonalizable(self.rng, [self.rng.randint(-20, 20) for _ in range(size)])
            ctx = context(a)
            coeffs = [self.rng.randint(-30, 30) for _ in range(self.rng.randint(1, 7))]
            result = fcalc(ctx, from_polynomial(coeffs, ctx.cover))
            self.assertTrue(result.equals(horner_matrix(coeffs, ctx.matrix), M))

    def test_unit_law_on_random_matrices(self):
        for _ in range(10):
            size = self.rng.randint(1, 4)
            ctx = context(diagonalizable(self.rng, [self.rng.randint(-20, 20) for _ in range(size)]))
            result = fcalc(ctx, constant(ctx.cover, 1))
            self.assertTrue(result.equals(PAdicMatrix.identity(size, ctx.field), M))

    def test_jordan_blocks(self):
        a = matrix([[2, 1, 0], [0, 2, 0], [0, 0, 8]])
        ctx = context(a)
        self.assertTrue(fcalc(ctx, constant(ctx.cover, 1)).equals(PAdicMatrix.identity(3, TOWER.base), M))
        coeffs = [1, -2, 0, 3]
        self.assertTrue(fcalc(ctx, from_polynomial(coeffs, ctx.cover)).equals(horner_matrix(coeffs, a), M))

    def test_result_commutes_with_matrix(self):
        a = diagonalizable(self.rng, [0, 5, 1])
        ctx = context(a)
        result = fcalc(ctx, from_rational([2, 1], [-3, 1], ctx.cover))
        self.assertTrue((result @ ctx.matrix).equals(ctx.matrix @ result, M))

    def test_function_outside_the_spectrum(self):
        far = DiscCover((q(1),), Radius(5, 2), (q(1),))
        with self.assertRaises(FunctionNotInFA):
            fcalc(self.ctx, from_polynomial([0, 1], far))

    def test_parallel_matches_serial(self):
        f = from_rational([1], [-1, 1], self.ctx.cover)
        serial = fcalc(self.ctx, f, workers=1)
        parallel = fcalc(self.ctx, f, workers=3)
        self.assertEqual(serial.render(), parallel.render())

    # LIMIT PATH TESTS

    def test_limit_path_agrees_with_oracle(self):
        ctx = context(self.a, cross_check=True)
        result = fcalc_result(ctx, from_rational([1], [-1, 1], ctx.cover))
        self.assertTrue(all(trace is not None for trace in result.traces))
        self.assertTrue(result.value.equals(self.a.shift(1).inverse(), M))

    def test_limit_path_on_jordan_block(self):
        a = matrix([[3, 1], [0, 3]])
        ctx = context(a, cross_check=True)
        result = fcalc_result(ctx, from_polynomial([0, 0, 1], ctx.cover))
        self.assertTrue(result.value.equals(a @ a, M))
        self.assertEqual(len(result.traces[0].schedule), 2)

    def test_limit_mismatch_is_reported(self):
        ctx = context(self.a, cross_check=True)
        with mock.patch('apps.calculus.fcalc.disc_oracle', return_value=PAdicMatrix.zeros(2, TOWER.base)):
            with self.assertRaises(LimitMismatch):
                fcalc(ctx, constant(ctx.cover, 1))


class IndependenceTests(SimpleTestCase):
    def setUp(self):
        self.a = matrix([[0, 0], [0, 5]])
        self.ctx = context(self.a)

    def test_finer_cover(self):
        finer = self.ctx.with_cover(build_cover(self.ctx.spectrum.values, Radius(5, 2)))
        self.assertEqual(finer.radius, Radius(5, 3))
        f = from_rational([1, 1], [-2, 1], self.ctx.cover)
        self.assertGreaterEqual(cover_independence(self.ctx, finer, f), M)

    def test_centers_off_the_spectrum(self):
        cover = DiscCover(self.ctx.spectrum.values, Radius(5, 2), (q(125), q(130), q(2))).validate()
        other = self.ctx.with_cover(cover)
        result = fcalc(other, indicator(cover, [0, 2]))
        self.assertTrue(result.equals(matrix([[1, 0], [0, 0]]), M))
        f = from_polynomial([1, 0, 4], cover)
        self.assertGreaterEqual(cover_independence(self.ctx, other, f), M)

    def test_gamma_unit(self):
        unit = TOWER.teichmuller(TOWER.field(1).residue.generator, 1)
        ctx = context(self.a, cross_check=True)
        turned = ctx.with_cover(ctx.cover, unit=unit)
        f = from_rational([1], [-1, 1], ctx.cover)
        result = fcalc_result(turned, f)
        self.assertTrue(all(trace is not None for trace in result.traces))
        self.assertGreaterEqual(cover_independence(ctx, turned, f), M)

    def test_random_matrices(self):
        rng = random.Random(19)
        for _ in range(50):
            a = diagonalizable(rng, rng.sample(range(-12, 12), rng.randint(2, 4)))
            ctx = context(a)
            finer = context(a, s=ctx.radius)
            turned = ctx.with_cover(ctx.cover, unit=q(rng.randint(1, 4)))
            f = from_polynomial([rng.randint(-9, 9) for _ in range(4)], ctx.cover) + indicator(ctx.cover, [0])
            self.assertGreaterEqual(cover_independence(ctx, finer, f), M)
            self.assertGreaterEqual(cover_independence(ctx, turned, f), M)

    def test_similarity(self):
        s, s_inverse = matrix([[1, 2], [0, 1]]), matrix([[1, -2], [0, 1]])
        conjugated = context(s @ self.a @ s_inverse, cover=self.ctx.cover)
        f = from_rational([3], [-1, 1], self.ctx.cover) + from_polynomial([0, 0, 1], self.ctx.cover)
        self.assertGreaterEqual(similarity_invariance(self.ctx, conjugated, f, s, s_inverse), M)


class LawsTests(SimpleTestCase):
    def setUp(self):
        self.rng = random.Random(11)
        self.a = matrix([[0, 0], [0, 5]])
        self.ctx = context(self.a)

    def test_constants(self):
        one = constant(self.ctx.cover, 1)
        report = laws_check(self.ctx, one, one, 1, 1, trials=2)
        self.assertTrue(report.holds)
        linear = fcalc(self.ctx, one * 1 + one * 1)
        self.assertTrue(linear.equals(PAdicMatrix.identity(2, TOWER.base) * 2, M))

    def test_identity_squared(self):
        x = from_polynomial([0, 1], self.ctx.cover)
        report = laws_check(self.ctx, x, x, q(2), q(-1), trials=2)
        self.assertTrue(report.holds)
        self.assertTrue(fcalc(self.ctx, x * x).equals(self.a @ self.a, M))

    def test_orthogonal_indicators(self):
        first = indicator(self.ctx.cover, [0])
        second = indicator(self.ctx.cover, [1])
        report = laws_check(self.ctx, first, second, 1, 1, trials=0)
        self.assertTrue(report.holds)
        self.assertTrue(fcalc(self.ctx, first * second).is_zero())

    def test_random_functions(self):
        for _ in range(4):
            a = diagonalizable(self.rng, [self.rng.randint(-10, 10) for _ in range(3)])
            ctx = context(a)
            cover = ctx.cover
            choices = [
                from_polynomial([self.rng.randint(-9, 9) for _ in range(4)], cover),
                indicator(cover, [self.rng.randrange(len(cover.centers))]),
                from_rational([1], [-self.rng.choice([1, 2, 3]) * 5 - 1, 5], cover),
            ]
            f, g = self.rng.choice(choices), self.rng.choice(choices)
            report = laws_check(ctx, f, g, q(self.rng.randint(1, 9)), q(self.rng.randint(1, 9)), trials=3)
            self.assertTrue(report.holds, report)

    def test_continuity_modulus(self):
        f = from_rational([1], [-1, 1], self.ctx.cover)
        report = laws_check(self.ctx, f, f, 1, 0, trials=50, seed=3)
        self.assertEqual(len(report.continuity), 50)
        for observed, bound in report.continuity:
            self.assertGreaterEqual(observed, min(bound, M))


class PerturbationTests(SimpleTestCase):
    def setUp(self):
        self.rng = random.Random(13)
        self.a = matrix([[0, 0], [0, 5]])
        self.ctx = context(self.a)

    def test_scalar_zero(self):
        ctx = context(matrix([[0]]))
        epsilon = Radius(5, 1)
        self.assertEqual(resolvent_bound(ctx, epsilon).norm, 5)
        self.assertEqual(perturbation_delta(ctx, epsilon), Radius(5, 3))

    def test_diagonal(self):
        epsilon = Radius(5, 2)
        self.assertEqual(resolvent_bound(self.ctx, epsilon).exponent, 2)
        self.assertEqual(perturbation_delta(self.ctx, epsilon), Radius(5, 6))

    def test_jordan_block(self):
        ctx = context(matrix([[0, 1], [0, 0]]))
        bound = resolvent_bound(ctx, Radius(5, 1))
        self.assertEqual(bound.exponent, 2)
        self.assertEqual(bound.order, 1)

    def test_unperturbed(self):
        report = perturbation_check(self.ctx, self.a, Radius(5, 2))
        self.assertTrue(report.within_delta)
        self.assertTrue(report.holds)

    def test_small_perturbation(self):
        b = matrix([[0, 0], [5**7, 5]])
        report = perturbation_check(self.ctx, b, Radius(5, 2))
        self.assertTrue(report.within_delta)
        self.assertTrue(report.contained)
        self.assertEqual(len(report.samples), 10)
        self.assertTrue(report.holds)

    def test_perturbation_above_delta_is_reported(self):
        b = matrix([[0, 5**5], [0, 5]])
        report = perturbation_check(self.ctx, b, Radius(5, 2))
        self.assertFalse(report.within_delta)
        self.assertTrue(report.contained)

    def test_random_perturbations(self):
        for _ in range(50):
            a = diagonalizable(self.rng, self.rng.sample(range(-12, 12), 3))
            ctx = context(a)
            epsilon = ctx.radius
            delta = perturbation_delta(ctx, epsilon)
            t = delta.exponent + 1
            noise = [[self.rng.randint(-4, 4) * 5**t for _ in range(3)] for _ in range(3)]
            b = ctx.matrix + matrix(noise)
            report = perturbation_check(ctx, b, epsilon)
            self.assertTrue(report.holds)
            closer = ctx.matrix + matrix([[x * 5 for x in row] for row in noise])
            for f in (
                from_polynomial([self.rng.randint(-9, 9) for _ in range(4)], ctx.cover),
                indicator(ctx.cover, [self.rng.randrange(len(ctx.cover.centers))]),
            ):
                continuity = fcalc_continuity_check(ctx.matrix, closer, f, ctx, epsilon)
                self.assertFalse(continuity.precondition_gap)
                self.assertTrue(continuity.holds)

    # CONTINUITY TESTS

    def test_indicator_continuity(self):
        b = matrix([[0, 0], [5**8, 5]])
        f = indicator(self.ctx.cover, [self.ctx.cover.index_of(q(0))])
        report = fcalc_continuity_check(self.a, b, f, self.ctx, Fraction(1, 5**5))
        self.assertFalse(report.precondition_gap)
        self.assertTrue(report.holds)
        self.assertLessEqual(report.difference, Fraction(1, 5**6))

    def test_same_matrix(self):
        f = from_polynomial([1, 2, 3], self.ctx.cover)
        report = fcalc_continuity_check(self.a, self.a, f, self.ctx, Fraction(1, 5**10))
        self.assertEqual(report.difference, 0)

    def test_constant_function(self):
        b = matrix([[0, 0], [5**9, 5]])
        report = fcalc_continuity_check(self.a, b, constant(self.ctx.cover, 1), self.ctx, Fraction(1, 5**4))
        self.assertLess(report.difference, Fraction(1, 5**M))

    def test_precondition_gap(self):
        b = matrix([[0, 0], [125, 5]])
        f = indicator(self.ctx.cover, [0])
        report = fcalc_continuity_check(self.a, b, f, self.ctx, Fraction(1, 5**5))
        self.assertTrue(report.precondition_gap)


class InductiveTests(SimpleTestCase):
    def setUp(self):
        self.ones = {d: matrix([[1 if j >= i else 0 for j in range(d)] for i in range(d)]) for d in (1, 2, 4, 8, 16)}

    def contracting(self, kind=UHF, dimensions=(1, 2, 4, 8), start=0):
        tower = TowerDescriptor(kind, dimensions)
        levels = [matrix([[start]])]
        for k in range(1, len(dimensions)):
            levels.append(tower.embed(levels[-1], k - 1, k) + self.ones[dimensions[k]] * 5**k)
        return tower, levels

    def test_tower_validation(self):
        with self.assertRaises(DimensionMismatch):
            TowerDescriptor(UHF, (2, 3))
        with self.assertRaises(ShapeViolation):
            TowerDescriptor('other', (1, 2))

    def test_single_level(self):
        element = build_inductive(TowerDescriptor(UHF, (3,)), [matrix([[1, 2, 0], [0, 1, 0], [0, 0, 4]])])
        self.assertEqual(element.certificate, ())
        self.assertTrue(element.converged)

    def test_certificate(self):
        tower, levels = self.contracting()
        element = build_inductive(tower, levels)
        self.assertEqual(element.certificate, (1, 2, 3))
        self.assertEqual(element.certificate_norms(5), [Fraction(1, 5), Fraction(1, 25), Fraction(1, 125)])
        self.assertFalse(element.converged)

    def test_triangular_levels(self):
        tower = TowerDescriptor(TUHF, (1, 2))
        with self.assertRaises(ShapeViolation):
            build_inductive(tower, [matrix([[0]]), matrix([[0, 0], [5, 0]])])

    def test_growing_steps_are_not_cauchy(self):
        tower = TowerDescriptor(UHF, (1, 2, 4))
        first = matrix([[0]])
        second = tower.embed(first, 0, 1) + self.ones[2] * 25
        third = tower.embed(second, 1, 2) + self.ones[4] * 5
        with self.assertRaises(NotCauchy):
            build_inductive(tower, [first, second, third])

    def test_constant_sequence(self):
        a = matrix([[0, 0], [0, 5]])
        tower = TowerDescriptor(UHF, (2, 4))
        element = build_inductive(tower, [a, tower.embed(a, 0, 1)])
        cover = context(a).cover
        f = from_polynomial([1, 0, 1], cover)
        result = fcalc_inductive(element, f, cover, TOWER, cross_check=False)
        self.assertGreaterEqual(result.trace[0], M)
        expected = tower.embed(horner_matrix([1, 0, 1], a), 0, 1)
        self.assertTrue(result.value.equals(expected, M))

    def test_unit_on_contracting_element(self):
        for kind in (UHF, TUHF):
            tower, levels = self.contracting(kind)
            element = build_inductive(tower, levels)
            cover = DiscCover((q(0),), Radius(5, 0), (q(0),))
            result = fcalc_inductive(element, constant(cover, 1), cover, TOWER, cross_check=False)
            self.assertTrue(result.value.equals(PAdicMatrix.identity(8, TOWER.base), M))

    def test_trace_contracts(self):
        tower, levels = self.contracting(TUHF)
        element = build_inductive(tower, levels)
        cover = DiscCover((q(0),), Radius(5, 0), (q(0),))
        f = from_polynomial([0, 2, 0, 1], cover)
        result = fcalc_inductive(element, f, cover, TOWER, cross_check=False)
        self.assertEqual(len(result.trace), 3)
        for k, v in enumerate(result.trace):
            self.assertGreaterEqual(v, k + 1)
        self.assertTrue(result.value.equals(horner_matrix([0, 2, 0, 1], levels[-1]), M))

    def test_appending_a_stable_level(self):
        tower, levels = self.contracting(TUHF, (1, 2, 4, 8, 16))
        levels = levels[:4]
        element = build_inductive(tower, levels)
        extended = build_inductive(tower, levels + [tower.embed(levels[-1], 3, 4)])
        cover = DiscCover((q(0),), Radius(5, 0), (q(0),))
        f = from_polynomial([1, 1, 1], cover)
        before = fcalc_inductive(element, f, cover, TOWER, cross_check=False)
        after = fcalc_inductive(extended, f, cover, TOWER, cross_check=False)
        self.assertGreaterEqual(after.trace[-1], M)
        self.assertTrue(after.value.equals(tower.embed(before.value, 3, 4), M))

    def test_idempotent_on_the_limit(self):
        tower = TowerDescriptor(TUHF, (2, 4))
        first = matrix([[0, 1], [0, 1]])
        second = tower.embed(first, 0, 1) + matrix([[0, 0, 0, 5**3]] + [[0] * 4] * 3)
        element = build_inductive(tower, [first, second])
        cover = build_cover([q(0), q(1)], Radius(5, 0))
        result = fcalc_inductive(element, indicator(cover, [0]), cover, TOWER, cross_check=False)
        self.assertTrue((result.value @ result.value).equals(result.value, M))

    def test_escaping_spectrum(self):
        tower = TowerDescriptor(TUHF, (1, 2))
        element = build_inductive(tower, [matrix([[0]]), matrix([[0, 0], [0, 1]])])
        cover = DiscCover((q(0),), Radius(5, 1), (q(0),))
        with self.assertRaises(CoverNotStable):
            fcalc_inductive(element, constant(cover, 1), cover, TOWER, cross_check=False)

    def test_leading_levels_outside_the_cover_are_dropped(self):
        tower = TowerDescriptor(TUHF, (1, 2))
        element = build_inductive(tower, [matrix([[5]]), matrix([[0, 0], [0, 0]])])
        cover = DiscCover((q(0),), Radius(5, 1), (q(0),))
        result = fcalc_inductive(element, constant(cover, 1), cover, TOWER, cross_check=False)
        self.assertEqual(result.first_level, 1)
        self.assertEqual(result.trace, ())
