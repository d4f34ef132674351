import random

from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from apps.analytic.functions import from_rational
from apps.core.exceptions import (
    DegreeCapExceeded,
    EvaluationError,
    NoStabilization,
    NotCoprime,
    OutsideDomain,
    RadiusUnrealizable,
)
from apps.geometry.discs import DiscCover, Radius
from apps.linalg.matrices import PAdicMatrix
from apps.linalg.spectrum import resolvent
from apps.scalars.polynomials import horner
from apps.scalars.roots import unity_degree
from apps.scalars.tower import get_tower
from apps.shnirelman.integral import (
    CircleSpec,
    SchedulePolicy,
    integrate_matrix,
    integrate_scalar,
    oracle_series_integral,
    partial_sum,
)

TOWER = get_tower(5, precision=24, degree_cap=8, guard_digits=4)
M = TOWER.working_digits
LONG = SchedulePolicy(M + 1, 2)


def q(value, b=1):
    return TOWER.from_rational(value, b)


def unit_circle(center=0, tower=TOWER):
    return CircleSpec.around(tower.from_rational(center), Radius(tower.p, 0))


class CircleTests(SimpleTestCase):
    def test_gamma_matches_radius(self):
        circle = CircleSpec.around(q(3), Radius(5, 2))
        self.assertEqual(circle.gamma, q(25))
        with self.assertRaises(RadiusUnrealizable):
            CircleSpec(q(3), q(5), Radius(5, 2))

    def test_schedule_points(self):
        self.assertEqual(SchedulePolicy(2, 4).points(5, 2), [2, 3, 4, 6])
        self.assertEqual(LONG.working_degree(5, 1, 8), 3)
        self.assertEqual(LONG.points(5, 3), [31, 62])
        with self.assertRaises(DegreeCapExceeded):
            LONG.working_degree(5, 1, 2)


class PartialSumTests(SimpleTestCase):
    def setUp(self):
        self.a = q(2)
        self.circle = CircleSpec.around(self.a, Radius(5, 1))

    def test_constant(self):
        for n in (2, 3, 4, 6):
            self.assertTrue(partial_sum(lambda x: q(7), self.circle, n).equals(q(7), M))

    def test_monomials_below_n_vanish(self):
        for k in range(1, 6):
            value = partial_sum(lambda x: (x - self.a) ** k, self.circle, 6)
            self.assertTrue(value.equals(TOWER.zero(), M))

    def test_monomial_of_degree_n(self):
        value = partial_sum(lambda x: (x - self.a) ** 4, self.circle, 4)
        self.assertTrue(value.equals(self.circle.gamma ** 4, M))

    def test_character_orthogonality(self):
        for p in (3, 5):
            tower = get_tower(p, precision=24, degree_cap=8, guard_digits=4)
            a = tower.from_rational(1, 7)
            circle = CircleSpec.around(a, Radius(p, 1))
            for n in range(1, 41):
                if n % p == 0 or unity_degree(p, n) > 4:
                    continue
                for k in range(0, 31):
                    value = partial_sum(lambda x: (x - a) ** k, circle, n, tower)
                    expected = circle.gamma ** k if k % n == 0 else tower.zero()
                    self.assertTrue(value.equals(expected, M), (p, n, k))

    def test_not_coprime(self):
        with self.assertRaises(NotCoprime):
            partial_sum(lambda x: x, self.circle, 10)

    def test_evaluation_error(self):
        def failing(x):
            raise OutsideDomain('nowhere')

        with self.assertRaises(EvaluationError):
            partial_sum(failing, self.circle, 4)

    def test_parallel_matches_serial(self):
        f = from_rational([1], [-1, 1], DiscCover((self.a,), Radius(5, 1), (self.a,)))
        serial = partial_sum(f.eval, self.circle, 24, workers=1)
        parallel = partial_sum(f.eval, self.circle, 24, workers=4)
        self.assertEqual(serial, parallel)

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.integers(min_value=-500, max_value=500), min_size=1, max_size=8))
    def test_average_bounded_by_samples(self, coeffs):
        poly = [q(c) for c in coeffs]
        samples = [horner(poly, self.a + xi * self.circle.gamma).norm() for xi in TOWER.roots_of_unity(6)]
        value = partial_sum(lambda x: horner(poly, x), self.circle, 6)
        self.assertLessEqual(value.norm(), max(samples))


class IntegrateScalarTests(SimpleTestCase):
    def setUp(self):
        self.rng = random.Random(3)

    def test_monomials_integrate_to_zero(self):
        circle = unit_circle()
        for k in range(1, 4):
            result = integrate_scalar(lambda x: x ** k, circle, SchedulePolicy(k + 1, 2))
            self.assertTrue(result.value.is_zero() or result.value.valuation >= M)

    def test_linear_polynomial(self):
        circle = unit_circle(3)
        result = integrate_scalar(lambda x: q(4) + q(9) * (x - q(3)), circle)
        self.assertTrue(result.value.equals(q(4), M))
        self.assertEqual(result.schedule, (2, 3))
        self.assertTrue(all(v >= M for v in result.trace))

    def test_polynomials_stabilize_past_their_degree(self):
        for _ in range(10):
            degree = self.rng.randint(1, 5)
            coeffs = [q(self.rng.randint(-99, 99)) for _ in range(degree + 1)]
            schedule = SchedulePolicy(degree + 1, 2)
            circle = CircleSpec.around(q(1), Radius(5, 1))
            result = integrate_scalar(lambda x: horner(coeffs, x - q(1)), circle, schedule)
            self.assertGreater(result.schedule[0], degree)
            self.assertEqual(len(result.schedule), 2)
            self.assertTrue(result.value.equals(oracle_series_integral(coeffs), M))

    def test_cauchy_kernel(self):
        a = q(1)
        circle = CircleSpec.around(a, Radius(5, 1))
        inside = q(1 + 25)
        outside = q(2)
        kernel_in = integrate_scalar(lambda x: (x - a) / (x - inside), circle, LONG)
        kernel_out = integrate_scalar(lambda x: (x - a) / (x - outside), circle, LONG)
        self.assertTrue(kernel_in.value.equals(q(1), M))
        self.assertTrue(kernel_out.value.equals(TOWER.zero(), M))

    def test_cauchy_formula_for_polynomials(self):
        a = q(3)
        circle = CircleSpec.around(a, Radius(5, 1))
        for _ in range(200):
            coeffs = [q(self.rng.randint(-50, 50)) for _ in range(self.rng.randint(1, 6))]
            b = a + q(25 * self.rng.randint(-40, 40))
            c = a + q(self.rng.choice([1, 2, 4]))
            inside = integrate_scalar(lambda x: horner(coeffs, x) * (x - a) / (x - b), circle, LONG)
            outside = integrate_scalar(lambda x: horner(coeffs, x) * (x - a) / (x - c), circle, LONG)
            self.assertTrue(inside.value.equals(horner(coeffs, b), M))
            self.assertTrue(outside.value.equals(TOWER.zero(), M))

    def test_linearity(self):
        a = q(0)
        circle = CircleSpec.around(a, Radius(5, 1))
        f = lambda x: (x - q(1)).inverse()
        g = lambda x: x * x + q(3)
        alpha, beta = q(2, 3), q(-7)
        left = integrate_scalar(lambda x: alpha * f(x) + beta * g(x), circle, LONG).value
        right = alpha * integrate_scalar(f, circle, LONG).value + beta * integrate_scalar(g, circle, LONG).value
        self.assertTrue(left.equals(right, M))

    def test_independent_of_gamma(self):
        a = q(0)
        unit = TOWER.teichmuller(TOWER.field(1).residue.generator, 1)
        plain = CircleSpec.around(a, Radius(5, 1))
        turned = CircleSpec.around(a, Radius(5, 1), unit)
        f = lambda x: (x - q(1)).inverse() + x ** 3
        self.assertTrue(
            integrate_scalar(f, plain, LONG).value.equals(integrate_scalar(f, turned, LONG).value, M),
        )

    def test_oracle_on_expanded_series(self):
        a = q(0)
        cover = DiscCover((a,), Radius(5, 1), (a,))
        expanded = from_rational([3, 1], [-2, 1], cover)
        circle = CircleSpec.around(a, Radius(5, 1))
        result = integrate_scalar(expanded.eval, circle, LONG)
        self.assertTrue(result.value.equals(oracle_series_integral(expanded.pieces[0]), M))
        self.assertTrue(result.value.equals(q(3, -2), M))

    def test_oracle_trivial_series(self):
        self.assertEqual(oracle_series_integral([q(7)]), q(7))
        self.assertTrue(oracle_series_integral([TOWER.zero(), q(1)]).is_zero())

    def test_no_stabilization(self):
        circle = unit_circle()
        f = lambda x: x ** 2 + x ** 3 + x ** 4 + q(2) * x ** 6
        with self.assertRaises(NoStabilization) as caught:
            integrate_scalar(f, circle, SchedulePolicy(2, 4))
        self.assertEqual(caught.exception.extra['schedule'], [2, 3, 4, 6])
        self.assertEqual(len(caught.exception.extra['trace']), 3)


class IntegrateMatrixTests(SimpleTestCase):
    def matrix(self, entries):
        return PAdicMatrix.from_entries(entries, TOWER.base, TOWER.precision)

    def test_constant_matrix(self):
        constant = self.matrix([[1, 2], [3, 4]])
        result = integrate_matrix(lambda x: constant, unit_circle())
        self.assertTrue(result.value.equals(constant, M))

    def test_quadratic_entries_vanish(self):
        a = q(1)
        result = integrate_matrix(
            lambda x: PAdicMatrix.scalar((x - a) ** 2, 2), unit_circle(1), SchedulePolicy(3, 2),
        )
        self.assertTrue(result.value.equals(PAdicMatrix.zeros(2, TOWER.base), M))

    def test_isolated_eigenvalue_gives_idempotent(self):
        a = self.matrix([[0, 0], [0, 1]])
        circle = CircleSpec.around(q(0), Radius(5, 1))
        result = integrate_matrix(lambda x: resolvent(x, a) * x, circle, LONG)
        self.assertTrue(result.value.equals(self.matrix([[1, 0], [0, 0]]), M))
        entry = integrate_scalar(lambda x: resolvent(x, a)[0, 0] * x, circle, LONG)
        self.assertTrue(entry.value.equals(result.value[0, 0], M))
