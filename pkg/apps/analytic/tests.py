import random
from fractions import Fraction

from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from apps.analytic.functions import (
    LocallyAnalyticFn,
    check_Br,
    constant,
    fitted_cover,
    from_polynomial,
    from_rational,
    from_series,
    indicator,
)
from apps.analytic.series import PowerSeriesOnDisc
from apps.core.exceptions import (
    IncompatibleDomains,
    NotCoveringSigma,
    NotDisjoint,
    OutsideDomain,
    PoleInsideCover,
)
from apps.geometry.discs import Disc, DiscCover, Radius, build_cover
from apps.scalars.polynomials import horner
from apps.scalars.tower import get_tower

TOWER = get_tower(5, precision=24, degree_cap=8, guard_digits=4)
M = TOWER.working_digits


def q(value, b=1):
    return TOWER.from_rational(value, b)


def unit_disc_cover(center=0):
    return DiscCover((q(center),), Radius(5, 0), (q(center),))


class PowerSeriesTests(SimpleTestCase):
    def setUp(self):
        self.unit_disc = Disc(q(0), Radius(5, 0))

    # EVALUATION TESTS
    def test_constant_series(self):
        series = PowerSeriesOnDisc(self.unit_disc, [q(7)])
        for x in (0, 1, 4, 30):
            self.assertEqual(series.eval(q(x)), q(7))

    def test_identity_series(self):
        series = PowerSeriesOnDisc(self.unit_disc, [q(0), q(1)])
        self.assertEqual(series.eval(q(5)), q(5))

    def test_geometric_series(self):
        series = PowerSeriesOnDisc(self.unit_disc, [q(5**k) for k in range(40)], floor=24)
        self.assertLessEqual(series.truncation, 25)
        self.assertTrue(series.eval(q(1)).equals(q(1, 1 - 5), M))

    def test_outside_domain(self):
        series = PowerSeriesOnDisc(Disc(q(0), Radius(5, 1)), [q(1)])
        with self.assertRaises(OutsideDomain):
            series.eval(q(1))

    # NORM TESTS
    def test_sup_norm_of_constant(self):
        self.assertEqual(PowerSeriesOnDisc(self.unit_disc, [q(50)]).sup_norm(), Fraction(1, 25))

    def test_sup_norm_of_monomial(self):
        disc = Disc(q(3), Radius(5, 2))
        series = PowerSeriesOnDisc(disc, [q(0), q(0), q(0), q(1)])
        self.assertEqual(series.sup_norm(), Fraction(1, 5**6))

    def test_sup_norm_attained_on_roots_of_unity(self):
        series = PowerSeriesOnDisc(self.unit_disc, [q(1), q(5)])
        self.assertEqual(series.sup_norm(), 1)
        values = [series.eval(xi).norm() for xi in TOWER.roots_of_unity(6)]
        self.assertEqual(max(values), 1)

    @settings(max_examples=40, deadline=None)
    @given(
        st.lists(st.integers(min_value=-400, max_value=400), min_size=1, max_size=5),
        st.integers(min_value=-20, max_value=20),
        st.integers(min_value=0, max_value=2),
    )
    def test_maximum_modulus_on_circle(self, coeffs, a, m):
        disc = Disc(q(a), Radius(5, m))
        series = PowerSeriesOnDisc(disc, [q(c) for c in coeffs])
        gamma = TOWER.uniformizer_power(m)
        values = [series.eval(q(a) + xi * gamma).norm() for xi in TOWER.roots_of_unity(6)]
        self.assertEqual(max(values), series.sup_norm())

    @settings(max_examples=40, deadline=None)
    @given(
        st.lists(st.integers(min_value=-400, max_value=400), min_size=1, max_size=6),
        st.integers(min_value=-10**4, max_value=10**4),
    )
    def test_values_bounded_by_sup_norm(self, coeffs, t):
        disc = Disc(q(2), Radius(5, 1))
        series = PowerSeriesOnDisc(disc, [q(c) for c in coeffs])
        self.assertLessEqual(series.eval(q(2 + 5 * t)).norm(), series.sup_norm())

    # EXPANSION TESTS
    def test_taylor_coefficient(self):
        cube = PowerSeriesOnDisc(self.unit_disc, [q(0), q(0), q(0), q(1)])
        self.assertTrue(cube.taylor_coefficient(q(2), 1).equals(q(12), M))
        self.assertTrue(cube.taylor_coefficient(q(2), 3).equals(q(1), M))

    def test_recenter_keeps_values(self):
        series = PowerSeriesOnDisc(self.unit_disc, [q(1), q(2), q(-3), q(4)])
        moved = series.recenter(q(7), Radius(5, 1))
        for t in range(-5, 6):
            x = q(7 + 5 * t)
            self.assertTrue(moved.eval(x).equals(series.eval(x), M))


class ConstructorTests(SimpleTestCase):
    def setUp(self):
        self.pair = build_cover([q(0), q(5)], Radius(5, 0))
        self.rng = random.Random(11)

    def sample_points(self, cover, count=20):
        r = cover.radius.exponent
        return [center + q(self.rng.randint(-10**5, 10**5) * 5**(r + 1)) for center in cover.centers for _ in range(count)]

    # POLYNOMIAL TESTS
    def test_constant_polynomial(self):
        f = from_polynomial([1], self.pair)
        for piece in f.pieces:
            self.assertEqual(piece.coeffs, (q(1),))

    def test_identity_on_two_discs(self):
        f = from_polynomial([0, 1], self.pair)
        self.assertEqual(self.pair.radius, Radius(5, 2))
        for piece in f.pieces:
            self.assertEqual(len(piece.coeffs), 2)
            self.assertEqual(piece.coeffs[0], piece.center)
            self.assertTrue(piece.coeffs[1].equals(q(1), M))

    def test_square_matches_direct_evaluation(self):
        f = from_polynomial([0, 0, 1], self.pair)
        for x in self.sample_points(self.pair):
            self.assertTrue(f.eval(x).equals(x * x, M))

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.integers(min_value=-10**3, max_value=10**3), min_size=1, max_size=9))
    def test_taylor_shift_is_exact(self, coeffs):
        f = from_polynomial(coeffs, self.pair)
        direct = [q(c) for c in coeffs]
        for x in self.sample_points(self.pair, 5):
            self.assertTrue(f.eval(x).equals(horner(direct, x), TOWER.precision))

    # RATIONAL TESTS
    def test_simple_pole_outside_disc(self):
        cover = build_cover([q(0)], Radius(5, 0))
        b = q(2)
        f = from_rational([1], [-2, 1], cover)
        self.assertEqual(cover.radius, Radius(5, 1))
        for x in self.sample_points(cover, 10):
            self.assertTrue(f.eval(x).equals(1 / (x - b), M))
        self.assertTrue(f.pieces[0].krasner_certificate())

    def test_unit_denominator_is_a_polynomial(self):
        f = from_rational([1, 2, 3], [1], self.pair)
        g = from_polynomial([1, 2, 3], self.pair)
        for a, b in zip(f.pieces, g.pieces):
            self.assertEqual(a.coeffs, b.coeffs)

    def test_pole_inside_cover(self):
        cover = build_cover([q(0)], Radius(5, 0))
        with self.assertRaises(PoleInsideCover):
            from_rational([1], [-5, 1], cover)
        with self.assertRaises(PoleInsideCover):
            from_rational([1], [-7, 1], cover, poles=[q(25)])

    def test_rational_with_pole_near_second_disc(self):
        f = from_rational([1, 1], [-1, 0, 1], self.pair)
        for x in self.sample_points(self.pair, 10):
            self.assertTrue(f.eval(x).equals((x + 1) / (x * x - 1), M))

    # INDICATOR TESTS
    def test_indicator_selections(self):
        everything = indicator(self.pair, [0, 1])
        nothing = indicator(self.pair, [])
        first = indicator(self.pair, [0])
        for x in self.sample_points(self.pair, 5):
            self.assertEqual(everything.eval(x), q(1))
            self.assertTrue(nothing.eval(x).is_zero())
        for x in self.sample_points(self.pair, 5):
            expected = 1 if self.pair.disc(0).contains(x) else 0
            self.assertEqual(first.eval(x), q(expected) if expected else TOWER.zero())

    def test_indicator_rejects_unknown_disc(self):
        with self.assertRaises(IncompatibleDomains):
            indicator(self.pair, [2])

    def test_series_per_disc(self):
        f = from_series(self.pair, [[1, 1], [2]])
        self.assertTrue(f.eval(q(25)).equals(q(26), M))
        self.assertEqual(f.eval(q(5 + 25)), q(2))


class AlgebraTests(SimpleTestCase):
    def setUp(self):
        self.pair = build_cover([q(0), q(5)], Radius(5, 0))
        self.rng = random.Random(23)

    def sample_points(self, count=10):
        return [c + q(self.rng.randint(-10**4, 10**4) * 125) for c in self.pair.centers for _ in range(count)]

    def test_neutral_elements(self):
        f = from_polynomial([3, -1, 2], self.pair)
        zero_fn = constant(self.pair, 0)
        one_fn = constant(self.pair, 1)
        for x in self.sample_points():
            self.assertTrue((f + zero_fn).eval(x).equals(f.eval(x), M))
            self.assertTrue((f * one_fn).eval(x).equals(f.eval(x), M))

    def test_indicator_products(self):
        product = indicator(self.pair, [0]) * indicator(self.pair, [0, 1])
        expected = indicator(self.pair, [0])
        for x in self.sample_points():
            self.assertEqual(product.eval(x), expected.eval(x))
        disjoint = indicator(self.pair, [0]) * indicator(self.pair, [1])
        for x in self.sample_points():
            self.assertTrue(disjoint.eval(x).is_zero())

    def test_square_by_product(self):
        x_fn = from_polynomial([0, 1], self.pair)
        squared = from_polynomial([0, 0, 1], self.pair)
        for x in self.sample_points(20):
            self.assertTrue((x_fn * x_fn).eval(x).equals(squared.eval(x), M))

    def test_homomorphism_on_random_points(self):
        f = from_rational([1], [-2, 1], self.pair)
        g = from_polynomial([4, 0, -1, 3], self.pair)
        for x in self.sample_points(50):
            self.assertTrue((f + g).eval(x).equals(f.eval(x) + g.eval(x), M))
            self.assertTrue((f * g).eval(x).equals(f.eval(x) * g.eval(x), M))

    def test_coarse_function_aligns_to_finer_discs(self):
        coarse = from_polynomial([1, 1], unit_disc_cover())
        fine = indicator(self.pair, [1])
        product = coarse * fine
        self.assertEqual(product.radius, Radius(5, 2))
        self.assertTrue(product.eval(q(5)).equals(q(6), M))
        self.assertTrue(product.eval(q(0)).is_zero())

    def test_incompatible_domains(self):
        far = build_cover([q(1), q(2)], Radius(5, 0))
        with self.assertRaises(IncompatibleDomains):
            from_polynomial([1], self.pair) + from_polynomial([1], far)

    def test_overlapping_pieces_rejected(self):
        disc = Disc(q(0), Radius(5, 1))
        same = Disc(q(5), Radius(5, 1))
        with self.assertRaises(NotDisjoint):
            LocallyAnalyticFn([PowerSeriesOnDisc(disc, [q(1)]), PowerSeriesOnDisc(same, [q(1)])])


class MembershipTests(SimpleTestCase):
    def test_single_disc_covering_set(self):
        f = from_polynomial([0, 1], unit_disc_cover())
        self.assertEqual(check_Br(f, [q(0), q(5), q(10)]), Radius(5, 0))

    def test_refinement_keeps_pieces_meeting_set(self):
        pair = build_cover([q(0), q(5)], Radius(5, 0))
        f = indicator(pair, [0])
        self.assertEqual(check_Br(f, [q(125)]), Radius(5, 2))
        cover, kept = fitted_cover(f, [q(125)])
        self.assertEqual(kept, [0])
        self.assertEqual(cover.centers, (q(125),))

    def test_missing_point(self):
        pair = build_cover([q(0), q(5)], Radius(5, 0))
        f = indicator(pair, [0, 1])
        with self.assertRaises(NotCoveringSigma):
            check_Br(f, [q(0), q(1)])

    def test_restrict_to_finer_cover(self):
        f = from_polynomial([1, -2, 0, 1], unit_disc_cover())
        pair = build_cover([q(0), q(5)], Radius(5, 0))
        finer = f.restrict(pair)
        self.assertEqual(finer.radius, Radius(5, 2))
        for x in (q(0), q(25), q(5), q(5 + 125)):
            self.assertTrue(finer.eval(x).equals(f.eval(x), M))

    def test_restrict_needs_containing_piece(self):
        f = indicator(build_cover([q(0), q(5)], Radius(5, 0)), [0])
        with self.assertRaises(IncompatibleDomains):
            f.restrict(unit_disc_cover())
