import random
from fractions import Fraction

from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p

from apps.core.exceptions import (
    DegreeCapExceeded,
    DivisionByZero,
    EigenvalueOutsideTower,
    FieldMismatch,
    NotCoprime,
    NotSimpleRoot,
    PrecisionExhausted,
)
from apps.core.strategies import SMALL_PRIMES, primes, rationals, scalars
from apps.scalars.fields import compatible_modulus, residue_field
from apps.scalars.numbers import INF, from_digits, parse_scalar, rational_reconstruction
from apps.scalars.polynomials import horner, newton_polygon, taylor_shift
from apps.scalars.tower import get_tower


class FromRationalTests(SimpleTestCase):
    def setUp(self):
        self.tower = get_tower(5, precision=24, degree_cap=8, guard_digits=4)

    def test_valuation_and_norm(self):
        x = self.tower.from_rational(75, 2)
        self.assertEqual(x.valuation, 2)
        self.assertEqual(x.norm(), Fraction(1, 25))

    def test_zero_is_exact(self):
        x = self.tower.from_rational(0, 1)
        self.assertTrue(x.is_zero())
        self.assertEqual(x.valuation, INF)
        self.assertEqual(x.norm(), 0)

    def test_negative_valuation(self):
        x = self.tower.from_rational(1, 5)
        self.assertEqual(x.valuation, -1)
        self.assertEqual(x.norm(), 5)

    def test_unit_matches_integer_arithmetic(self):
        x = self.tower.from_rational(7, 3)
        modulus = 5**24
        self.assertEqual((x.unit * 3) % modulus, 7)

    def test_division_by_zero(self):
        with self.assertRaises(DivisionByZero):
            self.tower.from_rational(1, 0)
        with self.assertRaises(DivisionByZero):
            self.tower.one() / self.tower.zero()

    @settings(max_examples=60, deadline=None)
    @given(st.integers(min_value=-1000, max_value=1000), st.integers(min_value=1, max_value=1000), primes)
    def test_rational_reconstruction_round_trip(self, a, b, p):
        tower = get_tower(p, precision=24, degree_cap=8, guard_digits=4)
        self.assertEqual(rational_reconstruction(tower.from_rational(a, b)), Fraction(a, b))


class ArithmeticTests(SimpleTestCase):
    def setUp(self):
        self.tower = get_tower(5, precision=24, degree_cap=8, guard_digits=4)

    # DOMINANT TERM TESTS
    def test_dominant_term(self):
        total = self.tower.from_rational(1) + self.tower.from_rational(5)
        self.assertEqual(total.norm(), 1)

    def test_additive_inverse_is_zero(self):
        total = self.tower.from_rational(1) + self.tower.from_rational(-1)
        self.assertTrue(total.is_zero())
        self.assertEqual(total, self.tower.zero())

    def test_cancellation_keeps_the_absolute_bound(self):
        field = self.tower.base
        x = from_digits(field, 0, (7,), 3)
        y = from_digits(field, 0, (7 + 5**10,), 3)
        difference = x - y
        self.assertTrue(difference.is_zero())
        self.assertEqual(difference.absolute_precision, 3)
        with self.assertRaises(PrecisionExhausted):
            difference.inverse()
        with self.assertRaises(PrecisionExhausted):
            self.tower.one() / difference
        self.assertEqual((self.tower.from_rational(1, 5) + difference).absolute_precision, 3)
        self.assertEqual((difference * self.tower.from_rational(25)).absolute_precision, 5)

    def test_cancellation_drops_precision(self):
        tower = get_tower(3, precision=24, degree_cap=8, guard_digits=4)
        total = tower.from_rational(1) + tower.from_rational(2)
        self.assertEqual(total.valuation, 1)
        self.assertEqual(total.precision, 23)
        self.assertEqual(total.unit, 1)

    # AXIOM TESTS
    def assertAxioms(self, x, y, z):
        self.assertEqual((x * y).norm(), x.norm() * y.norm())
        self.assertLessEqual((x + y).norm(), max(x.norm(), y.norm()))
        if x.norm() != y.norm():
            self.assertEqual((x + y).norm(), max(x.norm(), y.norm()))
        self.assertTrue(((x + y) * z).equals(x * z + y * z))

    @settings(max_examples=1000, deadline=None)
    @given(primes, rationals(), rationals(), rationals())
    def test_ultrametric_axioms(self, p, a, b, c):
        tower = get_tower(p, precision=24, degree_cap=8, guard_digits=4)
        self.assertAxioms(*(tower.from_rational(v.numerator, v.denominator) for v in (a, b, c)))

    def test_axioms_on_ten_thousand_triples_per_prime(self):
        for p in SMALL_PRIMES:
            tower = get_tower(p, precision=24, degree_cap=8, guard_digits=4)
            rng = random.Random(p)
            for _ in range(10_000):
                values = [
                    Fraction(rng.randint(-10**4, 10**4), rng.randint(1, 10**4)) * Fraction(p) ** rng.randint(-4, 4)
                    for _ in range(3)
                ]
                self.assertAxioms(*(tower.from_rational(v.numerator, v.denominator) for v in values))

    @settings(max_examples=100, deadline=None)
    @given(primes, st.integers(min_value=-10**6, max_value=10**6), st.integers(min_value=-10**6, max_value=10**6))
    def test_integer_oracle(self, p, a, b):
        tower = get_tower(p, precision=24, degree_cap=8, guard_digits=4)
        x, y = tower.from_rational(a), tower.from_rational(b)
        self.assertTrue((x + y).equals(tower.from_rational(a + b), 24))
        self.assertTrue((x * y).equals(tower.from_rational(a * b), 24))
        if b:
            self.assertTrue((x / y * y).equals(x))

    @settings(max_examples=50, deadline=None)
    @given(st.data())
    def test_ultrametric_in_extension(self, data):
        tower = get_tower(5, precision=24, degree_cap=8, guard_digits=4)
        x = data.draw(scalars(tower, degree=2, bound=100))
        y = data.draw(scalars(tower, degree=2, bound=100, nonzero=True))
        self.assertLessEqual((x + y).norm(), max(x.norm(), y.norm()))
        self.assertTrue((x / y * y).equals(x, 12))

    def test_extension_arithmetic(self):
        tower = get_tower(3, precision=24, degree_cap=8, guard_digits=4)
        w = tower.parse([0, 1], 2)
        inverse = w.inverse()
        self.assertTrue((w * inverse).equals(tower.one(2), 24))
        self.assertEqual(w.norm(), 1)


class RenderingTests(SimpleTestCase):
    def setUp(self):
        self.tower = get_tower(5, precision=6, degree_cap=8, guard_digits=2)

    def test_render_format(self):
        x = self.tower.from_rational(50)
        self.assertEqual(x.render(), '5^2 * (2 + 0*5 + 0*5^2 + 0*5^3 + 0*5^4 + 0*5^5) + O(5^8)')

    def test_parse_round_trip(self):
        for value in (Fraction(1, 3), Fraction(-7), Fraction(125, 4)):
            x = self.tower.from_rational(value.numerator, value.denominator)
            self.assertEqual(parse_scalar(x.render(), self.tower.base, 6), x)

    def test_parse_rational_strings(self):
        self.assertEqual(self.tower.parse('3/25').valuation, -2)
        self.assertTrue(self.tower.parse('0').is_zero())

    def test_extension_renders_coordinates(self):
        w = self.tower.parse([1, 5], 2)
        self.assertEqual(len(w.render()), 2)
        self.assertTrue(self.tower.parse(w.render(), 2).equals(w, 6))


class FieldTowerTests(SimpleTestCase):
    # MODULUS TESTS
    def test_compatible_modulus_is_irreducible(self):
        for p, f in [(2, 1), (2, 2), (2, 4), (3, 2), (5, 2), (7, 3)]:
            modulus = compatible_modulus(p, f)
            self.assertEqual(len(modulus) - 1, f)
            self.assertTrue(gf_irreducible_p(list(modulus), p, ZZ))

    def test_small_moduli(self):
        self.assertEqual(compatible_modulus(2, 1), (1, 1))
        self.assertEqual(compatible_modulus(2, 2), (1, 1, 1))

    def test_frobenius(self):
        field = residue_field(3, 2)
        for a in field.elements():
            self.assertEqual(field.pow(a, 9), a)
            self.assertEqual(field.frobenius(field.frobenius(a)), a)
        self.assertNotEqual(field.frobenius(field.generator), field.generator)

    # EMBEDDING TESTS
    def test_embed_then_project_is_identity(self):
        tower = get_tower(3, precision=24, degree_cap=8, guard_digits=4)
        x = tower.parse([2, '1/4'], 2)
        lifted = x.embed(tower.field(4))
        self.assertEqual(lifted.project(tower.field(2)), x)

    def test_embeddings_compose(self):
        tower = get_tower(2, precision=16, degree_cap=8, guard_digits=4)
        x = tower.parse([1, 3], 2)
        through = x.embed(tower.field(4)).embed(tower.field(8))
        self.assertEqual(through, x.embed(tower.field(8)))

    def test_embedding_is_a_ring_map(self):
        tower = get_tower(5, precision=24, degree_cap=8, guard_digits=4)
        x = tower.parse([1, 2], 2)
        y = tower.parse([3, '1/7'], 2)
        big = tower.field(4)
        self.assertTrue((x * y).embed(big).equals(x.embed(big) * y.embed(big), 24))

    def test_project_outside_image(self):
        tower = get_tower(3, precision=24, degree_cap=8, guard_digits=4)
        w = tower.parse([0, 1], 2)
        with self.assertRaises(FieldMismatch):
            w.project(tower.base)

    def test_degree_cap(self):
        tower = get_tower(3, precision=24, degree_cap=1, guard_digits=4)
        with self.assertRaises(DegreeCapExceeded):
            tower.field(2)


class TeichmullerTests(SimpleTestCase):
    def test_lift_of_one(self):
        tower = get_tower(5, precision=24, degree_cap=8, guard_digits=4)
        self.assertEqual(tower.teichmuller((1,), 1), tower.one())

    def test_lift_of_two(self):
        tower = get_tower(5, precision=24, degree_cap=8, guard_digits=4)
        x = tower.teichmuller((2,), 1)
        self.assertGreaterEqual((x**4 - 1).valuation, 24)
        self.assertGreaterEqual((x - 2).valuation, 1)

    def test_cube_root_of_unity_over_q4(self):
        tower = get_tower(2, precision=24, degree_cap=8, guard_digits=4)
        x = tower.teichmuller(residue_field(2, 2).generator, 2)
        self.assertGreaterEqual((x * x + x + 1).valuation, 24)
        self.assertFalse(x.equals(tower.one(2), 1))

    def test_full_sweep_of_small_fields(self):
        for p in (2, 3, 5, 7):
            tower = get_tower(p, precision=24, degree_cap=8, guard_digits=4)
            for f in (1, 2, 3):
                field = residue_field(p, f)
                for c in list(field.elements())[1:]:
                    x = tower.teichmuller(c, f)
                    self.assertGreaterEqual((x ** (field.order - 1) - 1).valuation, 24)
                    self.assertEqual(x.residue(), c)


class RootsOfUnityTests(SimpleTestCase):
    def test_trivial_group(self):
        tower = get_tower(5, precision=24, degree_cap=8, guard_digits=4)
        self.assertEqual(tower.roots_of_unity(1), [tower.one()])

    def test_fourth_roots_in_q5(self):
        tower = get_tower(5, precision=24, degree_cap=8, guard_digits=4)
        roots = tower.roots_of_unity(4)
        self.assertEqual(roots[0].degree, 1)
        self.assertEqual(sorted(r.unit % 5 for r in roots), [1, 2, 3, 4])
        for r in roots:
            self.assertGreaterEqual((r**4 - 1).valuation, 24)

    def test_cube_roots_in_q4(self):
        tower = get_tower(2, precision=24, degree_cap=8, guard_digits=4)
        roots = tower.roots_of_unity(3)
        self.assertEqual(roots[0].degree, 2)
        for r in roots[1:]:
            self.assertGreaterEqual((r * r + r + 1).valuation, 24)

    def test_pairwise_unit_distances(self):
        tower = get_tower(3, precision=24, degree_cap=8, guard_digits=4)
        roots = tower.roots_of_unity(8)
        for i, a in enumerate(roots):
            for b in roots[i + 1:]:
                self.assertEqual((a - b).norm(), 1)

    def test_character_orthogonality(self):
        for p, n in [(5, 4), (3, 4), (2, 3), (5, 6)]:
            tower = get_tower(p, precision=24, degree_cap=8, guard_digits=4)
            roots = tower.roots_of_unity(n)
            for k in range(3 * n + 1):
                average = sum((r**k for r in roots[1:]), roots[0]**k) / n
                expected = 1 if k % n == 0 else 0
                self.assertTrue(average.equals(tower.from_rational(expected, 1, roots[0].degree), 24))

    def test_not_coprime(self):
        tower = get_tower(5, precision=24, degree_cap=8, guard_digits=4)
        with self.assertRaises(NotCoprime):
            tower.roots_of_unity(10)

    def test_cap_exceeded(self):
        tower = get_tower(2, precision=24, degree_cap=1, guard_digits=4)
        with self.assertRaises(DegreeCapExceeded):
            tower.roots_of_unity(3)


class HenselTests(SimpleTestCase):
    def test_square_root_of_one(self):
        tower = get_tower(3, precision=24, degree_cap=8, guard_digits=4)
        self.assertTrue(tower.hensel_root([-1, 0, 1], (1,)).equals(tower.one(), 24))

    def test_square_root_of_minus_one_in_q5(self):
        tower = get_tower(5, precision=24, degree_cap=8, guard_digits=4)
        x = tower.hensel_root([1, 0, 1], (2,))
        self.assertGreaterEqual((x * x + 1).valuation, 24)

    def test_no_residue_root(self):
        tower = get_tower(3, precision=24, degree_cap=8, guard_digits=4)
        with self.assertRaises(NotSimpleRoot):
            tower.hensel_root([1, 0, 1], (1,))


class PolynomialTests(SimpleTestCase):
    def setUp(self):
        self.tower = get_tower(5, precision=24, degree_cap=8, guard_digits=4)

    def scalars(self, values, degree=1):
        return [self.tower.from_rational(v, 1, degree) for v in values]

    def test_newton_polygon_merges_collinear_points(self):
        self.assertEqual(newton_polygon(self.scalars([25, 5, 1])), [(Fraction(-1), 2)])

    def test_newton_polygon_slopes(self):
        segments = newton_polygon(self.scalars([5, 0, 1]))
        self.assertEqual(segments, [(Fraction(-1, 2), 2)])

    def test_taylor_shift_is_exact(self):
        coeffs = self.scalars([3, -2, 0, 7, 1])
        a = self.tower.from_rational(4, 3)
        shifted = taylor_shift(coeffs, a)
        for t in (0, 1, 5, 13):
            y = self.tower.from_rational(t)
            self.assertTrue(horner(shifted, y).equals(horner(coeffs, a + y), 24))

    # ROOT ISOLATION TESTS
    def test_distinct_rational_roots(self):
        roots = self.tower.polynomial_roots(self.scalars([-6, 11, -6, 1]))
        self.assertEqual(sorted(r.unit for r, _ in roots), [1, 2, 3])
        self.assertEqual([m for _, m in roots], [1, 1, 1])

    def test_double_root(self):
        roots = self.tower.polynomial_roots(self.scalars([1, -2, 1]))
        self.assertEqual(len(roots), 1)
        root, multiplicity = roots[0]
        self.assertEqual(multiplicity, 2)
        self.assertTrue(root.equals(self.tower.one(), 24))

    def test_close_roots_are_separated(self):
        # (x - 1)(x - 1 - 5^3)
        coeffs = self.scalars([126, -127, 1])
        roots = self.tower.polynomial_roots(coeffs)
        self.assertEqual(len(roots), 2)
        values = sorted(r.unit for r, _ in roots)
        self.assertEqual(values, [1, 126])

    def test_roots_of_different_valuation(self):
        # (x - 5)(x - 1/5)
        coeffs = [self.tower.from_rational(1), self.tower.from_rational(-26, 5), self.tower.one()]
        roots = self.tower.polynomial_roots(coeffs)
        self.assertEqual(sorted(r.valuation for r, _ in roots), [-1, 1])

    def test_ramified_root(self):
        with self.assertRaises(EigenvalueOutsideTower) as caught:
            self.tower.polynomial_roots(self.scalars([-5, 0, 1]))
        self.assertTrue(caught.exception.extra['ramified'])

    def test_root_outside_field(self):
        tower = get_tower(3, precision=24, degree_cap=8, guard_digits=4)
        coeffs = [tower.from_rational(v) for v in (1, 0, 1)]
        with self.assertRaises(EigenvalueOutsideTower) as caught:
            tower.polynomial_roots(coeffs, 1)
        self.assertFalse(caught.exception.extra['ramified'])
        roots = tower.polynomial_roots(coeffs, 2)
        self.assertEqual(len(roots), 2)
        for root, _ in roots:
            self.assertGreaterEqual((root * root + 1).valuation, 24)
