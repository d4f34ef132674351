import random
from fractions import Fraction

from django.test import SimpleTestCase
from hypothesis import assume, given, settings, strategies as st

from apps.core.exceptions import EmptySet, NotCovering, NotDisjoint, RadiusUnrealizable
from apps.geometry.discs import (
    CLOSED,
    OPEN,
    Disc,
    Radius,
    build_cover,
    dist_to_set,
    intersect_covers,
    refine_cover,
)
from apps.scalars.tower import get_tower

TOWER = get_tower(5, precision=24, degree_cap=8, guard_digits=4)


def q(value):
    return TOWER.from_rational(value)


point_sets = st.lists(
    st.tuples(st.integers(min_value=0, max_value=4), st.integers(min_value=1, max_value=60)),
    min_size=1,
    max_size=12,
).map(lambda pairs: [q(5**k * u) for k, u in pairs])


class RadiusTests(SimpleTestCase):
    def test_ordering_follows_value(self):
        self.assertLess(Radius(5, 2), Radius(5, 1))
        self.assertLess(Radius.zero(5), Radius(5, 40))
        self.assertEqual(Radius(5, -1).value, 5)

    def test_from_norm(self):
        self.assertEqual(Radius.from_norm(5, Fraction(1, 25)), Radius(5, 2))
        self.assertTrue(Radius.from_norm(5, 0).is_zero())
        with self.assertRaises(RadiusUnrealizable):
            Radius.from_norm(5, Fraction(1, 2))


class DiscTests(SimpleTestCase):
    # MEMBERSHIP TESTS
    def test_closed_and_open_membership(self):
        closed = Disc(q(0), Radius(5, 1), CLOSED)
        opened = Disc(q(0), Radius(5, 1), OPEN)
        self.assertTrue(closed.contains(q(5)))
        self.assertFalse(opened.contains(q(5)))
        self.assertTrue(opened.contains(q(25)))
        self.assertFalse(closed.contains(q(1)))

    @settings(max_examples=40, deadline=None)
    @given(
        st.integers(min_value=-50, max_value=50),
        st.integers(min_value=0, max_value=3),
        st.integers(min_value=-50, max_value=50),
        st.sampled_from([CLOSED, OPEN]),
        st.randoms(use_true_random=False),
    )
    def test_any_point_is_center(self, c, m, t, kind, rng):
        disc = Disc(q(c), Radius(5, m), kind)
        step = m if kind == CLOSED else m + 1
        member = q(c + 5**step * t)
        recentered = disc.recenter(member)
        self.assertTrue(disc.same_set(recentered))
        for _ in range(100):
            point = q(c + rng.randint(-10**4, 10**4) * 5**rng.randint(0, 5))
            self.assertEqual(disc.contains(point), recentered.contains(point))

    @settings(max_examples=100, deadline=None)
    @given(
        st.integers(min_value=-200, max_value=200),
        st.integers(min_value=-200, max_value=200),
        st.integers(min_value=-1, max_value=3),
        st.integers(min_value=-1, max_value=3),
    )
    def test_nesting_dichotomy(self, a, b, m, n):
        first, second = Disc(q(a), Radius(5, m)), Disc(q(b), Radius(5, n))
        outcomes = [
            first.same_set(second),
            first.contains_disc(second) and not second.contains_disc(first),
            second.contains_disc(first) and not first.contains_disc(second),
            not first.meets(second),
        ]
        self.assertEqual(sum(outcomes), 1)


class DistanceTests(SimpleTestCase):
    def test_member_has_zero_distance(self):
        self.assertEqual(dist_to_set(q(5), [q(0), q(5)]), 0)

    def test_nearest_point_wins(self):
        self.assertEqual(dist_to_set(q(25), [q(0), q(5)]), Fraction(1, 25))

    def test_unit_distance(self):
        self.assertEqual(dist_to_set(q(1), [q(0)]), 1)

    def test_empty_set(self):
        with self.assertRaises(EmptySet):
            dist_to_set(q(1), [])


class BuildCoverTests(SimpleTestCase):
    def test_single_point(self):
        cover = build_cover([q(0)], Radius(5, 0))
        self.assertEqual(cover.centers, (q(0),))
        self.assertLess(cover.radius, Radius(5, 0))

    def test_two_close_points(self):
        cover = build_cover([q(0), q(5)], Radius(5, 0))
        self.assertEqual(cover.radius, Radius(5, 2))
        self.assertEqual(cover.centers, (q(0), q(5)))

    def test_three_points(self):
        cover = build_cover([q(0), q(1), q(5)], Radius(5, 1))
        self.assertEqual(cover.radius, Radius(5, 2))
        self.assertEqual(len(cover.centers), 3)

    def test_cluster_shares_a_disc(self):
        cover = build_cover([q(0), q(125), q(1)], Radius(5, 0))
        self.assertEqual(cover.radius, Radius(5, 1))
        self.assertEqual(cover.centers, (q(0), q(1)))
        self.assertEqual(cover.members(0), [q(0), q(125)])

    def test_empty_set(self):
        with self.assertRaises(EmptySet):
            build_cover([], Radius(5, 0))

    @settings(max_examples=500, deadline=None)
    @given(point_sets, st.integers(min_value=-1, max_value=3))
    def test_cover_conclusions(self, sigma, s_exponent):
        s = Radius(5, s_exponent)
        cover = build_cover(sigma, s)
        self.assertLess(cover.radius, s)
        for center in cover.centers:
            self.assertIn(center, sigma)
        m = cover.radius.exponent
        for i, a in enumerate(cover.centers):
            for b in cover.centers[i + 1:]:
                self.assertGreater((a - b).norm(), cover.radius.value)
        for x in sigma:
            self.assertIsNotNone(cover.index_of(x, OPEN))
            around = Disc(x, cover.radius)
            self.assertTrue(any(around.same_set(d) for d in cover.discs()))
        for d in cover.discs():
            self.assertTrue(any(d.contains(x) for x in sigma))
        self.assertGreater(m, s_exponent)


class RefineCoverTests(SimpleTestCase):
    def test_build_cover_output_is_kept(self):
        sigma = [q(0), q(5), q(1)]
        cover = build_cover(sigma, Radius(5, 0))
        refined, kept = refine_cover(sigma, list(cover.centers), cover.radius)
        self.assertEqual(kept, [0, 1, 2])
        for old, new in zip(cover.discs(), refined.discs()):
            self.assertTrue(old.same_set(new))

    def test_disc_missing_the_set_is_dropped(self):
        refined, kept = refine_cover([q(0)], [q(0), q(1)], Radius(5, 1))
        self.assertEqual(kept, [0])
        self.assertEqual(refined.centers, (q(0),))

    def test_recentering_on_the_set(self):
        refined, kept = refine_cover([q(0), q(5)], [q(125), q(5)], Radius(5, 2))
        self.assertEqual(kept, [0, 1])
        self.assertEqual(refined.centers, (q(0), q(5)))
        self.assertTrue(Disc(q(125), Radius(5, 2)).same_set(refined.disc(0)))

    def test_boundary_point_is_not_covered(self):
        with self.assertRaises(NotCovering):
            refine_cover([q(0), q(5)], [q(25), q(5)], Radius(5, 2))

    def test_overlapping_candidates(self):
        with self.assertRaises(NotDisjoint):
            refine_cover([q(0)], [q(0), q(125)], Radius(5, 2))

    def test_set_equalities_on_sample_points(self):
        rng = random.Random(7)
        sigma = [q(0), q(5), q(3)]
        candidates = [q(125), q(5 + 125), q(3), q(2)]
        radius = Radius(5, 2)
        refined, kept = refine_cover(sigma, candidates, radius)
        self.assertEqual(kept, [0, 1, 2])
        for _ in range(100):
            point = q(rng.choice([0, 5, 3, 2]) + rng.randint(-500, 500) * 5**rng.randint(0, 3))
            distance = dist_to_set(point, sigma)
            in_open = any(Disc(candidates[i], radius, OPEN).contains(point) for i in kept)
            in_closed = any(Disc(candidates[i], radius, CLOSED).contains(point) for i in kept)
            self.assertEqual(distance < radius.value, in_open)
            self.assertEqual(distance <= radius.value, in_closed)


class IntersectCoversTests(SimpleTestCase):
    def test_identical_covers(self):
        cover = build_cover([q(0), q(1)], Radius(5, 0))
        self.assertEqual(intersect_covers(cover, cover), [(0, 0), (1, 1)])

    def test_small_discs_inside_one_large_disc(self):
        small = build_cover([q(0), q(5)], Radius(5, 0))
        large = build_cover([q(0)], Radius(5, -1))
        self.assertEqual(intersect_covers(small, large), [(0, 0), (1, 0)])

    def test_no_overlap(self):
        small = build_cover([q(0)], Radius(5, 1))
        large = build_cover([q(1)], Radius(5, 1))
        self.assertEqual(intersect_covers(small, large), [])

    @settings(max_examples=500, deadline=None)
    @given(point_sets, point_sets)
    def test_small_disc_never_meets_two_large_discs(self, first, second):
        small = build_cover(first, Radius(5, 2))
        large = build_cover(second, Radius(5, 1))
        assume(large.radius >= small.radius)
        for disc in small.discs():
            hits = [big for big in large.discs() if big.meets(disc)]
            self.assertLessEqual(len(hits), 1)
