import random
from fractions import Fraction

from django.test import SimpleTestCase
from sympy import Matrix, Symbol

from apps.core.exceptions import (
    EigenvalueOutsideTower,
    OnSpectrum,
    SingularToPrecision,
    SpectrumUnverified,
    UserSpectrumMismatch,
)
from apps.linalg.charpoly import char_poly
from apps.linalg.decomposition import spectral_decomposition
from apps.linalg.matrices import PAdicMatrix, mat_add, mat_inverse, mat_mul, mat_norm, mat_scale
from apps.linalg.spectrum import Spectrum, partial_fraction_resolvent, resolvent, spectrum
from apps.scalars.polynomials import horner
from apps.scalars.tower import get_tower

TOWER = get_tower(5, precision=24, degree_cap=8, guard_digits=4)
M = TOWER.working_digits


def q(value, b=1):
    return TOWER.from_rational(value, b)


def matrix(entries, tower=TOWER):
    return PAdicMatrix.from_entries(entries, tower.base, tower.precision)


def unimodular(rng, size, p=5, bound=4):
    while True:
        s = Matrix(size, size, lambda i, j: rng.randint(-bound, bound))
        if s.det() % p:
            return s


def conjugated(diagonal_block, rng, p=5):
    """S T S^-1 with exact rational entries, S invertible over Z_p."""
    t = Matrix(diagonal_block)
    s = unimodular(rng, t.shape[0], p)
    a = s * t * s.inv()
    return [[Fraction(int(x.p), int(x.q)) for x in a.row(i)] for i in range(a.shape[0])]


class MatrixArithmeticTests(SimpleTestCase):
    def setUp(self):
        self.rng = random.Random(5)

    def random_matrix(self, size=3, bound=60):
        return matrix([[self.rng.randint(-bound, bound) for _ in range(size)] for _ in range(size)])

    def test_identity_is_neutral(self):
        a = self.random_matrix()
        identity = PAdicMatrix.identity(3, TOWER.base)
        self.assertTrue(mat_mul(identity, a).equals(a, TOWER.precision))
        self.assertTrue(mat_mul(a, identity).equals(a, TOWER.precision))

    def test_norm_of_scaled_identity(self):
        identity = PAdicMatrix.identity(3, TOWER.base)
        self.assertEqual(mat_norm(mat_scale(5, identity)), Fraction(1, 5))

    def test_norm_is_submultiplicative(self):
        for _ in range(20):
            a, b = self.random_matrix(), self.random_matrix()
            self.assertLessEqual(mat_norm(a @ b), mat_norm(a) * mat_norm(b))
            self.assertLessEqual(mat_norm(mat_add(a, b)), max(mat_norm(a), mat_norm(b)))

    def test_norm_is_operator_norm(self):
        for _ in range(10):
            a = self.random_matrix()
            basis_images = []
            for k in range(3):
                e = [q(1) if i == k else TOWER.zero() for i in range(3)]
                basis_images.append(max(x.norm() for x in a.apply(e)))
            self.assertEqual(max(basis_images), a.norm())
            vector = [q(self.rng.randint(1, 400)) for _ in range(3)]
            image = max(x.norm() for x in a.apply(vector))
            self.assertLessEqual(image, a.norm() * max(x.norm() for x in vector))

    def test_block_repeat(self):
        a = matrix([[1, 2], [3, 4]])
        big = a.block_repeat(2)
        self.assertEqual(big.size, 4)
        self.assertEqual(big[2, 3], q(2))
        self.assertTrue(big[0, 2].is_zero())
        self.assertEqual(big.norm(), a.norm())


class InverseTests(SimpleTestCase):
    def test_identity(self):
        identity = PAdicMatrix.identity(3, TOWER.base)
        self.assertTrue(mat_inverse(identity).equals(identity, TOWER.precision))

    def test_diagonal_with_uniformizer(self):
        inverse = matrix([[1, 0], [0, 5]]).inverse()
        self.assertEqual(inverse[1, 1], q(1, 5))
        self.assertEqual(inverse.norm(), 5)

    def test_unimodular_inverse_is_exact(self):
        rng = random.Random(17)
        p, n = 5, TOWER.precision
        for _ in range(10):
            s = unimodular(rng, 4, bound=30)
            inverse = matrix([[int(x) for x in row] for row in s.tolist()]).inverse()
            oracle = s.inv_mod(p**n)
            for i in range(4):
                for j in range(4):
                    self.assertTrue(inverse[i, j].equals(q(int(oracle[i, j])), n))

    def test_singular(self):
        with self.assertRaises(SingularToPrecision):
            matrix([[1, 2], [2, 4]]).inverse()


class CharPolyTests(SimpleTestCase):
    def test_diagonal(self):
        coeffs = char_poly(matrix([[2, 0, 0], [0, 3, 0], [0, 0, 5]]))
        expected = [-30, 31, -10, 1]
        for c, e in zip(coeffs, expected):
            self.assertTrue(c.equals(q(e), TOWER.precision))

    def test_nilpotent_jordan_block(self):
        coeffs = char_poly(matrix([[0, 1, 0], [0, 0, 1], [0, 0, 0]]))
        self.assertTrue(all(c.is_zero() for c in coeffs[:3]))
        self.assertEqual(coeffs[3], q(1))

    def test_random_integer_matrices(self):
        rng = random.Random(29)
        x = Symbol('x')
        for _ in range(15):
            entries = [[rng.randint(-9, 9) for _ in range(4)] for _ in range(4)]
            entries[3][0] = entries[3][0] or 1
            oracle = list(reversed(Matrix(entries).charpoly(x).all_coeffs()))
            coeffs = char_poly(matrix(entries))
            self.assertEqual(len(coeffs), 5)
            for c, e in zip(coeffs, oracle):
                self.assertTrue(c.equals(q(int(e)), TOWER.precision))


class SpectrumTests(SimpleTestCase):
    def test_diagonal(self):
        spec = spectrum(matrix([[0, 0], [0, 5]]), TOWER)
        self.assertEqual(spec.eigenvalues, ((TOWER.zero(), 1), (q(5), 1)))
        self.assertTrue(spec.verified)

    def test_square_roots_of_minus_one_in_q5(self):
        spec = spectrum(matrix([[0, -1], [1, 0]]), TOWER)
        self.assertEqual(spec.multiplicities, (1, 1))
        self.assertEqual(spec.field.degree, 1)
        residues = sorted(int((value - 2).valuation >= 1) for value in spec.values)
        self.assertEqual(residues, [0, 1])
        for value in spec.values:
            self.assertTrue((value * value + 1).equals(TOWER.zero(), M))

    def test_square_roots_of_minus_one_over_q3(self):
        capped = get_tower(3, precision=24, degree_cap=1, guard_digits=4)
        companion = matrix([[0, -1], [1, 0]], capped)
        with self.assertRaises(EigenvalueOutsideTower) as caught:
            spectrum(companion, capped)
        self.assertFalse(caught.exception.extra['ramified'])
        wide = get_tower(3, precision=24, degree_cap=2, guard_digits=4)
        spec = spectrum(matrix([[0, -1], [1, 0]], wide), wide)
        self.assertEqual(spec.field.degree, 2)
        for value in spec.values:
            self.assertTrue((value * value + 1).equals(wide.zero(2), M))

    def test_ramified_eigenvalues(self):
        with self.assertRaises(EigenvalueOutsideTower) as caught:
            spectrum(matrix([[0, 5], [1, 0]]), TOWER)
        self.assertTrue(caught.exception.extra['ramified'])

    def test_eigenvalues_of_negative_valuation(self):
        spec = spectrum(matrix([['1/5', 0], [1, 0]]), TOWER)
        self.assertIsNotNone(spec.index_of(q(1, 5), M))
        self.assertIsNotNone(spec.index_of(TOWER.zero(), M))
        companion = spectrum(matrix([[0, -1], [1, '26/5']]), TOWER)
        self.assertEqual(sorted(v.valuation for v in companion.values), [-1, 1])
        self.assertIsNotNone(companion.index_of(q(5), M))
        self.assertIsNotNone(companion.index_of(q(1, 5), M))

    def test_random_conjugated_spectra(self):
        rng = random.Random(31)
        for size in (2, 3, 4):
            for _ in range(4):
                diagonal = rng.sample(range(0, 60), size)
                a = matrix(conjugated(Matrix.diag(*diagonal), rng))
                spec = spectrum(a, TOWER)
                self.assertEqual(spec.dimension, size)
                self.assertTrue(all(v >= M for v in spec.residuals))
                for d in diagonal:
                    self.assertIsNotNone(spec.index_of(q(d), M))

    def test_claimed_spectrum(self):
        a = matrix([[0, -1], [1, 0]])
        found = spectrum(a, TOWER)
        checked = spectrum(a, TOWER, claimed=found.eigenvalues)
        self.assertEqual(checked.values, found.values)
        with self.assertRaises(UserSpectrumMismatch):
            spectrum(a, TOWER, claimed=[(q(2), 1), (q(3), 1)])
        with self.assertRaises(UserSpectrumMismatch):
            spectrum(a, TOWER, claimed=[(q(2), 1)])


class ResolventTests(SimpleTestCase):
    def setUp(self):
        self.rng = random.Random(37)

    def test_zero_matrix(self):
        r = resolvent(q(1), PAdicMatrix.zeros(2, TOWER.base))
        self.assertTrue(r.equals(PAdicMatrix.identity(2, TOWER.base), M))

    def test_diagonal(self):
        a = matrix([[2, 0], [0, 7]])
        r = resolvent(q(3), a)
        self.assertTrue(r[0, 0].equals(q(1), M))
        self.assertTrue(r[1, 1].equals(q(-1, 4), M))

    def test_on_spectrum(self):
        a = matrix([[2, 0], [0, 7]])
        with self.assertRaises(OnSpectrum):
            resolvent(q(7), a, spectrum(a, TOWER))
        with self.assertRaises(OnSpectrum):
            resolvent(q(7), a)

    def test_resolvent_identity(self):
        a = matrix(conjugated(Matrix.diag(1, 6, 10), self.rng))
        for _ in range(5):
            x, y = q(self.rng.randint(100, 900), 7), q(self.rng.randint(100, 900), 11)
            rx, ry = resolvent(x, a), resolvent(y, a)
            self.assertTrue((rx - ry).equals((rx @ ry) * (y - x), M - 4))

    def test_partial_fractions_for_jordan_block(self):
        a = matrix([[3, 1], [0, 3]])
        decomposition = spectral_decomposition(a, spectrum(a, TOWER), TOWER)
        x = q(11)
        r = partial_fraction_resolvent(x, decomposition)
        self.assertTrue(r[0, 0].equals(q(1, 8), M))
        self.assertTrue(r[0, 1].equals(q(1, 64), M))
        self.assertTrue(r[1, 0].is_zero())

    def test_partial_fractions_match_inversion(self):
        for _ in range(100):
            diagonal = self.rng.sample(range(0, 40), self.rng.randint(2, 5))
            a = matrix(conjugated(Matrix.diag(*diagonal), self.rng))
            spec = spectrum(a, TOWER)
            decomposition = spectral_decomposition(a, spec, TOWER, cross_check=False)
            idempotents = decomposition.idempotents
            total = PAdicMatrix.zeros(a.size, a.field)
            for i, e in enumerate(idempotents):
                total = total + e
                self.assertTrue((a @ e).equals(e @ a, M))
                for j, f in enumerate(idempotents):
                    expected = e if i == j else PAdicMatrix.zeros(a.size, a.field)
                    self.assertTrue((e @ f).equals(expected, M))
            self.assertTrue(total.equals(PAdicMatrix.identity(a.size, a.field), M))
            for _ in range(10):
                x = q(self.rng.randint(1, 10**4), 5 ** self.rng.randint(0, 2) * 3)
                if spec.index_of(x, M) is not None:
                    continue
                self.assertTrue(partial_fraction_resolvent(x, decomposition).equals(resolvent(x, a), M - 6))


class DecompositionTests(SimpleTestCase):
    def assertResolution(self, a, decomposition, digits=M):
        idempotents = decomposition.idempotents
        identity = PAdicMatrix.identity(a.size, decomposition.matrix.field)
        total = idempotents[0]
        for e in idempotents[1:]:
            total = total + e
        self.assertTrue(total.equals(identity, digits))
        for i, e in enumerate(idempotents):
            self.assertTrue((a @ e).equals(e @ a, digits))
            for j, f in enumerate(idempotents):
                expected = e if i == j else PAdicMatrix.zeros(a.size, e.field)
                self.assertTrue((e @ f).equals(expected, digits))
            value, nu = decomposition.spectrum.eigenvalues[i]
            self.assertGreaterEqual((a.shift(value) ** nu @ e).valuation, digits)

    def test_diagonal(self):
        a = matrix([[0, 0], [0, 5]])
        decomposition = spectral_decomposition(a, spectrum(a, TOWER), TOWER)
        self.assertTrue(decomposition.idempotents[0].equals(matrix([[1, 0], [0, 0]]), M))
        self.assertTrue(decomposition.idempotents[1].equals(matrix([[0, 0], [0, 1]]), M))
        self.assertResolution(a, decomposition)

    def test_scalar_matrix(self):
        a = matrix([[4, 0, 0], [0, 4, 0], [0, 0, 4]])
        decomposition = spectral_decomposition(a, spectrum(a, TOWER), TOWER)
        self.assertEqual(len(decomposition.idempotents), 1)
        self.assertTrue(decomposition.idempotents[0].equals(PAdicMatrix.identity(3, TOWER.base), M))

    def test_jordan_and_simple_eigenvalue(self):
        rng = random.Random(41)
        block = Matrix([[2, 1, 0], [0, 2, 0], [0, 0, 8]])
        a = matrix(conjugated(block, rng))
        spec = spectrum(a, TOWER)
        self.assertEqual(sorted(spec.multiplicities), [1, 2])
        self.assertResolution(a, spectral_decomposition(a, spec, TOWER), M - 6)

    def test_eigenvalues_in_extension(self):
        tower = get_tower(3, precision=24, degree_cap=4, guard_digits=4)
        a = matrix([[0, -1], [1, 0]], tower)
        decomposition = spectral_decomposition(a, spectrum(a, tower), tower)
        self.assertResolution(decomposition.matrix, decomposition)

    def test_unverified_spectrum(self):
        a = matrix([[0, 0], [0, 5]])
        spec = spectrum(a, TOWER)
        broken = Spectrum(spec.eigenvalues, (0, 0), spec.field, spec.charpoly, verified=False)
        with self.assertRaises(SpectrumUnverified):
            spectral_decomposition(a, broken, TOWER)

    def test_characteristic_polynomial_vanishes_on_spectrum(self):
        a = matrix(conjugated(Matrix.diag(3, 8, 13), random.Random(43)))
        spec = spectrum(a, TOWER)
        for value in spec.values:
            self.assertGreaterEqual(horner(list(spec.charpoly), value).valuation, M)
