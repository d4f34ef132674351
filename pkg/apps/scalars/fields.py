"""Residue fields F_{p^f} and digit-level arithmetic of unramified extensions.

Elements of F_{p^f} are sympy galoistools polynomials (tuples, highest
degree first) reduced mod the compatible modulus of degree f. Elements of
Q_{p^f} are handled here only as digit vectors: ``f`` integers, lowest
power of the generator first, reduced mod ``p**precision``.
"""
import itertools
import logging
from functools import lru_cache

from sympy import factorint, isprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import (
    gf_add,
    gf_compose_mod,
    gf_gcdex,
    gf_irreducible_p,
    gf_mul,
    gf_pow_mod,
    gf_rem,
    gf_strip,
    gf_sub,
)

from apps.core.exceptions import FieldMismatch, ReducibleModulus

logger = logging.getLogger(__name__)

X = (1, 0)


def _ints(poly):
    return tuple(int(c) for c in poly)


def _is_primitive(modulus, p, order):
    if order == 1:
        return True
    for q in factorint(order):
        if list(gf_pow_mod(list(X), order // q, list(modulus), p, ZZ)) == [1]:
            return False
    return True


def _is_compatible(modulus, p, f, d, sub_modulus):
    k = (p**f - 1) // (p**d - 1)
    image = gf_pow_mod(list(X), k, list(modulus), p, ZZ)
    return not gf_compose_mod(list(sub_modulus), image, list(modulus), p, ZZ)


@lru_cache(maxsize=None)
def compatible_modulus(p, f):
    """First monic irreducible primitive polynomial of degree f mod p whose
    root is compatible with the roots chosen for every subfield."""
    if not isprime(p):
        raise ReducibleModulus(f'{p} is not prime.')
    order = p**f - 1
    subfields = [(d, compatible_modulus(p, d)) for d in range(1, f) if f % d == 0]
    for tail in itertools.product(range(p), repeat=f):
        if tail[-1] == 0:
            continue
        candidate = (1, *tail)
        if not gf_irreducible_p(list(candidate), p, ZZ):
            continue
        if not _is_primitive(candidate, p, order):
            continue
        if all(_is_compatible(candidate, p, f, d, sub) for d, sub in subfields):
            logger.debug('compatible modulus for F_%s^%s: %s', p, f, candidate)
            return candidate
    raise ReducibleModulus(f'No compatible modulus of degree {f} mod {p}.')


class ResidueField:
    """The finite field F_{p^f} = F_p[x]/(C_f)."""

    def __init__(self, p, degree):
        self.p = p
        self.degree = degree
        self.modulus = compatible_modulus(p, degree)
        self.order = p**degree

    def __repr__(self):
        return f'ResidueField({self.p}^{self.degree})'

    def __eq__(self, other):
        return isinstance(other, ResidueField) and (self.p, self.degree) == (other.p, other.degree)

    def __hash__(self):
        return hash(('F', self.p, self.degree))

    def reduce(self, poly):
        return _ints(gf_rem(gf_strip([c % self.p for c in poly]), list(self.modulus), self.p, ZZ))

    @property
    def zero(self):
        return ()

    @property
    def one(self):
        return (1,)

    def add(self, a, b):
        return _ints(gf_add(list(a), list(b), self.p, ZZ))

    def sub(self, a, b):
        return _ints(gf_sub(list(a), list(b), self.p, ZZ))

    def mul(self, a, b):
        return self.reduce(gf_mul(list(a), list(b), self.p, ZZ))

    def pow(self, a, n):
        if not a:
            return () if n else (1,)
        return _ints(gf_pow_mod(list(a), n % (self.order - 1), list(self.modulus), self.p, ZZ))

    def inv(self, a):
        if not a:
            raise ZeroDivisionError('zero has no inverse in a residue field')
        s, _, g = gf_gcdex(list(a), list(self.modulus), self.p, ZZ)
        # g is a nonzero constant because the modulus is irreducible
        scale = pow(int(g[0]), -1, self.p)
        return self.reduce([c * scale for c in s])

    def frobenius(self, a):
        return self.pow(a, self.p)

    def from_digits(self, digits):
        return self.reduce(list(reversed([d % self.p for d in digits])))

    def to_digits(self, a):
        digits = [0] * self.degree
        for i, c in enumerate(reversed(a)):
            digits[i] = c
        return tuple(digits)

    def from_int(self, n):
        return self.reduce([n % self.p])

    @property
    def generator(self):
        return self.reduce(list(X))

    def elements(self):
        """Zero followed by g^0, g^1, ..., g^{q-2} for the field generator g."""
        yield ()
        yield from self.subfield_units(self.degree)

    def subfield_units(self, e):
        """Units of the subfield F_{p^e}, in generator-power order."""
        if self.degree % e:
            raise FieldMismatch(f'F_{self.p}^{e} is not a subfield of {self!r}.')
        step = (self.order - 1) // (self.p**e - 1)
        base = self.pow(self.generator, step)
        current = (1,)
        for _ in range(self.p**e - 1):
            yield current
            current = self.mul(current, base)

    def index(self, a):
        """Exponent k with a = g^k, or -1 for zero."""
        if not a:
            return -1
        for k, u in enumerate(self.subfield_units(self.degree)):
            if u == a:
                return k
        raise ValueError(f'{a} is not an element of {self!r}')

    def evaluate(self, coeffs, x):
        acc = ()
        for c in reversed(coeffs):
            acc = self.add(self.mul(acc, x), c)
        return acc

    def roots(self, coeffs, candidates=None):
        """Distinct roots among ``candidates`` (default: the whole field)."""
        if candidates is None:
            candidates = self.elements()
        return [x for x in candidates if not self.evaluate(coeffs, x)]


@lru_cache(maxsize=None)
def residue_field(p, degree):
    return ResidueField(p, degree)


class UnramifiedField:
    """Q_{p^f} = Q_p[x]/(M_f), M_f the integer lift of the compatible modulus.

    Only the digit-level kernels live here; elements are ``ExtScalar``
    instances from :mod:`apps.scalars.numbers`.
    """

    def __init__(self, p, degree):
        self.p = p
        self.degree = degree
        self.residue = residue_field(p, degree)
        # monic, lowest coefficient first, length degree + 1
        self.modulus = tuple(reversed(self.residue.modulus))
        self._embeddings = {}

    def __repr__(self):
        return f'Q_{self.p}^{self.degree}' if self.degree > 1 else f'Q_{self.p}'

    def __reduce__(self):
        return (unramified_field, (self.p, self.degree))

    def contains(self, other):
        return other.p == self.p and self.degree % other.degree == 0

    def mul_digits(self, a, b, q):
        f = self.degree
        if f == 1:
            return ((a[0] * b[0]) % q,)
        prod = [0] * (2 * f - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        modulus = self.modulus
        for k in range(2 * f - 2, f - 1, -1):
            c = prod[k] % q
            if c:
                base = k - f
                for i in range(f):
                    prod[base + i] -= c * modulus[i]
        return tuple(c % q for c in prod[:f])

    def inv_digits(self, a, precision):
        """Inverse of a unit digit vector mod p**precision (Newton iteration)."""
        p = self.p
        if self.degree == 1:
            return (pow(a[0], -1, p**precision),)
        res = self.residue
        z = res.to_digits(res.inv(res.from_digits(a)))
        known = 1
        while known < precision:
            known = min(2 * known, precision)
            q = p**known
            az = self.mul_digits(a, z, q)
            correction = tuple((-c) % q for c in az)
            correction = ((correction[0] + 2) % q,) + correction[1:]
            z = self.mul_digits(z, correction, q)
        return z

    def pow_digits(self, a, n, q):
        result = (1,) + (0,) * (self.degree - 1)
        base = a
        while n:
            if n & 1:
                result = self.mul_digits(result, base, q)
            n >>= 1
            if n:
                base = self.mul_digits(base, base, q)
        return result

    def _eval_int_poly(self, coeffs, x, q):
        acc = (0,) * self.degree
        for c in reversed(coeffs):
            acc = self.mul_digits(acc, x, q)
            acc = ((acc[0] + c) % q,) + acc[1:]
        return acc

    def generator_image(self, sub_degree, precision):
        """Digits of the image of the subfield generator in this field.

        The image is the Hensel lift of the root of M_d whose residue is
        g^((p^f-1)/(p^d-1)); this choice makes embeddings compose along chains.
        """
        if self.degree % sub_degree:
            raise FieldMismatch(f'Q_{self.p}^{sub_degree} does not embed into {self!r}.')
        cached = self._embeddings.get(sub_degree)
        if cached is not None and cached[0] >= precision:
            q = self.p**precision
            return tuple(c % q for c in cached[1])
        p = self.p
        res = self.residue
        sub_modulus = unramified_field(p, sub_degree).modulus
        derivative = [i * c for i, c in enumerate(sub_modulus)][1:]
        step = (res.order - 1) // (p**sub_degree - 1)
        x = res.to_digits(res.pow(res.generator, step))
        known = 1
        while known < precision:
            known = min(2 * known, precision)
            q = p**known
            value = self._eval_int_poly(sub_modulus, x, q)
            slope = self._eval_int_poly(derivative, x, q)
            step_digits = self.mul_digits(value, self.inv_digits(slope, known), q)
            x = tuple((xi - si) % q for xi, si in zip(x, step_digits))
        self._embeddings[sub_degree] = (precision, x)
        return x

    def basis_images(self, sub_degree, precision):
        """Digits of theta^0, ..., theta^{d-1} for the subfield generator image theta."""
        q = self.p**precision
        theta = self.generator_image(sub_degree, precision)
        images = [(1,) + (0,) * (self.degree - 1)]
        for _ in range(sub_degree - 1):
            images.append(self.mul_digits(images[-1], theta, q))
        return images

    def embed_digits(self, digits, sub_degree, precision):
        if sub_degree == self.degree:
            return tuple(digits)
        q = self.p**precision
        out = [0] * self.degree
        for c, image in zip(digits, self.basis_images(sub_degree, precision)):
            if c:
                for i, e in enumerate(image):
                    out[i] += c * e
        return tuple(c % q for c in out)

    def project_digits(self, digits, sub_degree, precision):
        """Coordinates over the subfield basis, or None when outside the image."""
        if sub_degree == self.degree:
            return tuple(digits)
        p = self.p
        q = p**precision
        images = self.basis_images(sub_degree, precision)
        # rows: coordinates of this field, columns: subfield basis, last column the target
        rows = [[images[j][i] for j in range(sub_degree)] + [digits[i] % q] for i in range(self.degree)]
        pivots = []
        for col in range(sub_degree):
            pivot = next((r for r in range(len(rows)) if r not in pivots and rows[r][col] % p), None)
            if pivot is None:
                return None
            pivots.append(pivot)
            inv = pow(rows[pivot][col], -1, q)
            rows[pivot] = [(c * inv) % q for c in rows[pivot]]
            for r in range(len(rows)):
                if r != pivot and rows[r][col]:
                    factor = rows[r][col]
                    rows[r] = [(c - factor * d) % q for c, d in zip(rows[r], rows[pivot])]
        for r in range(len(rows)):
            if r not in pivots and rows[r][-1] % q:
                return None
        return tuple(rows[pivots[col]][-1] for col in range(sub_degree))


@lru_cache(maxsize=None)
def unramified_field(p, degree):
    if degree < 1:
        raise ReducibleModulus(f'Extension degree must be positive, got {degree}.')
    return UnramifiedField(p, degree)
