from rest_framework.exceptions import APIException

# CLI exit code per error family
EXIT_CODES = {
    'ok': 0,
    'validation': 2,
    'spectrum': 3,
    'integration': 4,
    'law': 5,
}


class PadicError(APIException):
    """Base class for every failure raised by the library.

    Mirrors DRF's exception contract: ``detail`` is the human message and
    ``default_code`` the machine code that ends up in reports. ``extra``
    carries structured context (offending factor, stabilization trace...).
    """
    status_code = 400
    default_detail = 'p-adic computation failed.'
    default_code = 'padic_error'
    family = 'validation'

    def __init__(self, detail=None, code=None, **extra):
        super().__init__(detail=detail, code=code)
        self.extra = extra

    @property
    def code(self):
        return self.get_codes()

    @property
    def exit_code(self):
        return EXIT_CODES[self.family]

    def as_dict(self):
        return {'code': self.code, 'detail': str(self.detail), 'family': self.family}


# Scalar tower

class DivisionByZero(PadicError):
    default_detail = 'Division by zero.'
    default_code = 'division_by_zero'


class PrecisionExhausted(PadicError):
    default_detail = 'No significant digits left.'
    default_code = 'precision_exhausted'


class NotCoprime(PadicError):
    default_detail = 'n must be coprime to p.'
    default_code = 'not_coprime'
    family = 'integration'


class DegreeCapExceeded(PadicError):
    default_detail = 'Required extension degree exceeds the configured cap.'
    default_code = 'degree_cap_exceeded'
    family = 'integration'


class NotSimpleRoot(PadicError):
    default_detail = 'Seed is not a simple residue root.'
    default_code = 'not_simple_root'


class FieldMismatch(PadicError):
    default_detail = 'Elements live in fields that do not embed into each other.'
    default_code = 'field_mismatch'


class ReducibleModulus(PadicError):
    default_detail = 'Extension modulus is not irreducible mod p.'
    default_code = 'reducible_modulus'


# Ultrametric geometry

class EmptySet(PadicError):
    default_detail = 'Point set is empty.'
    default_code = 'empty_set'


class RadiusUnrealizable(PadicError):
    default_detail = 'No radius in p^Z satisfies the required inequalities.'
    default_code = 'radius_unrealizable'


class NotCovering(PadicError):
    default_detail = 'Discs do not cover the point set.'
    default_code = 'not_covering'


class NotDisjoint(PadicError):
    default_detail = 'Discs are not pairwise disjoint.'
    default_code = 'not_disjoint'


# Analytic functions

class OutsideDomain(PadicError):
    default_detail = 'Point lies outside the domain of the function.'
    default_code = 'outside_domain'
    family = 'integration'


class PoleInsideCover(PadicError):
    default_detail = 'A pole of the rational function meets a cover disc.'
    default_code = 'pole_inside_cover'


class IncompatibleDomains(PadicError):
    default_detail = 'Neither cover refines into the other over the point set.'
    default_code = 'incompatible_domains'


class NotCoveringSigma(PadicError):
    default_detail = 'Function pieces miss a point of the set.'
    default_code = 'not_covering_sigma'


# Shnirelman integral

class NoStabilization(PadicError):
    default_detail = 'Schedule exhausted without two agreeing partial sums.'
    default_code = 'no_stabilization'
    family = 'integration'


class EvaluationError(PadicError):
    default_detail = 'Integrand could not be evaluated on the circle.'
    default_code = 'evaluation_error'
    family = 'integration'


class LimitMismatch(PadicError):
    default_detail = 'Limit path and coefficient oracle disagree.'
    default_code = 'limit_mismatch'
    family = 'integration'


# Linear algebra

class DimensionMismatch(PadicError):
    default_detail = 'Matrix dimensions do not match.'
    default_code = 'dimension_mismatch'


class SingularToPrecision(PadicError):
    default_detail = 'Matrix is singular at working precision.'
    default_code = 'singular_to_precision'
    family = 'spectrum'


class EigenvalueOutsideTower(PadicError):
    default_detail = 'An eigenvalue needs a ramified or too large extension.'
    default_code = 'eigenvalue_outside_tower'
    family = 'spectrum'


class UserSpectrumMismatch(PadicError):
    default_detail = 'Supplied spectrum fails the characteristic polynomial check.'
    default_code = 'user_spectrum_mismatch'
    family = 'spectrum'


class OnSpectrum(PadicError):
    default_detail = 'Point lies on the spectrum.'
    default_code = 'on_spectrum'
    family = 'spectrum'


class SpectrumUnverified(PadicError):
    default_detail = 'Spectrum has not been verified.'
    default_code = 'spectrum_unverified'
    family = 'spectrum'


# Spectral calculus

class FunctionNotInFA(PadicError):
    default_detail = 'Function is not locally analytic on the cover of the spectrum.'
    default_code = 'function_not_in_fa'


class CoverNotStable(PadicError):
    default_detail = 'A level spectrum escapes the cover.'
    default_code = 'cover_not_stable'
    family = 'law'


class NotCauchy(PadicError):
    default_detail = 'Sequence does not contract.'
    default_code = 'not_cauchy'
    family = 'law'


class ShapeViolation(PadicError):
    default_detail = 'Level matrix does not have the shape required by the tower.'
    default_code = 'shape_violation'


class LawViolation(PadicError):
    default_detail = 'A functional-calculus law failed at working precision.'
    default_code = 'law_violation'
    family = 'law'
