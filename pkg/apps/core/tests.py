from django.test import SimpleTestCase, override_settings

from apps.core.conf import padic_setting, working_digits
from apps.core.exceptions import (
    EXIT_CODES,
    DegreeCapExceeded,
    EigenvalueOutsideTower,
    LawViolation,
    NotCovering,
    PadicError,
)


class ExceptionTests(SimpleTestCase):
    def test_codes_and_families(self):
        exc = EigenvalueOutsideTower('x^2 + 1 needs degree 2.', factor=[1, 0, 1])
        self.assertEqual(exc.code, 'eigenvalue_outside_tower')
        self.assertEqual(exc.family, 'spectrum')
        self.assertEqual(exc.exit_code, 3)
        self.assertEqual(exc.extra, {'factor': [1, 0, 1]})
        self.assertEqual(
            exc.as_dict(),
            {'code': 'eigenvalue_outside_tower', 'detail': 'x^2 + 1 needs degree 2.', 'family': 'spectrum'},
        )

    def test_default_detail(self):
        exc = NotCovering()
        self.assertEqual(str(exc.detail), NotCovering.default_detail)
        self.assertEqual(exc.exit_code, EXIT_CODES['validation'])

    def test_exit_codes_are_distinct(self):
        self.assertEqual(len(set(EXIT_CODES.values())), len(EXIT_CODES))
        self.assertEqual(DegreeCapExceeded().exit_code, 4)
        self.assertEqual(LawViolation().exit_code, 5)
        self.assertTrue(issubclass(LawViolation, PadicError))


class SettingsTests(SimpleTestCase):
    @override_settings(PADIC={'PRECISION': 30})
    def test_partial_override_falls_back_to_defaults(self):
        self.assertEqual(padic_setting('PRECISION'), 30)
        self.assertEqual(padic_setting('GUARD_DIGITS'), 4)
        self.assertEqual(working_digits(), 26)

    def test_explicit_arguments_win(self):
        self.assertEqual(working_digits(10, 3), 7)
