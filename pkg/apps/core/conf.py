from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

DEFAULTS = {
    'PRECISION': 24,
    'GUARD_DIGITS': 4,
    'DEGREE_CAP': 8,
    'SCHEDULE_START': 2,
    'SCHEDULE_COUNT': 4,
    'WORKERS': 1,
    'FCALC_CROSS_CHECK': True,
    'DEFAULT_SEED': 0x5EED5EED5EED5EED,
}


def padic_setting(name):
    """Read one entry of ``settings.PADIC``, falling back to the defaults."""
    try:
        configured = getattr(settings, 'PADIC', {})
    except ImproperlyConfigured:
        configured = {}
    return configured.get(name, DEFAULTS[name])


def working_digits(precision=None, guard_digits=None):
    """Digits M = N - G used by every "equal at precision" check."""
    if precision is None:
        precision = padic_setting('PRECISION')
    if guard_digits is None:
        guard_digits = padic_setting('GUARD_DIGITS')
    return precision - guard_digits
