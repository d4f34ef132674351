"""Report documents: the JobSpec echo, rendered results, certificates and a status."""
from fractions import Fraction

from rest_framework.exceptions import ValidationError
from rest_framework.renderers import JSONRenderer
from rest_framework.utils.encoders import JSONEncoder

from apps.core.exceptions import EXIT_CODES
from apps.scalars.numbers import INF

OK = 'OK'


def valuation(v):
    """Valuations as ints, 'inf' for exact zero."""
    return 'inf' if v == INF else int(v)


def scalar(x):
    return x.render()


def matrix(a):
    return a.render()


def cover(c):
    return [
        {'center': scalar(disc.center), 'radius': valuation(disc.radius.exponent), 'kind': disc.kind}
        for disc in c.discs()
    ]


def shnirelman(result, p):
    """A Shnirelman result with its schedule and stabilization trace."""
    if result is None:
        return None
    value = result.value
    return {
        'value': matrix(value) if hasattr(value, 'rows') else scalar(value),
        'schedule': list(result.schedule),
        'degree': result.degree,
        'trace': [valuation(v) for v in result.trace],
        'trace_norms': [str(norm) for norm in result.trace_norms(p)],
        'certified_digits': result.certified_digits,
    }


def _error(exc):
    if isinstance(exc, ValidationError):
        return {'code': 'invalid', 'detail': exc.detail, 'family': 'validation', 'context': {}}
    error = exc.as_dict()
    error['context'] = exc.extra
    return error


def build_report(command, echo, results=None, certificates=None, error=None):
    """Status is OK, or the code of ``error`` (a PadicError or a DRF ValidationError)."""
    report = {
        'command': command,
        'job': echo,
        'status': OK,
        'results': results or {},
        'certificates': certificates or {},
    }
    if error is not None:
        report['error'] = _error(error)
        report['status'] = report['error']['code']
    return report


def exit_code(report):
    if report['status'] == OK:
        return EXIT_CODES['ok']
    return EXIT_CODES[report['error']['family']]


class ReportEncoder(JSONEncoder):
    """Sorted keys; fractions and leftover library values as strings."""

    def __init__(self, *args, **kwargs):
        kwargs['sort_keys'] = True
        super().__init__(*args, **kwargs)

    def default(self, obj):
        if isinstance(obj, Fraction):
            return str(obj)
        try:
            return super().default(obj)
        except TypeError:
            return str(obj)


class ReportRenderer(JSONRenderer):
    encoder_class = ReportEncoder
    strict = False


def render(report):
    return ReportRenderer().render(report, renderer_context={'indent': 2}).decode('utf-8') + '\n'
