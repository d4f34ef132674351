from dataclasses import dataclass, field
from functools import cached_property

from rest_framework import serializers
from sympy import isprime

from apps.calculus.inductive import TUHF, UHF
from apps.core.conf import padic_setting
from apps.core.exceptions import PadicError
from apps.scalars.fields import unramified_field
from apps.scalars.numbers import parse_scalar
from apps.scalars.tower import get_tower
from apps.shnirelman.integral import SchedulePolicy

COMMANDS = ('spectrum', 'cover', 'integrate', 'fcalc', 'verify')
SUITES = ('axioms', 'cover_independence', 'perturbation', 'laws')

# payload keys each command cannot run without
REQUIRED = {
    'spectrum': ('matrix',),
    'cover': ('points',),
    'integrate': ('circle', 'function'),
    'fcalc': ('function',),
    'verify': (),
}


class ScalarField(serializers.Field):
    """An int, a rational or digit string, or a coordinate list of those."""
    default_error_messages = {
        'invalid': 'Expected an integer, a string or a list of coordinates.',
        'unreadable': 'Cannot read {value!r} as a {p}-adic scalar: {reason}',
    }

    def to_internal_value(self, data):
        if isinstance(data, bool):
            self.fail('invalid')
        if isinstance(data, list):
            if not data or not all(isinstance(c, (int, str)) and not isinstance(c, bool) for c in data):
                self.fail('invalid')
        elif not isinstance(data, (int, str)):
            self.fail('invalid')
        self.check_readable(data)
        return data

    def check_readable(self, data):
        job = getattr(self.root, 'initial_data', None)
        p = job.get('p') if isinstance(job, dict) else None
        if isinstance(p, bool) or not isinstance(p, int) or not isprime(p):
            return
        precision = job.get('precision')
        if isinstance(precision, bool) or not isinstance(precision, int) or precision < 1:
            precision = padic_setting('PRECISION')
        try:
            parse_scalar(data, unramified_field(p, 1), precision)
        except (ValueError, PadicError) as exc:
            self.fail('unreadable', value=data, p=p, reason=getattr(exc, 'detail', exc))

    def to_representation(self, value):
        return value


class MatrixField(serializers.ListField):
    child = serializers.ListField(child=ScalarField())

    def __init__(self, **kwargs):
        kwargs.setdefault('min_length', 1)
        super().__init__(**kwargs)

    def to_internal_value(self, data):
        rows = super().to_internal_value(data)
        if not rows or any(len(row) != len(rows) for row in rows):
            raise serializers.ValidationError('Matrix must be square and non-empty.')
        return rows


class ScheduleSerializer(serializers.Serializer):
    start = serializers.IntegerField(min_value=1)
    count = serializers.IntegerField(min_value=2)


class CoverSerializer(serializers.Serializer):
    centers = serializers.ListField(child=ScalarField(), min_length=1)
    radius = serializers.IntegerField()


class CircleSerializer(serializers.Serializer):
    center = ScalarField()
    radius = serializers.IntegerField()
    unit = ScalarField(required=False)


class RationalSpecSerializer(serializers.Serializer):
    numerator = serializers.ListField(child=ScalarField(), min_length=1)
    denominator = serializers.ListField(child=ScalarField(), min_length=1)
    poles = serializers.ListField(child=ScalarField(), required=False, default=list)


class FunctionSpecSerializer(serializers.Serializer):
    """Tagged union: exactly one of polynomial, rational, indicator, series."""
    polynomial = serializers.ListField(child=ScalarField(), min_length=1, required=False)
    rational = RationalSpecSerializer(required=False)
    indicator = serializers.ListField(child=serializers.IntegerField(min_value=0), required=False)
    series = serializers.ListField(child=serializers.ListField(child=ScalarField(), min_length=1), required=False)

    def validate(self, data):
        if len(data) != 1:
            raise serializers.ValidationError(
                'Give exactly one of polynomial, rational, indicator, series.',
            )
        return data


class InductiveSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=[UHF, TUHF])
    dimensions = serializers.ListField(child=serializers.IntegerField(min_value=1), min_length=1)
    levels = serializers.ListField(child=MatrixField(), min_length=1)

    def validate(self, data):
        if len(data['levels']) > len(data['dimensions']):
            raise serializers.ValidationError({'levels': 'More levels than tower dimensions.'})
        return data


class LawsSerializer(serializers.Serializer):
    g = FunctionSpecSerializer()
    alpha = ScalarField(default=1)
    beta = ScalarField(default=1)
    trials = serializers.IntegerField(min_value=0, default=5)


class ClaimedEigenvalueSerializer(serializers.Serializer):
    value = ScalarField()
    multiplicity = serializers.IntegerField(min_value=1)


@dataclass
class JobSpec:
    command: str
    p: int
    precision: int
    guard_digits: int
    degree_cap: int
    seed: int
    schedule: SchedulePolicy = None
    payload: dict = field(default_factory=dict)
    echo: dict = field(default_factory=dict)

    @cached_property
    def tower(self):
        return get_tower(self.p, self.precision, self.degree_cap, self.guard_digits)

    @property
    def digits(self):
        return self.precision - self.guard_digits


class JobSpecSerializer(serializers.Serializer):
    p = serializers.IntegerField(min_value=2)
    precision = serializers.IntegerField(min_value=1, required=False)
    guard_digits = serializers.IntegerField(min_value=0, required=False)
    degree_cap = serializers.IntegerField(min_value=1, required=False)
    seed = serializers.IntegerField(min_value=0, max_value=2**64 - 1, required=False)
    schedule = ScheduleSerializer(required=False)

    matrix = MatrixField(required=False)
    spectrum = ClaimedEigenvalueSerializer(many=True, required=False)
    inductive = InductiveSerializer(required=False)
    points = serializers.ListField(child=ScalarField(), min_length=1, required=False)
    s = serializers.IntegerField(required=False)
    candidates = serializers.ListField(child=ScalarField(), min_length=1, required=False)
    radius = serializers.IntegerField(required=False)
    cover = CoverSerializer(required=False)
    intersect = CoverSerializer(required=False)
    circle = CircleSerializer(required=False)
    unit = ScalarField(required=False)
    function = FunctionSpecSerializer(required=False)
    integrand = serializers.ChoiceField(choices=['scalar', 'resolvent'], default='scalar')
    laws = LawsSerializer(required=False)
    epsilon = serializers.IntegerField(required=False)
    perturbation = MatrixField(required=False)
    suites = serializers.ListField(child=serializers.ChoiceField(choices=SUITES), required=False)
    trials = serializers.IntegerField(min_value=1, max_value=1000, default=5)

    def validate_p(self, value):
        if not isprime(value):
            raise serializers.ValidationError(f'{value} is not prime.')
        return value

    def validate(self, data):
        command = self.context['command']
        precision = data.get('precision', padic_setting('PRECISION'))
        guard_digits = data.get('guard_digits', padic_setting('GUARD_DIGITS'))
        if precision <= guard_digits:
            raise serializers.ValidationError({'guard_digits': 'Guard digits must stay below the precision.'})
        missing = {key: 'This field is required.' for key in REQUIRED[command] if key not in data}
        if command == 'fcalc' and 'matrix' not in data and 'inductive' not in data:
            missing['matrix'] = 'Give a matrix or an inductive element.'
        if command == 'integrate' and data['integrand'] == 'resolvent' and 'matrix' not in data:
            missing['matrix'] = 'A resolvent integrand needs a matrix.'
        if command == 'cover' and 's' not in data and not ('candidates' in data and 'radius' in data):
            missing['s'] = 'Give a radius bound s, or candidates with a radius.'
        if missing:
            raise serializers.ValidationError(missing)
        if 'perturbation' in data and len(data['perturbation']) != len(data.get('matrix', [])):
            raise serializers.ValidationError({'perturbation': 'Must have the size of the matrix.'})
        return data

    def create(self, validated_data):
        data = dict(validated_data)
        schedule = data.pop('schedule', None)
        return JobSpec(
            command=self.context['command'],
            p=data.pop('p'),
            precision=data.pop('precision', padic_setting('PRECISION')),
            guard_digits=data.pop('guard_digits', padic_setting('GUARD_DIGITS')),
            degree_cap=data.pop('degree_cap', padic_setting('DEGREE_CAP')),
            seed=data.pop('seed', padic_setting('DEFAULT_SEED')),
            schedule=SchedulePolicy(schedule['start'], schedule['count']) if schedule else None,
            payload=data,
            echo=self.initial_data,
        )
