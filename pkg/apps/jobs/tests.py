import json
import tempfile
from fractions import Fraction
from io import StringIO
from pathlib import Path

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings
from rest_framework import serializers
from rest_framework.exceptions import ValidationError

from apps.jobs import reports
from apps.jobs.serializers import FunctionSpecSerializer, JobSpecSerializer, MatrixField, ScalarField
from apps.scalars.tower import get_tower

TOWER = get_tower(5, precision=24, degree_cap=8, guard_digits=4)
M = TOWER.working_digits

QUICK = {'FCALC_CROSS_CHECK': False}


def parsed(token):
    """A rendered scalar read back in the field its coordinates span."""
    return TOWER.parse(token, len(token) if isinstance(token, list) else 1)


class JobTestCase(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.runs = 0

    def run_job(self, command, job, *flags):
        """(exit code, report text, report) of one command run on ``job``."""
        self.runs += 1
        source = Path(self.tmp.name) / f'job{self.runs}.json'
        target = Path(self.tmp.name) / f'report{self.runs}.json'
        source.write_text(json.dumps(job), encoding='utf-8')
        code = 0
        try:
            call_command(command, '--input', str(source), '--output', str(target), *flags, stdout=StringIO(), stderr=StringIO())
        except CommandError as exc:
            code = exc.returncode
        text = target.read_text(encoding='utf-8')
        return code, text, json.loads(text)


# SERIALIZER TESTS

class SerializerTests(SimpleTestCase):
    def test_function_spec_is_a_tagged_union(self):
        self.assertTrue(FunctionSpecSerializer(data={'indicator': [0]}).is_valid())
        both = FunctionSpecSerializer(data={'indicator': [0], 'polynomial': [1]})
        self.assertFalse(both.is_valid())
        self.assertFalse(FunctionSpecSerializer(data={}).is_valid())

    def test_matrix_must_be_square(self):
        field = MatrixField()
        self.assertEqual(field.run_validation([[1, '1/5'], [0, 2]]), [[1, '1/5'], [0, 2]])
        with self.assertRaises(ValidationError):
            field.run_validation([[1, 2], [3]])

    def test_prime_and_guard_digits(self):
        serializer = JobSpecSerializer(data={'p': 6, 'matrix': [[1]]}, context={'command': 'spectrum'})
        self.assertFalse(serializer.is_valid())
        self.assertIn('p', serializer.errors)
        serializer = JobSpecSerializer(
            data={'p': 5, 'precision': 4, 'guard_digits': 4, 'matrix': [[1]]}, context={'command': 'spectrum'},
        )
        self.assertFalse(serializer.is_valid())
        self.assertIn('guard_digits', serializer.errors)

    def test_payload_must_match_the_command(self):
        serializer = JobSpecSerializer(data={'p': 5, 'function': {'indicator': [0]}}, context={'command': 'fcalc'})
        self.assertFalse(serializer.is_valid())
        self.assertIn('matrix', serializer.errors)
        serializer = JobSpecSerializer(data={'p': 5, 'points': [0]}, context={'command': 'cover'})
        self.assertFalse(serializer.is_valid())
        self.assertIn('s', serializer.errors)

    def test_scalars_must_be_readable(self):
        for token in ('5^0 * (7)', '1/0', 'seven', ['1', '2/0']):
            serializer = JobSpecSerializer(data={'p': 5, 'matrix': [[token]]}, context={'command': 'spectrum'})
            self.assertFalse(serializer.is_valid(), token)
            self.assertIn('matrix', serializer.errors)
        serializer = JobSpecSerializer(
            data={'p': 5, 'matrix': [['5^1 * (1 + 2*5) + O(5^3)', '-2/3'], [[1, 2], 0]]}, context={'command': 'spectrum'},
        )
        self.assertTrue(serializer.is_valid(), serializer.errors)

    def test_job_spec(self):
        serializer = JobSpecSerializer(
            data={'p': 5, 'matrix': [[0, 0], [0, 5]], 'schedule': {'start': 3, 'count': 2}},
            context={'command': 'spectrum'},
        )
        self.assertTrue(serializer.is_valid(), serializer.errors)
        job = serializer.save()
        self.assertEqual(job.digits, job.precision - job.guard_digits)
        self.assertEqual(job.schedule.points(5, 2), [3, 4])
        self.assertEqual(job.tower.p, 5)
        self.assertEqual(job.payload['matrix'], [[0, 0], [0, 5]])


class SchemaTests(SimpleTestCase):
    def setUp(self):
        path = Path(settings.BASE_DIR) / 'schemas' / 'jobspec.schema.json'
        self.schema = json.loads(path.read_text(encoding='utf-8'))

    def resolve(self, node):
        if '$ref' in node:
            return self.schema['$defs'][node['$ref'].rsplit('/', 1)[-1]]
        return node

    def assertMatches(self, node, field, path):
        node = self.resolve(node)
        if isinstance(field, ScalarField):
            self.assertIs(node, self.schema['$defs']['scalar'], path)
        elif isinstance(field, serializers.ListSerializer):
            self.assertEqual(node['type'], 'array', path)
            self.assertMatches(node['items'], field.child, f'{path}[]')
        elif isinstance(field, serializers.Serializer):
            properties = node['properties']
            self.assertEqual(set(properties), set(field.fields), path)
            required = {name for name, child in field.fields.items() if child.required}
            self.assertEqual(set(node.get('required', [])), required, path)
            for name, child in field.fields.items():
                self.assertMatches(properties[name], child, f'{path}.{name}')
        elif isinstance(field, serializers.ListField):
            self.assertEqual(node['type'], 'array', path)
            self.assertEqual(node.get('minItems'), field.min_length, path)
            self.assertMatches(node['items'], field.child, f'{path}[]')
        elif isinstance(field, serializers.ChoiceField):
            self.assertEqual(set(node['enum']), set(field.choices), path)
        elif isinstance(field, serializers.IntegerField):
            self.assertEqual(node['type'], 'integer', path)
            self.assertEqual(node.get('minimum'), field.min_value, path)
            self.assertEqual(node.get('maximum'), field.max_value, path)
        else:
            self.fail(f'{path}: no schema rule for {type(field).__name__}')

    def test_schema_matches_the_serializer(self):
        self.assertMatches(self.schema, JobSpecSerializer(context={'command': 'verify'}), 'job')

    def test_defaults_match(self):
        fields = JobSpecSerializer(context={'command': 'verify'}).fields
        properties = self.schema['properties']
        for name in ('integrand', 'trials'):
            self.assertEqual(properties[name]['default'], fields[name].default)
        self.assertEqual(properties['laws']['properties']['trials']['default'], fields['laws'].fields['trials'].default)


# COMMAND TESTS

class SpectrumCommandTests(JobTestCase):
    def test_diagonal(self):
        code, _, report = self.run_job('spectrum', {'p': 5, 'matrix': [[0, 0], [0, 5]]})
        self.assertEqual(code, 0)
        self.assertEqual(report['status'], 'OK')
        values = [parsed(e['value']) for e in report['results']['eigenvalues']]
        self.assertTrue(values[0].is_zero())
        self.assertTrue(values[1].equals(TOWER.from_rational(5), M))
        self.assertEqual(report['certificates']['residuals'], ['inf', 'inf'])

    def test_eigenvalue_outside_tower(self):
        code, _, report = self.run_job('spectrum', {'p': 3, 'matrix': [[0, -1], [1, 0]]}, '--degree-cap', '1')
        self.assertEqual(code, 3)
        self.assertEqual(report['status'], 'eigenvalue_outside_tower')
        self.assertEqual(report['error']['family'], 'spectrum')
        self.assertEqual(report['job']['degree_cap'], 1)

    def test_invalid_job(self):
        code, _, report = self.run_job('spectrum', {'p': 4, 'matrix': [[1, 2], [3]]})
        self.assertEqual(code, 2)
        self.assertEqual(report['status'], 'invalid')
        self.assertIn('p', report['error']['detail'])
        self.assertIn('matrix', report['error']['detail'])


class CoverCommandTests(JobTestCase):
    def test_build(self):
        code, _, report = self.run_job('cover', {'p': 5, 'points': [0, 5, 1], 's': 0})
        self.assertEqual(code, 0)
        discs = report['results']['cover']
        self.assertEqual(len(discs), 3)
        self.assertEqual({d['radius'] for d in discs}, {2})
        self.assertEqual({d['kind'] for d in discs}, {'closed'})

    def test_refine_and_intersect(self):
        job = {
            'p': 5, 'points': [0, 5], 'candidates': ['1/5', 0], 'radius': 0,
            'intersect': {'centers': [0], 'radius': -1},
        }
        code, _, report = self.run_job('cover', job)
        self.assertEqual(code, 0)
        self.assertEqual(report['results']['kept'], [1])
        self.assertEqual(len(report['results']['members'][0]), 2)
        self.assertEqual(report['results']['nesting'], [[0, 0]])

    def test_overlapping_candidates(self):
        code, _, report = self.run_job('cover', {'p': 5, 'points': [0], 'candidates': [0, 1], 'radius': 0})
        self.assertEqual(code, 2)
        self.assertEqual(report['status'], 'not_disjoint')


class IntegrateCommandTests(JobTestCase):
    def test_constant(self):
        code, _, report = self.run_job('integrate', {'p': 5, 'circle': {'center': 0, 'radius': 0}, 'function': {'polynomial': [7]}})
        self.assertEqual(code, 0)
        integral = report['results']['integral']
        self.assertTrue(parsed(integral['value']).equals(TOWER.from_rational(7), M))
        self.assertEqual(set(integral['trace_norms']), {'0'})
        self.assertEqual(set(integral['trace']), {'inf'})
        self.assertEqual(report['certificates']['oracle_agreement'], 'inf')

    def test_polynomial_stabilizes_past_its_degree(self):
        job = {'p': 5, 'circle': {'center': 1, 'radius': 1}, 'function': {'polynomial': [3, 1, 4, 1]}}
        code, _, report = self.run_job('integrate', job, '--schedule', '4,3')
        self.assertEqual(code, 0)
        integral = report['results']['integral']
        self.assertGreater(integral['schedule'][-1], 3)
        self.assertTrue(parsed(integral['value']).equals(TOWER.from_rational(9), M))

    def test_cauchy_kernel_inside(self):
        job = {
            'p': 5, 'circle': {'center': 0, 'radius': 0},
            'function': {'rational': {'numerator': [0, 1], 'denominator': ['-5', 1]}},
        }
        code, _, report = self.run_job('integrate', job, '--schedule', f'{M + 1},2')
        self.assertEqual(code, 0)
        self.assertTrue(parsed(report['results']['integral']['value']).equals(TOWER.one(), M))

    def test_series_oracle(self):
        job = {'p': 5, 'circle': {'center': 0, 'radius': 0}, 'function': {'series': [['2/3', 1, 5]]}}
        code, _, report = self.run_job('integrate', job)
        self.assertEqual(code, 0)
        agreement = report['certificates']['oracle_agreement']
        self.assertTrue(agreement == 'inf' or agreement >= M)

    def test_resolvent_integrand_gives_the_idempotent(self):
        job = {
            'p': 5, 'circle': {'center': 0, 'radius': 1}, 'function': {'polynomial': [1]},
            'integrand': 'resolvent', 'matrix': [[0, 0], [0, 1]],
        }
        code, _, report = self.run_job('integrate', job, '--schedule', f'{M + 1},2')
        self.assertEqual(code, 0)
        value = report['results']['integral']['value']
        self.assertTrue(parsed(value[0][0]).equals(TOWER.one(), M))
        self.assertTrue(parsed(value[1][1]).equals(TOWER.zero(), M))

    def test_no_stabilization(self):
        job = {'p': 5, 'circle': {'center': 0, 'radius': 0}, 'function': {'polynomial': [0, 0, 1]}}
        code, _, report = self.run_job('integrate', job, '--schedule', '2,2')
        self.assertEqual(code, 4)
        self.assertEqual(report['status'], 'no_stabilization')
        self.assertIn('trace', report['error']['context'])


class FcalcCommandTests(JobTestCase):
    DIAGONAL = {'p': 5, 'matrix': [[0, 0], [0, 5]], 'function': {'indicator': [0]}}

    def test_indicator(self):
        code, _, report = self.run_job('fcalc', self.DIAGONAL)
        self.assertEqual(code, 0)
        value = report['results']['value']
        self.assertTrue(parsed(value[0][0]).equals(TOWER.one(), M))
        for i, j in ((0, 1), (1, 0), (1, 1)):
            self.assertTrue(parsed(value[i][j]).equals(TOWER.zero(), M))
        self.assertEqual(len(report['results']['cover']), 2)
        self.assertEqual(len(report['certificates']['traces']), 2)

    @override_settings(PADIC=QUICK)
    def test_polynomial_with_laws(self):
        job = {
            'p': 5, 'matrix': [[1, 2], [0, 6]], 'function': {'polynomial': [0, 0, 1]}, 's': 0,
            'laws': {'g': {'polynomial': [1, 1]}, 'alpha': 2, 'beta': '1/3', 'trials': 2},
        }
        code, _, report = self.run_job('fcalc', job)
        self.assertEqual(code, 0)
        expected = [[1, 14], [0, 36]]
        value = report['results']['value']
        for i in range(2):
            for j in range(2):
                self.assertTrue(parsed(value[i][j]).equals(TOWER.from_rational(expected[i][j]), M))
        laws = report['certificates']['laws']
        self.assertTrue(laws['holds'])
        self.assertEqual(len(laws['continuity']), 2)

    @override_settings(PADIC=QUICK)
    def test_function_outside_the_spectrum(self):
        job = dict(self.DIAGONAL, cover={'centers': [0], 'radius': 2})
        code, _, report = self.run_job('fcalc', job)
        self.assertEqual(code, 2)
        self.assertEqual(report['status'], 'not_covering')

    @override_settings(PADIC=QUICK)
    def test_inductive_element(self):
        job = {
            'p': 5,
            'inductive': {
                'kind': 'UHF', 'dimensions': [1, 2, 4],
                'levels': [[[1]], [[1, 0], [0, 1]], [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]],
            },
            'function': {'polynomial': [2, 1]},
        }
        code, _, report = self.run_job('fcalc', job)
        self.assertEqual(code, 0)
        self.assertEqual(report['results']['level'], 2)
        self.assertTrue(report['certificates']['converged'])
        self.assertEqual(report['certificates']['trace'], ['inf', 'inf'])
        self.assertTrue(parsed(report['results']['value'][3][3]).equals(TOWER.from_rational(3), M))

    @override_settings(PADIC=QUICK)
    def test_triangular_tower_needs_triangular_levels(self):
        job = {
            'p': 5,
            'inductive': {'kind': 'TUHF', 'dimensions': [2], 'levels': [[[1, 0], [1, 1]]]},
            'function': {'polynomial': [1]},
        }
        code, _, report = self.run_job('fcalc', job)
        self.assertEqual(code, 2)
        self.assertEqual(report['status'], 'shape_violation')


class VerifyCommandTests(JobTestCase):
    def test_axioms(self):
        code, _, report = self.run_job('verify', {'p': 7, 'suites': ['axioms'], 'trials': 200}, '--seed', '11')
        self.assertEqual(code, 0)
        self.assertEqual(report['results']['axioms'], {'trials': 200})
        self.assertEqual(report['certificates']['seed'], 11)

    @override_settings(PADIC=QUICK)
    def test_all_suites_on_a_given_matrix(self):
        job = {'p': 5, 'matrix': [[0, 1], [0, 5]], 'function': {'polynomial': [1, 2, 3]}, 'trials': 2}
        code, _, report = self.run_job('verify', job)
        self.assertEqual(code, 0, report.get('error'))
        self.assertEqual(set(report['results']), {'axioms', 'cover_independence', 'perturbation', 'laws'})
        independence = report['results']['cover_independence']
        for v in independence.values():
            self.assertTrue(v == 'inf' or v >= M)
        self.assertTrue(report['results']['perturbation']['contained'])

    @override_settings(PADIC=QUICK)
    def test_random_fixture_follows_the_seed(self):
        job = {'p': 3, 'suites': ['cover_independence'], 'trials': 1}
        code, first, report = self.run_job('verify', job, '--seed', '5')
        self.assertEqual(code, 0, report.get('error'))
        self.assertEqual(report['status'], 'OK')
        for v in report['results']['cover_independence'].values():
            self.assertTrue(v == 'inf' or v >= M)
        _, again, _ = self.run_job('verify', job, '--seed', '5')
        code, other, _ = self.run_job('verify', job, '--seed', '6')
        self.assertEqual(code, 0)
        self.assertEqual(first, again)
        self.assertNotEqual(first, other)

    @override_settings(PADIC=QUICK)
    def test_indicator_fixture_on_finer_cover(self):
        job = {'p': 5, 'matrix': [[0, 0], [0, 5]], 'function': {'indicator': [0]}, 'suites': ['cover_independence']}
        code, _, report = self.run_job('verify', job)
        self.assertEqual(code, 0, report.get('error'))
        self.assertEqual(report['status'], 'OK')


# REPORT TESTS

class RenderTests(SimpleTestCase):
    def test_reports_go_through_the_json_renderer(self):
        report = reports.build_report('spectrum', {'p': 5, 'b': 1, 'a': 2}, results={'norm': Fraction(1, 25)})
        text = reports.render(report)
        self.assertTrue(text.endswith('}\n'))
        self.assertEqual(json.loads(text)['results']['norm'], '1/25')
        self.assertLess(text.index('"a"'), text.index('"b"'))
        self.assertLess(text.index('"certificates"'), text.index('"command"'))
        rendered = reports.ReportRenderer().render(report, renderer_context={'indent': 2})
        self.assertEqual(text, rendered.decode('utf-8') + '\n')


class DeterminismTests(JobTestCase):
    JOB = {'p': 5, 'matrix': [[0, 0], [0, 5]], 'function': {'polynomial': [1, 1]}, 'seed': 7}

    def test_repeated_runs_are_byte_identical(self):
        texts = {self.run_job('fcalc', self.JOB)[1] for _ in range(3)}
        self.assertEqual(len(texts), 1)

    def test_workers_do_not_change_the_report(self):
        with override_settings(PADIC={'WORKERS': 1}):
            serial = self.run_job('fcalc', self.JOB)[1]
        with override_settings(PADIC={'WORKERS': 3}):
            parallel = self.run_job('fcalc', self.JOB)[1]
        self.assertEqual(serial, parallel)

    def test_echo_revalidates(self):
        for command, job in (
            ('fcalc', self.JOB),
            ('integrate', {'p': 5, 'circle': {'center': 0, 'radius': 0}, 'function': {'polynomial': [7]}}),
            ('spectrum', {'p': 3, 'matrix': [[0, -1], [1, 0]], 'degree_cap': 1}),
        ):
            _, _, report = self.run_job(command, job, '--seed', '3')
            serializer = JobSpecSerializer(data=report['job'], context={'command': report['command']})
            self.assertTrue(serializer.is_valid(), serializer.errors)
            self.assertEqual(report['job']['seed'], 3)
