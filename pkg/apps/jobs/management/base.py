import argparse
import json
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from apps.core.exceptions import EXIT_CODES
from apps.jobs import reports
from apps.jobs.runner import run_job
from apps.jobs.serializers import JobSpecSerializer


def schedule_flag(value):
    try:
        start, count = (int(part) for part in value.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError(f'Expected start,count but got {value!r}.')
    return {'start': start, 'count': count}


class JobCommand(BaseCommand):
    """Reads a JobSpec, runs one job and writes its JSON report.

    Flags override the JobSpec; the exit status follows the error family.
    """
    command = None

    def add_arguments(self, parser):
        parser.add_argument('--input', required=True, help='JobSpec JSON file')
        parser.add_argument('--seed', type=int, help='64-bit seed for randomized checks')
        parser.add_argument('--schedule', type=schedule_flag, help='Shnirelman schedule as start,count')
        parser.add_argument('--degree-cap', type=int, help='Largest unramified extension degree')
        parser.add_argument('--output', help='Report file; stdout when omitted')

    def load(self, path):
        try:
            data = json.loads(Path(path).read_text(encoding='utf-8'))
        except (OSError, ValueError) as exc:
            raise ValidationError({'input': [f'Cannot read a JobSpec from {path}: {exc}']})
        if not isinstance(data, dict):
            raise ValidationError({'input': ['A JobSpec is a JSON object.']})
        return data

    def overrides(self, data, options):
        if options.get('seed') is not None:
            data['seed'] = options['seed']
        if options.get('schedule') is not None:
            data['schedule'] = options['schedule']
        if options.get('degree_cap') is not None:
            data['degree_cap'] = options['degree_cap']
        return data

    def emit(self, report, options):
        text = reports.render(report)
        if options.get('output'):
            Path(options['output']).write_text(text, encoding='utf-8')
        else:
            self.stdout.write(text, ending='')

    def handle(self, *args, **options):
        data = {}
        try:
            data = self.overrides(self.load(options['input']), options)
            serializer = JobSpecSerializer(data=data, context={'command': self.command})
            serializer.is_valid(raise_exception=True)
        except ValidationError as exc:
            self.emit(reports.build_report(self.command, data, error=exc), options)
            self.stderr.write(self.style.ERROR(f'{self.command}: invalid JobSpec'))
            raise CommandError(json.dumps(exc.detail, sort_keys=True), returncode=EXIT_CODES['validation'])

        report = run_job(serializer.save())
        self.emit(report, options)
        code = reports.exit_code(report)
        if code:
            error = report['error']
            self.stderr.write(self.style.ERROR(f"{self.command}: {error['code']} ({error['family']})"))
            raise CommandError(error['detail'], returncode=code)
        status = self.stdout if options.get('output') else self.stderr
        status.write(self.style.SUCCESS(f'{self.command}: OK'))
