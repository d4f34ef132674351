from apps.jobs.management.base import JobCommand


class Command(JobCommand):
    help = "f(A) for a matrix or an inductive element, with per-disc traces and optional law checks"
    command = 'fcalc'
