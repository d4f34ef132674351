from apps.jobs.management.base import JobCommand


class Command(JobCommand):
    help = "Shnirelman integral of a function spec over a circle, with its stabilization trace"
    command = 'integrate'
