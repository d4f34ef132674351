from apps.jobs.management.base import JobCommand


class Command(JobCommand):
    help = "Seeded verification suites: field axioms, cover independence, perturbation, laws"
    command = 'verify'
