from apps.jobs.management.base import JobCommand


class Command(JobCommand):
    help = "Eigenvalues of a matrix with multiplicities and residual certificates"
    command = 'spectrum'
