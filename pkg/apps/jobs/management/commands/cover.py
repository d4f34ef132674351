from apps.jobs.management.base import JobCommand


class Command(JobCommand):
    help = "Disjoint disc cover of a finite point set, built or refined from candidates"
    command = 'cover'
