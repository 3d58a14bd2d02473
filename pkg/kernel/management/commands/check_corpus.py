"""
Management command to check a directory of derivation files via Celery tasks.
"""
import os
from django.core.management.base import BaseCommand, CommandError
from kernel.tasks import check_corpus_directory


class Command(BaseCommand):
    help = 'Check every *.drv derivation file in a directory, in the background or synchronously'

    def add_arguments(self, parser):
        parser.add_argument(
            'directory',
            type=str,
            help='Directory holding *.drv files'
        )
        parser.add_argument(
            '--sync',
            action='store_true',
            help='Run synchronously instead of via Celery'
        )

    def handle(self, *args, **options):
        directory = options['directory']

        if not os.path.isdir(directory):
            raise CommandError(f'Directory not found: {directory}', returncode=2)

        self.stdout.write(f'Checking derivations in: {directory}')
        if not options['sync']:
            task = check_corpus_directory.delay(directory)
            self.stdout.write(
                self.style.SUCCESS(f'Corpus check task queued: {task.id}')
            )
            return

        summary = check_corpus_directory(directory)
        for name, verdict in summary['results'].items():
            line = f'{name}: {verdict}'
            self.stdout.write(self.style.SUCCESS(line) if verdict == 'ok' else self.style.ERROR(line))
        self.stdout.write(
            f"Checked {summary['checked']}: {summary['accepted']} accepted, {summary['rejected']} rejected"
        )
        if summary['rejected']:
            raise CommandError(f"{summary['rejected']} derivations rejected", returncode=1)
