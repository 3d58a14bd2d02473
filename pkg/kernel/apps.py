import sys

from django.apps import AppConfig
from django.conf import settings


class KernelConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'kernel'
    verbose_name = 'cwf proof-checking kernel'

    def ready(self):
        from . import engine

        engine.set_cache_size(getattr(settings, 'CWF_CACHE_SIZE', 1 << 15))
        # Derivations nest as deep as the normalizer recursed; the reader caps input nesting well below this.
        limit = getattr(settings, 'CWF_RECURSION_LIMIT', 10000)
        if sys.getrecursionlimit() < limit:
            sys.setrecursionlimit(limit)
