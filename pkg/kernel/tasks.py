"""
Celery tasks for background checking.
"""
import logging
from celery import shared_task

logger = logging.getLogger(__name__)


@shared_task(bind=True, max_retries=3)
def check_derivation_record(self, record_id: int):
    """
    Check a stored derivation and save the verdict on the record.
    """
    from .models import DerivationRecord
    from .services import check_record

    try:
        record = DerivationRecord.objects.get(id=record_id)
    except DerivationRecord.DoesNotExist:
        logger.warning(f"Derivation {record_id} not found, nothing to check")
        return None

    try:
        record = check_record(record)
        return {'id': record.id, 'status': record.status}
    except Exception as exc:
        logger.error(f"Checking derivation {record_id} failed: {exc}")
        raise self.retry(exc=exc, countdown=5)


@shared_task
def check_corpus_directory(path: str):
    """
    Check every derivation file in a directory; returns the summary.
    """
    from . import engine
    from .services import check_directory

    logger.info(f"Starting corpus check of {path}")
    try:
        return check_directory(path)
    finally:
        engine.clear_caches()
