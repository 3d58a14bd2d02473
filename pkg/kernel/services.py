"""
Application layer over the kernel: checking stored derivations, deciding
equalities and running CL conversions for the API, tasks and commands.
"""
import logging
from contextlib import contextmanager
from pathlib import Path

from django.utils import timezone

from . import cl, rewrite
from .exceptions import KernelError, RuleError
from .models import ConversionRecord, DerivationRecord
from .rules import check, derivation_size, parse_derivation, print_derivation, print_judgment, rules_used
from .syntax import Sort, is_pure, parse, print_entity, sort_of

logger = logging.getLogger(__name__)

TOO_DEEP = "input nested too deeply to process"


@contextmanager
def kernel_call():
    """Report exhausted recursion on pathological input as a KernelError."""
    try:
        yield
    except RecursionError:
        logger.warning(TOO_DEEP)
        raise KernelError(TOO_DEEP) from None


def check_text(text: str) -> dict:
    """Verdict for a derivation file: accepted with its summary, or the first error."""
    try:
        with kernel_call():
            d = parse_derivation(text)
            check(d)
            summary = {
                'conclusion': print_judgment(d.conclusion),
                'rules_used': sorted(r.value for r in rules_used(d)),
                'size': derivation_size(d),
            }
    except RuleError as exc:
        return {'accepted': False, 'error': str(exc), 'error_path': list(exc.path)}
    except KernelError as exc:
        return {'accepted': False, 'error': str(exc), 'error_path': None}
    return {'accepted': True, **summary}


def check_record(record: DerivationRecord) -> DerivationRecord:
    verdict = check_text(record.text)
    if verdict['accepted']:
        record.status = DerivationRecord.Status.ACCEPTED
        record.conclusion = verdict['conclusion']
        record.rules_used = verdict['rules_used']
        record.size = verdict['size']
        record.error, record.error_path = '', None
        logger.info(f"Derivation {record.id} accepted: {record.conclusion}")
    else:
        record.status = DerivationRecord.Status.REJECTED
        record.error = verdict['error']
        record.error_path = verdict['error_path']
        logger.warning(f"Derivation {record.id} rejected: {record.error}")
    record.checked_at = timezone.now()
    record.save()
    return record


def submit_derivation(text: str) -> DerivationRecord:
    record = DerivationRecord.objects.create(text=text)
    return check_record(record)


@kernel_call()
def decide(context: str, left: str, right: str, depth: int) -> dict:
    """
    Decide `left = right` at the position given by `context`: certified
    normalization for pure entities, bounded search otherwise.
    """
    left_entity, right_entity = parse(left), parse(right)
    ctx = parse(context, Sort.CTX) if context else None
    if sort_of(left_entity) != sort_of(right_entity):
        raise KernelError(f"{left} and {right} are of different sorts")
    if is_pure(left_entity) and is_pure(right_entity):
        result = rewrite.decide_pure_eq(left_entity, right_entity, at=ctx)
        if not result:
            return {
                'equal': False,
                'decided': True,
                'left_normal_form': print_entity(result.left),
                'right_normal_form': print_entity(result.right),
            }
    else:
        at = rewrite.resolve_position(left_entity, ctx) or rewrite.home(left_entity)
        result = rewrite.search_eq(rewrite.judgment(left_entity, right_entity, at), depth)
        if not result:
            return {'equal': False, 'decided': False, 'explored': result.explored, 'reason': result.reason}
    return {
        'equal': True,
        'decided': True,
        'judgment': print_judgment(result.target),
        'derivation': print_derivation(result.derivation),
    }


@kernel_call()
def convert(source: str, target: str, bound: int) -> ConversionRecord:
    """Search a CL conversion and, when found, store its compiled derivation."""
    m, n = cl.parse_cl(source), cl.parse_cl(target)
    trace = cl.convertible(m, n, bound)
    if not trace:
        logger.warning(f"{source} ~ {target} not found within {bound} steps")
        return ConversionRecord.objects.create(
            source=cl.print_cl(m), target=cl.print_cl(n), bound=bound, found=False, explored=trace.explored,
        )
    cert = cl.compile_trace(trace)
    record = submit_derivation(print_derivation(cert.derivation))
    return ConversionRecord.objects.create(
        source=cl.print_cl(m),
        target=cl.print_cl(n),
        bound=bound,
        found=True,
        trace=cl.print_trace(trace),
        derivation=record,
    )


def check_directory(path: str) -> dict:
    """Check every `*.drv` file below `path`; a summary keyed by file name."""
    root = Path(path)
    if not root.is_dir():
        raise FileNotFoundError(f"not a directory: {path}")
    results = {}
    for file in sorted(root.glob('*.drv')):
        verdict = check_text(file.read_text())
        results[file.name] = 'ok' if verdict['accepted'] else verdict['error']
    accepted = sum(1 for v in results.values() if v == 'ok')
    logger.info(f"Checked {len(results)} derivations in {path}: {accepted} accepted")
    return {'checked': len(results), 'accepted': accepted, 'rejected': len(results) - accepted, 'results': results}
