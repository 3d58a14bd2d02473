"""
Command-line front end to the kernel.

Exit codes: 0 on success, 1 when the answer is negative (Inequal,
NotFound, NotWithinBound), 2 on malformed input.
"""
import random
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from kernel import cl, engine, rewrite
from kernel.exceptions import KernelError
from kernel.rules import check, parse_derivation, parse_judgment, print_derivation, print_judgment
from kernel.semantics import FinSetCwf, interp, print_value, soundness_check
from kernel.services import decide, kernel_call
from kernel.syntax import Sort, is_pure, parse, print_entity

INPUT_ERROR = 2
NEGATIVE = 1


def read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc}", returncode=INPUT_ERROR)


class Command(BaseCommand):
    help = 'Check, normalize, decide, interpret and run the combinatory-logic reduction'

    def add_arguments(self, parser):
        sub = parser.add_subparsers(dest='subcommand', required=True)

        p = sub.add_parser('parse', help='Parse an entity file and print it canonically')
        p.add_argument('file')

        p = sub.add_parser('check', help='Check a derivation file and print its conclusion')
        p.add_argument('file')

        p = sub.add_parser('normalize', help='Normalize an entity')
        p.add_argument('file')
        p.add_argument('--context', help='File holding the context the entity lives in')
        p.add_argument('--seed', type=int, default=settings.CWF_SEED)
        p.add_argument('--emit', action='store_true', help='Print the certificate derivation too')

        p = sub.add_parser('decide', help='Decide the equality of two entities')
        p.add_argument('left')
        p.add_argument('right')
        p.add_argument('--pure', action='store_true', help='Use the pure-fragment decision procedure only')
        p.add_argument('--context', help='File holding the context')
        p.add_argument('--depth', type=int, default=settings.CWF_SEARCH_DEPTH)

        p = sub.add_parser('search', help='Search a derivation of a judgment file')
        p.add_argument('file')
        p.add_argument('--depth', type=int, default=settings.CWF_SEARCH_DEPTH)

        p = sub.add_parser('democratize', help='Build the closed-type presentation of a context')
        p.add_argument('file')

        p = sub.add_parser('interp', help='Interpret an entity in a model')
        p.add_argument('file')
        p.add_argument('--model', choices=['finset'], default='finset')
        p.add_argument('--base-size', type=int, default=settings.CWF_BASE_SIZE)

        p = sub.add_parser('cl-encode', help='Encode a combinatory term over Γ_CL')
        p.add_argument('term')

        convert = sub.add_parser('cl-convert', help='Search a conversion between combinatory terms')
        compile_ = sub.add_parser('cl-compile', help='Compile a conversion into a derivation')
        for p in (convert, compile_):
            p.add_argument('--from', dest='source')
            p.add_argument('--to', dest='target')
            p.add_argument('--bound', type=int, default=settings.CWF_CONVERT_BOUND)
        compile_.add_argument('--trace', help='Trace file to compile instead of searching')

        p = sub.add_parser('demo', help='Encode, convert, compile and check a few combinatory conversions')
        p.add_argument('--bound', type=int, default=settings.CWF_CONVERT_BOUND)

    def handle(self, *args, **options):
        name = options['subcommand'].replace('-', '_')
        try:
            with kernel_call():
                getattr(self, f'run_{name}')(options)
        except KernelError as exc:
            raise CommandError(str(exc), returncode=INPUT_ERROR)

    def emit(self, text: str):
        self.stdout.write(text)

    def negative(self, message: str):
        raise CommandError(message, returncode=NEGATIVE)

    def _context(self, options):
        return parse(read(options['context']), Sort.CTX) if options.get('context') else None

    def run_parse(self, options):
        self.emit(print_entity(parse(read(options['file']))))

    def run_check(self, options):
        d = parse_derivation(read(options['file']))
        check(d)
        self.emit(print_judgment(d.conclusion))

    def run_normalize(self, options):
        entity = parse(read(options['file']))
        ctx = self._context(options)
        if is_pure(entity):
            result = rewrite.normalize_pure(entity, at=ctx, rng=random.Random(options['seed']))
            self.emit(print_entity(result.entity))
            if options['emit']:
                self.emit(print_derivation(result.cert.derivation))
            return
        nf, d = engine.normalize(entity)
        self.emit(print_entity(nf))
        if options['emit']:
            cert = rewrite.Certificate.of(rewrite.place(d, rewrite.resolve_position(entity, ctx)))
            self.emit(print_derivation(cert.derivation))

    def run_decide(self, options):
        left, right = read(options['left']), read(options['right'])
        if options['pure']:
            ctx = self._context(options)
            result = rewrite.decide_pure_eq(parse(left), parse(right), at=ctx)
            if not result:
                self.emit(print_entity(result.left))
                self.emit(print_entity(result.right))
                self.negative('not equal')
            self.emit(print_derivation(result.derivation))
            return
        context = read(options['context']) if options.get('context') else ''
        answer = decide(context, left, right, options['depth'])
        if not answer['equal']:
            if answer['decided']:
                self.emit(answer['left_normal_form'])
                self.emit(answer['right_normal_form'])
                self.negative('not equal')
            self.negative(f"no derivation found within depth {options['depth']}")
        self.emit(answer['derivation'])

    def run_search(self, options):
        goal = parse_judgment(read(options['file']))
        result = rewrite.search_eq(goal, options['depth'])
        if not result:
            self.negative(f"not found at depth {result.depth} after {result.explored} states")
        self.emit(print_derivation(result.derivation))

    def run_democratize(self, options):
        ctx = parse(read(options['file']), Sort.CTX)
        result = rewrite.democratize(ctx)
        self.emit(f"closed {print_entity(result.closed_ty)}")
        self.emit(f"to {print_entity(result.to)}")
        self.emit(f"from {print_entity(result.from_)}")
        for cert in result.certs:
            self.emit(f"checked {print_judgment(cert.target)}")

    def run_interp(self, options):
        entity = parse(read(options['file']))
        model = FinSetCwf(options['base_size'])
        self.emit(print_value(interp(entity, model)))

    def run_cl_encode(self, options):
        self.emit(print_entity(cl.encode(cl.parse_cl(options['term']))))

    def _trace(self, options):
        if options.get('trace'):
            return cl.parse_trace(read(options['trace']))
        if not options['source'] or not options['target']:
            raise CommandError('--from and --to are required', returncode=INPUT_ERROR)
        source, target = cl.parse_cl(options['source']), cl.parse_cl(options['target'])
        trace = cl.convertible(source, target, options['bound'])
        if not trace:
            self.negative(f"not convertible within {options['bound']} steps")
        return trace

    def run_cl_convert(self, options):
        self.emit(cl.print_trace(self._trace(options)))

    def run_cl_compile(self, options):
        cert = cl.compile_trace(self._trace(options))
        self.emit(print_derivation(cert.derivation))

    def run_demo(self, options):
        K, S, App = cl.K, cl.S, cl.App
        pairs = [
            (cl.apps(K, K, S), K),
            (cl.apps(S, K, K, S), S),
            (cl.apps(S, K, S, App(K, S)), App(K, S)),
            (K, S),
        ]
        model = FinSetCwf(1)
        env = cl.cl_environment(model)
        self.emit(f"Γ_CL = {print_entity(cl.gamma_cl())}")
        for source, target in pairs:
            trace = cl.convertible(source, target, options['bound'])
            if not trace:
                self.emit(self.style.WARNING(f"{source} ~ {target}: not within {options['bound']} steps"))
                continue
            cert = cl.compile_trace(trace)
            check(cert.derivation)
            sound = soundness_check(cert.derivation, model, env)
            self.emit(self.style.SUCCESS(
                f"{source} ~ {target}: {len(trace)} steps, derivation checks, "
                f"{'sound' if sound else 'unsound'} in the one-point model"
            ))
