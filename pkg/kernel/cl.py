"""
Combinatory logic and its embedding into the calculus: K/S terms and
positioned steps, a bounded convertibility search, the context Γ_CL
axiomatizing the combinators, the encoder, and the compilation of a
conversion trace into a checked equality derivation.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cache

from . import engine
from .exceptions import BadTrace, KernelError, NoRedex, NotAnEncoding, ParseError, PathInvalid, Undefined
from .rewrite import Certificate, compose_eq, congruence_lift, home, place
from .rules import RuleId, mk
from .semantics import CwfModel, interp_ctx
from .syntax import Ap, Base, Cons, Ident, Pi, RawCtx, RawTm, SList, Token, Unit, o_over, read_sexpr, typeof, var

logger = logging.getLogger(__name__)


class CLTerm:
    __slots__ = ()

    def __str__(self):
        return print_cl(self)


@dataclass(frozen=True, repr=False)
class _Combinator(CLTerm):
    name: str

    def __repr__(self):
        return self.name


K = _Combinator('K')
S = _Combinator('S')


@dataclass(frozen=True)
class App(CLTerm):
    fun: CLTerm
    arg: CLTerm


def cl_size(t: CLTerm) -> int:
    if isinstance(t, App):
        return cl_size(t.fun) + cl_size(t.arg)
    return 1


def cl_subterm(t: CLTerm, path: tuple) -> CLTerm:
    for step in path:
        if not isinstance(t, App) or step not in (0, 1):
            raise PathInvalid(f"no child {step} in {t}")
        t = t.fun if step == 0 else t.arg
    return t


def cl_replace(t: CLTerm, path: tuple, new: CLTerm) -> CLTerm:
    if not path:
        return new
    if not isinstance(t, App) or path[0] not in (0, 1):
        raise PathInvalid(f"no child {path[0]} in {t}")
    if path[0] == 0:
        return App(cl_replace(t.fun, path[1:], new), t.arg)
    return App(t.fun, cl_replace(t.arg, path[1:], new))


def cl_paths(t: CLTerm, prefix: tuple = ()):
    """Positions of `t` in pre-order."""
    yield prefix
    if isinstance(t, App):
        yield from cl_paths(t.fun, prefix + (0,))
        yield from cl_paths(t.arg, prefix + (1,))


def apps(*terms: CLTerm) -> CLTerm:
    """Left-associated application."""
    result = terms[0]
    for t in terms[1:]:
        result = App(result, t)
    return result


# Steps and traces

@dataclass(frozen=True)
class Step:
    """
    One axiom use at `path`. A backward K step invents the discarded
    argument, carried as `witness`.
    """
    path: tuple
    axiom: str
    forward: bool = True
    witness: CLTerm | None = None

    def __post_init__(self):
        if self.axiom not in ('k', 's'):
            raise ValueError(f"unknown axiom {self.axiom!r}")


def _k_redex(t: CLTerm):
    if isinstance(t, App) and isinstance(t.fun, App) and t.fun.fun == K:
        return t.fun.arg, t.arg
    return None


def _s_redex(t: CLTerm):
    if isinstance(t, App) and isinstance(t.fun, App) and isinstance(t.fun.fun, App) and t.fun.fun.fun == S:
        return t.fun.fun.arg, t.fun.arg, t.arg
    return None


def _s_contractum(t: CLTerm):
    """(x, y, z) when t is x z (y z)."""
    if isinstance(t, App) and isinstance(t.fun, App) and isinstance(t.arg, App) and t.fun.arg == t.arg.arg:
        return t.fun.fun, t.arg.fun, t.arg.arg
    return None


def axiom_instance(sub: CLTerm, step: Step) -> tuple[CLTerm, CLTerm]:
    """(left side, right side) of the axiom instance the step uses at `sub`."""
    match step.axiom, step.forward:
        case 'k', True:
            found = _k_redex(sub)
            if found is None:
                raise NoRedex(f"no K-redex at {list(step.path)} in {sub}")
            x, y = found
            return sub, x
        case 's', True:
            found = _s_redex(sub)
            if found is None:
                raise NoRedex(f"no S-redex at {list(step.path)} in {sub}")
            x, y, z = found
            return sub, apps(x, z, App(y, z))
        case 'k', False:
            if step.witness is None:
                raise NoRedex(f"backward K step at {list(step.path)} needs the discarded argument")
            return apps(K, sub, step.witness), sub
        case 's', False:
            found = _s_contractum(sub)
            if found is None:
                raise NoRedex(f"{sub} at {list(step.path)} is not of the form x z (y z)")
            x, y, z = found
            return apps(S, x, y, z), sub


def reduce_step(t: CLTerm, step: Step) -> CLTerm:
    sub = cl_subterm(t, step.path)
    left, right = axiom_instance(sub, step)
    return cl_replace(t, step.path, right if step.forward else left)


@dataclass(frozen=True)
class Trace:
    start: CLTerm
    steps: tuple = ()

    @property
    def end(self) -> CLTerm:
        t = self.start
        for step in self.steps:
            t = reduce_step(t, step)
        return t

    def __len__(self):
        return len(self.steps)


@dataclass(frozen=True)
class NotWithinBound:
    source: CLTerm
    target: CLTerm
    bound: int
    explored: int = 0

    def __bool__(self):
        return False


def _reducts(t: CLTerm):
    for path in cl_paths(t):
        sub = cl_subterm(t, path)
        for axiom, redex in (('k', _k_redex), ('s', _s_redex)):
            if redex(sub) is not None:
                step = Step(path, axiom)
                yield step, reduce_step(t, step)


def _backward(before: CLTerm, step: Step) -> Step:
    """The step undoing a forward step taken from `before`."""
    witness = None
    if step.axiom == 'k':
        witness = cl_subterm(before, step.path).arg
    return Step(step.path, step.axiom, False, witness)


def convertible(m: CLTerm, n: CLTerm, bound: int) -> Trace | NotWithinBound:
    """
    Breadth-first from both ends over forward steps until the reduct sets
    meet, at most `bound` steps in total. The trace runs forward from `m`
    to the meeting term, then backward to `n`. Only valley conversions
    m ->> t <<- n are found; a zig-zag through an expansion is reached
    when its peak has a common reduct, which confluence guarantees for
    every conversion but not within the same bound. NotWithinBound is
    no disproof of convertibility.
    """
    if m == n:
        return Trace(m)
    sides = [{m: None}, {n: None}]
    frontiers = [[m], [n]]
    depths = [0, 0]
    explored = 0
    meeting = None
    while meeting is None and depths[0] + depths[1] < bound and (frontiers[0] or frontiers[1]):
        side = 0 if frontiers[0] and (not frontiers[1] or len(frontiers[0]) <= len(frontiers[1])) else 1
        parents, other = sides[side], sides[1 - side]
        following = []
        for t in frontiers[side]:
            explored += 1
            for step, u in _reducts(t):
                if u in parents:
                    continue
                parents[u] = (t, step)
                following.append(u)
                if u in other:
                    meeting = u
                    break
            if meeting is not None:
                break
        frontiers[side] = following
        depths[side] += 1
    if meeting is None:
        logger.info(f"{m} and {n} not convertible within {bound} steps ({explored} terms explored)")
        return NotWithinBound(m, n, bound, explored)

    forward, t = [], meeting
    while sides[0][t] is not None:
        t, step = sides[0][t]
        forward.append(step)
    backward, t = [], meeting
    while sides[1][t] is not None:
        before, step = sides[1][t]
        backward.append(_backward(before, step))
        t = before
    return Trace(m, tuple(forward[::-1] + backward))


# Surface syntax

def print_cl(t: CLTerm) -> str:
    if isinstance(t, App):
        return f"({print_cl(t.fun)} {print_cl(t.arg)})"
    return t.name


def _cl_from_sexpr(form) -> CLTerm:
    if isinstance(form, Token):
        if form.text == 'K':
            return K
        if form.text == 'S':
            return S
        raise ParseError(f"unexpected atom {form.text!r}", form.line, form.column, frozenset({'K', 'S', '('}))
    if len(form.items) < 2:
        raise ParseError('application needs at least two terms', form.line, form.column, frozenset({'K', 'S', '('}))
    return apps(*(_cl_from_sexpr(item) for item in form.items))


def parse_cl(text: str) -> CLTerm:
    return _cl_from_sexpr(read_sexpr(text))


def _int_path(form) -> tuple:
    if not isinstance(form, SList) or not all(isinstance(i, Token) and i.text in ('0', '1') for i in form.items):
        line, column = form.line, form.column
        raise ParseError('a path is a list of 0 and 1', line, column, frozenset({'(', ')', '0', '1'}))
    return tuple(int(i.text) for i in form.items)


def _step_from_sexpr(form) -> Step:
    expected = frozenset({'(step'})
    if not isinstance(form, SList) or not form.items or getattr(form.items[0], 'text', None) != 'step':
        raise ParseError('expected a step', form.line, form.column, expected)
    items = form.items[1:]
    if len(items) not in (3, 4):
        raise ParseError('step takes a path, an axiom, a direction and an optional term', form.line, form.column)
    path, axiom, direction = items[:3]
    if not isinstance(axiom, Token) or axiom.text not in ('k', 's'):
        raise ParseError('unknown axiom', axiom.line, axiom.column, frozenset({'k', 's'}))
    if not isinstance(direction, Token) or direction.text not in ('fwd', 'bwd'):
        raise ParseError('unknown direction', direction.line, direction.column, frozenset({'fwd', 'bwd'}))
    witness = _cl_from_sexpr(items[3]) if len(items) == 4 else None
    return Step(_int_path(path), axiom.text, direction.text == 'fwd', witness)


def parse_trace(text: str) -> Trace:
    form = read_sexpr(text)
    if not isinstance(form, SList) or len(form.items) != 3 or getattr(form.items[0], 'text', None) != 'trace':
        raise ParseError('expected (trace <term> (<step>*))', form.line, form.column, frozenset({'(trace'}))
    _, start, steps = form.items
    if not isinstance(steps, SList):
        raise ParseError('expected a list of steps', steps.line, steps.column, frozenset({'('}))
    return Trace(_cl_from_sexpr(start), tuple(_step_from_sexpr(s) for s in steps.items))


def print_trace(trace: Trace) -> str:
    steps = []
    for step in trace.steps:
        path = '(' + ' '.join(map(str, step.path)) + ')'
        parts = ['step', path, step.axiom, 'fwd' if step.forward else 'bwd']
        if step.witness is not None:
            parts.append(print_cl(step.witness))
        steps.append('(' + ' '.join(parts) + ')')
    return f"(trace {print_cl(trace.start)} ({' '.join(steps)}))"


# The context Γ_CL and the encoding

K_INDEX, S_INDEX, DOT_INDEX, AX_K_INDEX, AX_S_INDEX = 4, 3, 2, 1, 0


def _app(fun: RawTm, arg: RawTm) -> RawTm:
    """Application with annotations read off the normalized type of `fun`."""
    ty, _ = engine.norm_ty(typeof(fun))
    if not isinstance(ty, Pi):
        raise Undefined(f"{fun} does not have a Π-type")
    return Ap(ty.dom, ty.cod, fun, arg)


def _extend(ctx: RawCtx, ty) -> RawCtx:
    nf, _ = engine.norm_ctx(Cons(ctx, ty))
    return nf


@cache
def gamma_cl() -> RawCtx:
    """k : o, s : o, · : o → o → o, ax_k, ax_s, in that order."""
    ctx = _extend(Unit(), Base())
    ctx = _extend(ctx, o_over(ctx))
    cx = Cons(ctx, o_over(ctx))
    binary = Pi(o_over(ctx), Pi(o_over(cx), o_over(Cons(cx, o_over(cx)))))
    ctx = _extend(ctx, binary)

    # ax_k : Πx y. I(k·x·y, x)
    cx = Cons(ctx, o_over(ctx))
    cxy = Cons(cx, o_over(cx))
    k, dot, x, y = var(cxy, 3), var(cxy, 2), var(cxy, 1), var(cxy, 0)
    body = Ident(_app(_app(dot, _app(_app(dot, k), x)), y), x)
    ctx = _extend(ctx, Pi(o_over(ctx), Pi(o_over(cx), body)))

    # ax_s : Πx y z. I(s·x·y·z, x·z·(y·z))
    cx = Cons(ctx, o_over(ctx))
    cxy = Cons(cx, o_over(cx))
    cxyz = Cons(cxy, o_over(cxy))
    s, dot, x, y, z = (var(cxyz, i) for i in (5, 4, 2, 1, 0))

    def ap2(f, a):
        return _app(_app(dot, f), a)

    body = Ident(ap2(ap2(ap2(s, x), y), z), ap2(ap2(x, z), ap2(y, z)))
    ctx = _extend(ctx, Pi(o_over(ctx), Pi(o_over(cx), Pi(o_over(cxy), body))))
    logger.debug(f"built Γ_CL = {ctx}")
    return ctx


def encode(m: CLTerm) -> RawTm:
    ctx = gamma_cl()
    if m == K:
        return var(ctx, K_INDEX)
    if m == S:
        return var(ctx, S_INDEX)
    dot = var(ctx, DOT_INDEX)
    return _app(_app(dot, encode(m.fun)), encode(m.arg))


def _decode(t: RawTm) -> CLTerm:
    ctx = gamma_cl()
    if t == var(ctx, K_INDEX):
        return K
    if t == var(ctx, S_INDEX):
        return S
    if isinstance(t, Ap) and isinstance(t.fun, Ap) and t.fun.fun == var(ctx, DOT_INDEX):
        return App(_decode(t.fun.arg), _decode(t.arg))
    raise NotAnEncoding(f"{t} does not encode a combinatory term")


def decode(t: RawTm) -> CLTerm:
    m = _decode(t)
    if encode(m) != t:
        raise NotAnEncoding(f"{t} carries annotations no encoding has")
    return m


def encoded_path(path: tuple) -> tuple:
    """The raw-term position of a CL position: fun at (2, 3), arg at (3,)."""
    raw = ()
    for step in path:
        raw += (2, 3) if step == 0 else (3,)
    return raw


# Compiling traces

def _axiom_equality(left: CLTerm, right: CLTerm, axiom: str) -> Certificate:
    """Γ_CL ⊢ ⌜left⌝ = ⌜right⌝ for an axiom instance, from ax_k or ax_s."""
    ctx = gamma_cl()
    if axiom == 'k':
        args = _k_redex(left)
        f = var(ctx, AX_K_INDEX)
    else:
        args = _s_redex(left)
        f = var(ctx, AX_S_INDEX)
    for arg in args:
        f = _app(f, encode(arg))
    ty, _ = engine.norm_ty(typeof(f))
    if not isinstance(ty, Ident):
        raise Undefined(f"{f} does not inhabit an identity type")
    reflected = mk(RuleId.I_REFLECTION, [engine.move(engine.wf(f), ctx, ty)])
    lhs, rhs = encode(left), encode(right)
    at = home(lhs)
    d = engine.trans(
        place(engine.eq_tm(lhs, reflected.conclusion.left), at),
        place(reflected, at),
        place(engine.eq_tm(reflected.conclusion.right, rhs), at),
    )
    return Certificate.of(d)


def compile_trace(trace: Trace) -> Certificate:
    """Certificate of Γ_CL ⊢ ⌜start⌝ = ⌜end⌝ : o[⟨⟩]."""
    ctx = gamma_cl()
    at = (ctx, o_over(ctx))
    t = trace.start
    parts, flips = [], []
    try:
        for i, step in enumerate(trace.steps):
            sub = cl_subterm(t, step.path)
            left, right = axiom_instance(sub, step)
            cert = _axiom_equality(left, right, step.axiom)
            after = reduce_step(t, step)
            # lifted from the axiom's left side; backward steps are flipped
            source = cl_replace(t, step.path, left)
            parts.append(congruence_lift(encode(source), encoded_path(step.path), cert))
            flips.append(not step.forward)
            t = after
        if not parts:
            e = encode(t)
            return Certificate.of(place(engine.eq_tm(e, e), at))
        chain = compose_eq(parts, flips)
    except (NoRedex, PathInvalid) as exc:
        raise BadTrace(f"step {len(parts)}: {exc}") from None
    except KernelError as exc:
        logger.error(f"compiling a valid trace failed: {exc}")
        raise
    logger.info(f"compiled a {len(trace)}-step trace into {chain.target}")
    return Certificate.of(place(chain.derivation, at))


def cl_environment(model: CwfModel) -> tuple:
    """(Γ_CL, a point of ⟦Γ_CL⟧) for soundness checks over Γ_CL."""
    ctx = gamma_cl()
    elements = interp_ctx(ctx, model).elements
    if not elements:
        raise Undefined(f"Γ_CL has no points in {model}")
    return ctx, elements[0]
