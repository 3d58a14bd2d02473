"""
Certified equality: the pure-fragment normalizer and decision procedure,
chaining and congruence combinators, bounded proof search using identity
hypotheses, and the democracy construction.

Every Certificate wraps a derivation that has passed `rules.check`.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field

from . import engine
from .exceptions import ChainMismatch, IllFormed, KernelError, NotConvertible, NotPure, PathInvalid
from .rules import CtxEq, Derivation, Judgment, RuleId, SubEq, TmEq, TyEq, check, mk
from .syntax import (
    Ap, Comp, Cons, Empty, Ext, Fst, Id, Ident, Lam, Pair, Pi, Proj, RawCtx, RawEntity, RawSub, RawTm, RawTy,
    Refl, Sigma, Snd, Sort, TmSubst, TySubst, Unit, UnitTy, Var, Zero, children, cod, ctx_entries, ctxof,
    dom, is_pure, lift, replace_at, sort_of, subterm_at, typeof, var,
)

logger = logging.getLogger(__name__)

REWRITE_LIMIT = 10_000


@dataclass(frozen=True)
class Certificate:
    target: Judgment
    derivation: Derivation = field(repr=False, compare=False)

    @classmethod
    def of(cls, d: Derivation) -> 'Certificate':
        check(d)
        return cls(d.conclusion, d)


@dataclass(frozen=True)
class NormalForm:
    entity: RawEntity
    cert: Certificate


@dataclass(frozen=True)
class Inequal:
    left: RawEntity
    right: RawEntity

    def __bool__(self):
        return False


@dataclass(frozen=True)
class NotFound:
    goal: Judgment
    depth: int
    explored: int = 0
    reason: str = ''

    def __bool__(self):
        return False


# Positions

def home(entity: RawEntity) -> tuple:
    """Structural position: () for contexts, (dom, cod), (ctx,) or (ctx, type)."""
    match sort_of(entity):
        case Sort.CTX:
            return ()
        case Sort.SUB:
            return dom(entity), cod(entity)
        case Sort.TY:
            return (ctxof(entity),)
        case Sort.TM:
            ty = typeof(entity)
            return ctxof(ty), ty


def position(j: Judgment) -> tuple:
    match j:
        case CtxEq():
            return ()
        case SubEq(source, _, _, target):
            return source, target
        case TyEq(ctx, _, _):
            return (ctx,)
        case TmEq(ctx, _, _, ty):
            return ctx, ty


def judgment(left: RawEntity, right: RawEntity, at: tuple) -> Judgment:
    match sort_of(left):
        case Sort.CTX:
            return CtxEq(left, right)
        case Sort.SUB:
            return SubEq(at[0], left, right, at[1])
        case Sort.TY:
            return TyEq(at[0], left, right)
        case Sort.TM:
            return TmEq(at[0], left, right, at[1])


def resolve_position(entity: RawEntity, at) -> tuple | None:
    """Accept a full position, a bare context, or None."""
    if at is None or isinstance(at, tuple):
        return at
    if not isinstance(at, RawCtx):
        raise IllFormed(f"not a position: {at!r}")
    match sort_of(entity):
        case Sort.CTX:
            return ()
        case Sort.SUB:
            return at, cod(entity)
        case Sort.TY:
            return (at,)
        case Sort.TM:
            return at, typeof(entity)


def place(d: Derivation, at: tuple | None) -> Derivation:
    if at is None or isinstance(d.conclusion, CtxEq):
        return d
    return engine.move(d, *at)


def _eq(left: RawEntity, right: RawEntity) -> Derivation:
    match sort_of(left):
        case Sort.CTX:
            return engine.eq_ctx(left, right)
        case Sort.SUB:
            return engine.eq_sub(left, right)
        case Sort.TY:
            return engine.eq_ty(left, right)
        case Sort.TM:
            return engine.eq_tm(left, right)


def _require_pure(*entities):
    for e in entities:
        if not is_pure(e):
            raise NotPure(f"{e} mentions I, N₁, Σ or Π")


# Oriented rewriting on raw syntax

def _id_left(e):
    if isinstance(e, Comp) and isinstance(e.outer, Id):
        return e.inner


def _id_right(e):
    if isinstance(e, Comp) and isinstance(e.inner, Id):
        return e.outer


def _proj_beta(e):
    if isinstance(e, Comp) and isinstance(e.outer, Proj) and isinstance(e.inner, Ext) and e.inner.ty == e.outer.ty:
        return e.inner.sub


def _assoc(e):
    if isinstance(e, Comp) and isinstance(e.outer, Comp):
        return Comp(e.outer.outer, Comp(e.outer.inner, e.inner))


def _ext_comp(e):
    if isinstance(e, Comp) and isinstance(e.outer, Ext):
        ext = e.outer
        return Ext(Comp(ext.sub, e.inner), TmSubst(ext.tm, e.inner), ext.ty)


def _empty_comp(e):
    if isinstance(e, Comp) and isinstance(e.outer, Empty):
        return Empty(dom(e.inner))


def _tysub_id(e):
    if isinstance(e, TySubst) and isinstance(e.sub, Id):
        return e.ty


def _tysub_comp(e):
    if isinstance(e, TySubst) and isinstance(e.ty, TySubst):
        return TySubst(e.ty.ty, Comp(e.ty.sub, e.sub))


def _tmsub_id(e):
    if isinstance(e, TmSubst) and isinstance(e.sub, Id):
        return e.tm


def _tmsub_comp(e):
    if isinstance(e, TmSubst) and isinstance(e.tm, TmSubst):
        return TmSubst(e.tm.tm, Comp(e.tm.sub, e.sub))


def _var_beta(e):
    if isinstance(e, TmSubst) and isinstance(e.tm, Var) and isinstance(e.sub, Ext) and e.sub.ty == e.tm.ty:
        return e.sub.tm


# Catalog order: conversion rules left to right, surjective pairing and
# ⟨⟩-uniqueness left to the engine.
SIMPLE_RULES = (
    ('id-left', _id_left),
    ('id-right', _id_right),
    ('proj-beta', _proj_beta),
    ('assoc', _assoc),
    ('ext-comp', _ext_comp),
    ('empty-comp', _empty_comp),
    ('tysub-id', _tysub_id),
    ('tysub-comp', _tysub_comp),
    ('tmsub-id', _tmsub_id),
    ('tmsub-comp', _tmsub_comp),
    ('var-beta', _var_beta),
)


def rewrite_step(entity: RawEntity, order=SIMPLE_RULES) -> tuple | None:
    """Leftmost-innermost redex: (path, rule name, result) or None."""
    for i, child in enumerate(children(entity)):
        found = rewrite_step(child, order)
        if found is not None:
            path, name, result = found
            return (i,) + path, name, result
    for name, rule in order:
        result = rule(entity)
        if result is not None:
            return (), name, result
    return None


def rewrite_sequence(entity: RawEntity, rng: random.Random | None = None) -> list[tuple]:
    """A maximal rewrite sequence as (path, rule name, entity after) triples."""
    steps = []
    current = entity
    for _ in range(REWRITE_LIMIT):
        order = SIMPLE_RULES
        if rng is not None:
            order = list(SIMPLE_RULES)
            rng.shuffle(order)
        found = rewrite_step(current, order)
        if found is None:
            return steps
        path, name, result = found
        current = replace_at(current, path, result)
        steps.append((path, name, current))
    logger.warning(f"rewriting {entity} stopped after {REWRITE_LIMIT} steps")
    return steps


def rewrite_normal_form(entity: RawEntity, rng: random.Random | None = None) -> RawEntity:
    steps = rewrite_sequence(entity, rng)
    return steps[-1][2] if steps else entity


# Pure fragment

def normalize_pure(entity: RawEntity, at=None, rng: random.Random | None = None) -> NormalForm:
    """
    Normal form of a pure entity with a certificate of `entity = normal form`.
    With `rng`, a randomized oriented rewrite pass runs first and the
    certificate goes through its result.
    """
    _require_pure(entity)
    at = resolve_position(entity, at)
    engine.wf(entity)
    try:
        if rng is None:
            nf, d = engine.normalize(entity)
        else:
            reduced = rewrite_normal_form(entity, rng)
            nf, d_reduced = engine.normalize(reduced)
            d = engine.trans(_eq(entity, reduced), place(d_reduced, home(entity)))
        d = place(d, at)
    except NotConvertible as exc:
        raise IllFormed(f"{entity}: {exc}") from None
    return NormalForm(nf, Certificate.of(d))


def decide_pure_eq(left: RawEntity, right: RawEntity, at=None) -> Certificate | Inequal:
    _require_pure(left, right)
    if sort_of(left) != sort_of(right):
        raise IllFormed(f"{left} and {right} are of different sorts")
    at = resolve_position(left, at)
    engine.wf(left)
    engine.wf(right)
    left_nf, _ = engine.normalize(left)
    right_nf, _ = engine.normalize(right)
    if left_nf != right_nf:
        logger.info(f"{left} and {right} differ: {left_nf} vs {right_nf}")
        return Inequal(left_nf, right_nf)
    try:
        d = place(_eq(left, right), at)
    except NotConvertible as exc:
        raise IllFormed(f"{left} and {right} do not share a position: {exc}") from None
    return Certificate.of(d)


# Combinators

def compose_eq(parts: list[Certificate], flips: list[bool] | None = None) -> Certificate:
    """Chain certificates left to right, each reversed where its flag is set."""
    if not parts:
        raise ChainMismatch('nothing to compose')
    flips = flips or [False] * len(parts)
    if len(flips) != len(parts):
        raise ChainMismatch('one direction flag per certificate is required')
    oriented = [engine.sym(c.derivation) if flip else c.derivation for c, flip in zip(parts, flips)]
    result = oriented[0]
    for i, d in enumerate(oriented[1:], start=1):
        before, after = result.conclusion, d.conclusion
        if type(before) is not type(after) or before.right != after.left:
            raise ChainMismatch(f"link {i} starts at {after.left}, previous ends at {before.right}")
        try:
            d = place(d, position(before))
        except (IllFormed, NotConvertible) as exc:
            raise ChainMismatch(f"link {i} sits at another position: {exc}") from None
        result = engine.trans(result, d)
    return Certificate.of(result)


def _cong_child(parent: RawEntity, index: int, d: Derivation) -> Derivation:
    """Equality of `parent` with child `index` replaced, from `d` at the child's home."""
    move, wf = engine.move, engine.wf

    def part(i):
        return d if i == index else wf(children(parent)[i])

    match parent:
        case Cons(ctx, ty):
            return mk(RuleId.CONG_CONS, [part(0), move(part(1), ctx)])
        case Comp(outer, inner):
            return mk(RuleId.CONG_COMP, [move(part(1), dom(inner), dom(outer)), part(0)])
        case Id():
            return mk(RuleId.CONG_ID, [part(0)])
        case Empty():
            return mk(RuleId.CONG_EMPTY, [part(0)])
        case Proj():
            return mk(RuleId.CONG_PROJ, [part(0)])
        case Ext(sub, _, ty):
            source = dom(sub)
            result = mk(RuleId.CONG_EXT, [
                part(2), move(part(0), source, ctxof(ty)), move(part(1), source, TySubst(ty, sub)),
            ])
            return move(result, source, cod(parent))
        case TySubst(ty, sub):
            return mk(RuleId.CONG_TYSUB, [part(0), move(part(1), dom(sub), ctxof(ty))])
        case Ident():
            first = part(0)
            j = first.conclusion
            return mk(RuleId.I_FORM, [first, move(part(1), j.ctx, j.ty)])
        case Sigma(a, _) | Pi(a, _):
            rule = RuleId.SIGMA_FORM if isinstance(parent, Sigma) else RuleId.PI_FORM
            return mk(rule, [part(0), move(part(1), Cons(ctxof(a), a))])
        case TmSubst(_, sub):
            first = part(0)
            return mk(RuleId.CONG_TMSUB, [first, move(part(1), dom(sub), first.conclusion.ctx)])
        case Var():
            return mk(RuleId.CONG_VAR, [part(0)])
        case Refl(tm):
            form = mk(RuleId.I_FORM, [wf(tm), d])
            return engine.retype(mk(RuleId.I_INTRO, [d]), engine.sym(form))
        case Fst(a, c):
            return mk(RuleId.SIGMA_FST, [part(0), move(part(1), ctxof(a), engine.fst_family(a, c))])
        case Snd(a, b, _):
            ctx = ctxof(a)
            return mk(RuleId.SIGMA_SND, [part(0), move(part(1), Cons(ctx, a)), move(part(2), ctx, Sigma(a, b))])
        case Pair(a, b, x, _):
            ctx = ctxof(a)
            return mk(RuleId.SIGMA_PAIR, [
                part(0),
                move(part(1), Cons(ctx, a)),
                move(part(2), ctx, a),
                move(part(3), ctx, TySubst(b, Ext(Id(ctx), x, a))),
            ])
        case Ap(a, b, _, _):
            ctx = ctxof(a)
            return mk(RuleId.PI_AP, [
                part(0), move(part(1), Cons(ctx, a)), move(part(2), ctx, Pi(a, b)), move(part(3), ctx, a),
            ])
        case Lam(a, body):
            inner = part(1)
            return mk(RuleId.PI_LAM, [part(0), move(inner, Cons(ctxof(a), a), typeof(body))])
    raise PathInvalid(f"{parent} has no child {index}")


def lift_derivation(entity: RawEntity, path: tuple, d: Derivation) -> Derivation:
    """Equality of `entity` with the sub-entity at `path` rewritten along `d`."""
    target = subterm_at(entity, path)
    if d.conclusion.left != target:
        raise PathInvalid(f"{d.conclusion.left} is not the sub-entity {target} at {list(path)}")
    d = place(d, home(target))
    for depth in range(len(path) - 1, -1, -1):
        parent = subterm_at(entity, path[:depth])
        d = _cong_child(parent, path[depth], d)
    return d


def congruence_lift(entity: RawEntity, path: tuple, cert: Certificate) -> Certificate:
    try:
        return Certificate.of(lift_derivation(entity, tuple(path), cert.derivation))
    except NotConvertible as exc:
        raise IllFormed(f"cannot lift into {entity}: {exc}") from None


# Bounded search with identity hypotheses

@dataclass(frozen=True)
class Hypothesis:
    """An oriented rewrite lhs → rhs read off a variable of type Π…Π. I(l, r)."""
    variable: RawTm
    binders: int
    lhs: RawTm
    rhs: RawTm
    forward: bool


def _var_index(tm: RawTm) -> int | None:
    n = 0
    while isinstance(tm, TmSubst) and isinstance(tm.sub, Proj):
        tm, n = tm.tm, n + 1
    return n if isinstance(tm, Var) else None


def _is_zero(tm: RawTm) -> bool:
    return isinstance(tm, Zero) or (isinstance(tm, TmSubst) and isinstance(tm.tm, Zero))


def _pattern_vars(tm: RawTm, binders: int) -> set:
    i = _var_index(tm)
    if i is not None:
        return {i} if i < binders else set()
    found = set()
    for child in children(tm):
        if isinstance(child, RawTm) and not isinstance(tm, Lam):
            found |= _pattern_vars(child, binders)
    return found


def harvest(ctx: RawCtx) -> list[Hypothesis]:
    """Rewrites contributed by the identity-typed variables of a normal context."""
    found = []
    for i in range(len(ctx_entries(ctx))):
        v = var(ctx, i)
        try:
            ty, _ = engine.norm_ty(typeof(v))
        except KernelError:
            continue
        binders = 0
        while isinstance(ty, Pi):
            ty, binders = ty.cod, binders + 1
        if not isinstance(ty, Ident):
            continue
        everything = set(range(binders))
        for lhs, rhs, forward in ((ty.left, ty.right, True), (ty.right, ty.left, False)):
            head = _var_index(lhs)
            if head is not None and head < binders:
                continue
            if _pattern_vars(lhs, binders) >= everything:
                found.append(Hypothesis(v, binders, lhs, rhs, forward))
    return found


def _match(pattern: RawTm, tm: RawTm, binders: int, bound: dict) -> bool:
    i = _var_index(pattern)
    if i is not None:
        if i >= binders:
            return _var_index(tm) == i - binders
        if i in bound:
            return bound[i] == tm
        bound[i] = tm
        return True
    if _is_zero(pattern):
        return _is_zero(tm)
    if type(pattern) is not type(tm) or isinstance(pattern, (Lam, TmSubst)):
        return False
    return all(
        _match(p, t, binders, bound)
        for p, t in zip(children(pattern), children(tm))
        if isinstance(p, RawTm)
    )


def _instantiate(hyp: Hypothesis, bound: dict) -> Derivation:
    """TmEq(Γ, l', r', _) from the hypothesis applied to the matched terms."""
    f = hyp.variable
    for k in range(hyp.binders):
        fty, _ = engine.norm_ty(typeof(f))
        f = Ap(fty.dom, fty.cod, f, bound[hyp.binders - 1 - k])
    ty, _ = engine.norm_ty(typeof(f))
    if not isinstance(ty, Ident):
        raise IllFormed(f"{f} does not inhabit an identity type")
    d = engine.move(engine.wf(f), ctxof(ty), ty)
    step = mk(RuleId.I_REFLECTION, [d])
    return step if hyp.forward else engine.sym(step)


def _term_paths(entity: RawEntity, prefix: tuple = ()):
    """Paths to terms in the entity's own context, pre-order."""
    if isinstance(entity, RawTm):
        yield prefix
        if _var_index(entity) is not None or isinstance(entity, (Lam, TmSubst)):
            return
        for i, child in enumerate(children(entity)):
            if isinstance(child, RawTm):
                yield from _term_paths(child, prefix + (i,))
    elif isinstance(entity, Ident):
        yield from _term_paths(entity.left, prefix + (0,))
        yield from _term_paths(entity.right, prefix + (1,))
    elif isinstance(entity, (Sigma, Pi)):
        yield from _term_paths(entity.dom, prefix + (0,))


def _rewrites(side: RawEntity, hypotheses: list[Hypothesis]):
    for path in _term_paths(side):
        sub = subterm_at(side, path)
        for hyp in hypotheses:
            bound = {}
            if not _match(hyp.lhs, sub, hyp.binders, bound) or len(bound) < hyp.binders:
                continue
            try:
                step = _instantiate(hyp, bound)
                if step.conclusion.left != sub:
                    step = engine.trans(engine.eq_tm(sub, step.conclusion.left), place(step, home(sub)))
                lifted = lift_derivation(side, path, step)
                new, d_new = engine.normalize(lifted.conclusion.right)
                yield new, engine.trans(lifted, place(d_new, position(lifted.conclusion)))
            except KernelError as exc:
                logger.debug(f"skipping rewrite at {list(path)}: {exc}")


def search_eq(goal: Judgment, depth: int) -> Certificate | NotFound:
    """
    Look for a derivation of `goal`: normalize both sides, then rewrite
    them breadth-first with the context's identity hypotheses, at most
    depth - 1 rewrites in total. NotFound is not a proof of inequality.
    """
    if depth < 1:
        return NotFound(goal, depth, reason='depth exhausted')
    at = position(goal)
    try:
        left, d_left = engine.normalize(goal.left)
        right, d_right = engine.normalize(goal.right)
        d_left, d_right = place(d_left, at), place(d_right, at)
        ctx = at[0] if at else Unit()
        ctx_nf, _ = engine.norm_ctx(ctx)
    except KernelError as exc:
        return NotFound(goal, depth, reason=str(exc))
    hypotheses = harvest(ctx_nf) if isinstance(goal, (TmEq, TyEq)) else []

    frontier = [(left, d_left, right, d_right)]
    seen = {(left, right)}
    explored = 0
    for level in range(depth):
        following = []
        for left, d_left, right, d_right in frontier:
            explored += 1
            try:
                middle = place(engine.equate(judgment(left, right, home(left))), at)
                d = engine.trans(d_left, middle, engine.sym(d_right))
                logger.info(f"search_eq found {goal} after {level} rewrites")
                return Certificate.of(d)
            except KernelError:
                pass
            if level == depth - 1:
                continue
            for new, step in _rewrites(left, hypotheses):
                if (new, right) not in seen:
                    seen.add((new, right))
                    following.append((new, engine.trans(d_left, place(step, at)), right, d_right))
            for new, step in _rewrites(right, hypotheses):
                if (left, new) not in seen:
                    seen.add((left, new))
                    following.append((left, d_left, new, engine.trans(d_right, place(step, at))))
        frontier = following
        if not frontier:
            break
    logger.warning(f"search_eq gave up on {goal} at depth {depth} after {explored} states")
    return NotFound(goal, depth, explored)


# Democracy

@dataclass(frozen=True)
class Democracy:
    closed_ty: RawTy
    to: RawSub
    from_: RawSub
    certs: tuple


def _encoding(ctx: RawCtx) -> tuple:
    """(closed type Γ̄, term of Γ̄[⟨⟩_Γ] in Γ, from : 1.Γ̄ → Γ)."""
    if isinstance(ctx, Unit):
        return UnitTy(), Zero(), Empty(Cons(Unit(), UnitTy()))
    parent, a_ty = ctx.parent, ctx.ty
    closed, code, back = _encoding(parent)
    moved = TySubst(a_ty, back)
    sigma = Sigma(closed, moved)
    # from_{Γ.A} = ⟨from_Γ ∘ ⟨⟨⟩, fst q⟩, snd q⟩_A over 1.Σ
    p = Proj(sigma)
    q = Var(sigma)
    first = Fst(TySubst(closed, p), q)
    second = Snd(TySubst(closed, p), TySubst(moved, lift(p, closed, checked=False)), q)
    head = Ext(Empty(Cons(Unit(), sigma)), first, closed)
    from_ = Ext(Comp(back, head), second, a_ty)
    # code_{Γ.A} = pair(Γ̄[⟨⟩], Ā[⟨⟩↑Γ̄], code_Γ[p_A], q_A)
    bang = Empty(ctx)
    pair = Pair(
        TySubst(closed, bang),
        TySubst(moved, lift(bang, closed, checked=False)),
        TmSubst(code, Proj(a_ty)),
        Var(a_ty),
    )
    return sigma, pair, from_


def democratize(ctx: RawCtx) -> Democracy:
    """
    Γ ≅ 1.Γ̄: the closed type Γ̄, both maps and four certificates, namely
    the typings of `to` and `from_` and the two round trips.
    """
    engine.wf(ctx)
    closed, code, from_ = _encoding(ctx)
    to = Ext(Empty(ctx), code, closed)
    extended = Cons(Unit(), closed)
    try:
        to_wf = engine.move(engine.wf(to), ctx, extended)
        from_wf = engine.move(engine.wf(from_), extended, ctx)
        section = engine.move(engine.eq_sub(Comp(from_, to), Id(ctx)), ctx, ctx)
        retraction = engine.move(engine.eq_sub(Comp(to, from_), Id(extended)), extended, extended)
    except NotConvertible as exc:
        raise IllFormed(f"democracy fails for {ctx}: {exc}") from None
    certs = tuple(Certificate.of(d) for d in (to_wf, from_wf, section, retraction))
    logger.info(f"democratized {ctx} as {closed}")
    return Democracy(closed, to, from_, certs)
