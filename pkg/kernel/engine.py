"""
Derivation-producing machinery: well-formedness derivations, moving
judgments between convertible indices, and a normalizer that returns a
derivation of `entity = normal form` with every result.

Every derivation built here concludes at the structural position of its
left-hand entity (ctxof/typeof/dom/cod) unless stated otherwise.

Normal forms over a normal context Γ:
  types    o and N₁ over 1, o[⟨⟩_Γ] and N₁[⟨⟩_Γ] otherwise, I(a, b), Σ(A, B), Π(A, B)
  subs     ⟨⟩_Γ into 1, ⟨σ, a⟩_A into Δ.A
  terms    variables q[p]…[p], neutral fst/snd/ap, 0₁ or 0₁[⟨⟩_Γ], r(a),
           pair(A, B, a, b), λ(A, b)
Terms are β-normal; η for N₁, I, Σ and Π is applied when two normal terms
are compared (`equate`).
"""
from __future__ import annotations

import functools
import logging
import threading
from collections import OrderedDict

from .exceptions import IllFormed, KernelError, NotConvertible, Undefined
from .rules import CtxEq, Derivation, RuleId, SubEq, TmEq, TyEq, mk
from .syntax import (
    Ap, Base, Comp, Cons, Empty, Ext, Fst, Id, Ident, Lam, Pair, Pi, Proj, RawCtx, RawSub, RawTm, RawTy,
    Refl, Sigma, Snd, TmSubst, TySubst, Unit, UnitTy, Var, Zero, cod, ctxof, dom, lift, typeof,
)

logger = logging.getLogger(__name__)

_CACHES: list = []
_CACHE_SIZE = 1 << 15
_local = threading.local()


def _in_progress() -> set:
    try:
        return _local.active
    except AttributeError:
        _local.active = set()
        return _local.active


def _memo(fn):
    """
    Bounded LRU cache by argument, shared between threads. Re-entering a
    computation in progress on the same thread is a cycle.
    """
    cache: OrderedDict = OrderedDict()
    lock = threading.Lock()

    @functools.wraps(fn)
    def wrapper(*args):
        with lock:
            if args in cache:
                cache.move_to_end(args)
                return cache[args]
        key = (fn, args)
        active = _in_progress()
        if key in active:
            raise IllFormed(f"{fn.__name__} re-entered on {', '.join(str(a) for a in args)}")
        active.add(key)
        try:
            result = fn(*args)
        finally:
            active.discard(key)
        with lock:
            cache[args] = result
            if len(cache) > _CACHE_SIZE:
                cache.popitem(last=False)
        return result

    _CACHES.append((cache, lock))
    return wrapper


def clear_caches():
    for cache, lock in _CACHES:
        with lock:
            cache.clear()


def set_cache_size(size: int):
    """Entries kept per memoized function; larger caches are trimmed oldest first."""
    global _CACHE_SIZE
    if size < 1:
        raise ValueError('cache size must be positive')
    _CACHE_SIZE = size
    for cache, lock in _CACHES:
        with lock:
            while len(cache) > size:
                cache.popitem(last=False)


# Combinators

_TRANS = {CtxEq: RuleId.TRANS_CTX, SubEq: RuleId.TRANS_SUB, TyEq: RuleId.TRANS_TY, TmEq: RuleId.TRANS_TM}
_SYM = {CtxEq: RuleId.SYM_CTX, SubEq: RuleId.SYM_SUB, TyEq: RuleId.SYM_TY, TmEq: RuleId.SYM_TM}


def _same_position(a, b) -> bool:
    match a:
        case CtxEq():
            return True
        case SubEq(source, _, _, target):
            return source == b.source and target == b.target
        case TyEq(ctx, _, _):
            return ctx == b.ctx
        case TmEq(ctx, _, _, ty):
            return ctx == b.ctx and ty == b.ty


def trans(*ds: Derivation) -> Derivation:
    """Chain derivations left to right; reflexive links are dropped."""
    result = ds[0]
    for d in ds[1:]:
        left, right = result.conclusion, d.conclusion
        if right.left == right.right and _same_position(left, right):
            continue
        if left.left == left.right and _same_position(left, right):
            result = d
            continue
        result = mk(_TRANS[type(left)], [result, d])
    return result


def sym(d: Derivation) -> Derivation:
    j = d.conclusion
    if j.left == j.right:
        return d
    if d.rule in _SYM.values():
        return d.premises[0]
    return mk(_SYM[type(j)], [d])


def retype(d: Derivation, e: Derivation) -> Derivation:
    """Move a term equality along a type equality at the same context."""
    if e.conclusion.left == e.conclusion.right:
        return d
    return mk(RuleId.PRES_TM, [wf_ctx(d.conclusion.ctx), e, d])


# Generic moves

def at_ctx(d: Derivation, ctx: RawCtx) -> Derivation:
    """Re-index a type equality to a convertible context."""
    if d.conclusion.ctx == ctx:
        return d
    return mk(RuleId.PRES_TY, [eq_ctx(d.conclusion.ctx, ctx), d])


def at_sub(d: Derivation, source: RawCtx, target: RawCtx) -> Derivation:
    j = d.conclusion
    if j.source == source and j.target == target:
        return d
    return mk(RuleId.PRES_SUB, [eq_ctx(j.source, source), eq_ctx(j.target, target), d])


def at_tm(d: Derivation, ctx: RawCtx, ty: RawTy) -> Derivation:
    j = d.conclusion
    if j.ctx == ctx and j.ty == ty:
        return d
    return mk(RuleId.PRES_TM, [eq_ctx(j.ctx, ctx), at_ctx(eq_ty(j.ty, ty), j.ctx), d])


def move(d: Derivation, ctx: RawCtx, ty_or_target: RawTy | RawCtx | None = None) -> Derivation:
    """
    Re-index `d` to the given context (and type for term judgments, or
    codomain for substitution judgments) through the preservation rules.
    """
    try:
        match d.conclusion:
            case CtxEq():
                return d
            case TyEq():
                return at_ctx(d, ctx)
            case SubEq(_, _, _, target):
                return at_sub(d, ctx, ty_or_target if ty_or_target is not None else target)
            case TmEq(_, _, _, ty):
                return at_tm(d, ctx, ty_or_target if ty_or_target is not None else ty)
    except NotConvertible as exc:
        raise IllFormed(f"cannot move derivation: {exc}") from None


# Well-formedness

def wf(entity) -> Derivation:
    """Reflexive derivation at the structural position of `entity`."""
    try:
        match entity:
            case RawCtx():
                return wf_ctx(entity)
            case RawSub():
                return wf_sub(entity)
            case RawTy():
                return wf_ty(entity)
            case RawTm():
                return wf_tm(entity)
    except (NotConvertible, Undefined) as exc:
        raise IllFormed(f"{entity} is not well-formed: {exc}") from None
    except KernelError as exc:
        if isinstance(exc, IllFormed):
            raise
        raise IllFormed(f"{entity} is not well-formed: {exc}") from None
    raise IllFormed(f"not a raw entity: {entity!r}")


@_memo
def wf_ctx(ctx: RawCtx) -> Derivation:
    match ctx:
        case Unit():
            return mk(RuleId.CONG_UNIT)
        case Cons(parent, ty):
            return mk(RuleId.CONG_CONS, [wf_ctx(parent), at_ctx(wf_ty(ty), parent)])
    raise IllFormed(f"not a context: {ctx!r}")


@_memo
def wf_ty(ty: RawTy) -> Derivation:
    match ty:
        case Base():
            return mk(RuleId.BASE_TYPE)
        case UnitTy():
            return mk(RuleId.N1_FORM)
        case TySubst(inner, sub):
            return mk(RuleId.CONG_TYSUB, [wf_ty(inner), at_sub(wf_sub(sub), dom(sub), ctxof(inner))])
        case Ident(left, right):
            d = wf_tm(left)
            j = d.conclusion
            return mk(RuleId.I_FORM, [d, at_tm(wf_tm(right), j.ctx, j.ty)])
        case Sigma(a, b) | Pi(a, b):
            rule = RuleId.SIGMA_FORM if isinstance(ty, Sigma) else RuleId.PI_FORM
            return mk(rule, [wf_ty(a), at_ctx(wf_ty(b), Cons(ctxof(a), a))])
    raise IllFormed(f"not a type: {ty!r}")


@_memo
def _ext_parts(sub: Ext) -> tuple:
    """Premises of cong-ext for ⟨γ, a⟩_A at exact positions."""
    inner, tm, a_ty = sub.sub, sub.tm, sub.ty
    da = wf_ty(a_ty)
    ds = at_sub(wf_sub(inner), dom(inner), ctxof(a_ty))
    dt = at_tm(wf_tm(tm), dom(inner), TySubst(a_ty, inner))
    return da, ds, dt


@_memo
def wf_sub(sub: RawSub) -> Derivation:
    match sub:
        case Comp(outer, inner):
            d_inner = at_sub(wf_sub(inner), dom(inner), dom(outer))
            return mk(RuleId.CONG_COMP, [d_inner, wf_sub(outer)])
        case Id(ctx):
            return mk(RuleId.CONG_ID, [wf_ctx(ctx)])
        case Empty(ctx):
            return mk(RuleId.CONG_EMPTY, [wf_ctx(ctx)])
        case Proj(ty):
            return mk(RuleId.CONG_PROJ, [wf_ty(ty)])
        case Ext():
            d = mk(RuleId.CONG_EXT, list(_ext_parts(sub)))
            return at_sub(d, dom(sub), cod(sub))
    raise IllFormed(f"not a substitution: {sub!r}")


@_memo
def fst_family(a_ty: RawTy, pair_tm: RawTm) -> RawTy:
    """Σ(A, B) at which `pair_tm` is typed when projecting with annotation A."""
    normal, _ = norm_ty(typeof(pair_tm))
    if not isinstance(normal, Sigma):
        raise IllFormed(f"{pair_tm} does not have a Σ-type")
    return Sigma(a_ty, normal.cod)


@_memo
def wf_tm(tm: RawTm) -> Derivation:
    match tm:
        case TmSubst(inner, sub):
            d = wf_tm(inner)
            return mk(RuleId.CONG_TMSUB, [d, at_sub(wf_sub(sub), dom(sub), d.conclusion.ctx)])
        case Var(ty):
            return mk(RuleId.CONG_VAR, [wf_ty(ty)])
        case Refl(inner):
            return mk(RuleId.I_INTRO, [wf_tm(inner)])
        case Zero():
            return mk(RuleId.N1_INTRO)
        case Fst(a, c):
            ctx = ctxof(a)
            return mk(RuleId.SIGMA_FST, [wf_ty(a), at_tm(wf_tm(c), ctx, fst_family(a, c))])
        case Snd(a, b, c):
            ctx = ctxof(a)
            return mk(RuleId.SIGMA_SND, [
                wf_ty(a), at_ctx(wf_ty(b), Cons(ctx, a)), at_tm(wf_tm(c), ctx, Sigma(a, b)),
            ])
        case Pair(a, b, x, y):
            ctx = ctxof(a)
            return mk(RuleId.SIGMA_PAIR, [
                wf_ty(a),
                at_ctx(wf_ty(b), Cons(ctx, a)),
                at_tm(wf_tm(x), ctx, a),
                at_tm(wf_tm(y), ctx, TySubst(b, Ext(Id(ctx), x, a))),
            ])
        case Ap(a, b, c, x):
            ctx = ctxof(a)
            return mk(RuleId.PI_AP, [
                wf_ty(a),
                at_ctx(wf_ty(b), Cons(ctx, a)),
                at_tm(wf_tm(c), ctx, Pi(a, b)),
                at_tm(wf_tm(x), ctx, a),
            ])
        case Lam(a, body):
            inner = wf_tm(body)
            return mk(RuleId.PI_LAM, [wf_ty(a), at_tm(inner, Cons(ctxof(a), a), inner.conclusion.ty)])
    raise IllFormed(f"not a term: {tm!r}")


# Equality of convertible entities

@_memo
def eq_ctx(left: RawCtx, right: RawCtx) -> Derivation:
    if left == right:
        return wf_ctx(left)
    ln, dl = norm_ctx(left)
    rn, dr = norm_ctx(right)
    if ln != rn:
        raise NotConvertible(f"contexts {left} and {right} have normal forms {ln} and {rn}")
    return trans(dl, sym(dr))


@_memo
def eq_ty(left: RawTy, right: RawTy) -> Derivation:
    """TyEq(ctxof left, left, right)."""
    if left == right:
        return wf_ty(left)
    ln, dl = norm_ty(left)
    rn, dr = norm_ty(right)
    if ln != rn:
        raise NotConvertible(f"types {left} and {right} have normal forms {ln} and {rn}")
    return trans(dl, at_ctx(sym(dr), ctxof(left)))


@_memo
def eq_sub(left: RawSub, right: RawSub) -> Derivation:
    """SubEq(dom left, left, right, cod left), comparing tuple components up to η."""
    if left == right:
        return wf_sub(left)
    ln, dl = norm_sub(left)
    rn, dr = norm_sub(right)
    back = at_sub(sym(dr), dom(left), cod(left))
    middle = at_sub(conv_sub(ln, rn), dom(left), cod(left))
    return trans(dl, middle, back)


@_memo
def eq_tm(left: RawTm, right: RawTm) -> Derivation:
    """TmEq(home of left, left, right, typeof left), up to β and η."""
    if left == right:
        return wf_tm(left)
    ln, dl = norm_tm(left)
    rn, dr = norm_tm(right)
    j = dl.conclusion
    back = at_tm(sym(dr), j.ctx, j.ty)
    return trans(dl, conv_tm(ln, rn, j.ctx, j.ty), back)


def equate(judgment) -> Derivation:
    """Derivation of `judgment` when both sides are convertible without hypotheses."""
    try:
        match judgment:
            case CtxEq(left, right):
                return eq_ctx(left, right)
            case TyEq(ctx, left, right):
                return at_ctx(eq_ty(left, right), ctx)
            case SubEq(source, left, right, target):
                return at_sub(eq_sub(left, right), source, target)
            case TmEq(ctx, left, right, ty):
                return at_tm(eq_tm(left, right), ctx, ty)
    except (IllFormed, Undefined) as exc:
        raise NotConvertible(f"{judgment}: {exc}") from None
    raise TypeError(f"not a judgment: {judgment!r}")


def normalize(entity):
    """(normal form, derivation of entity = normal form)."""
    match entity:
        case RawCtx():
            return norm_ctx(entity)
        case RawSub():
            return norm_sub(entity)
        case RawTy():
            return norm_ty(entity)
        case RawTm():
            return norm_tm(entity)
    raise IllFormed(f"not a raw entity: {entity!r}")


# Closed types o and N₁

def _is_closed(ty: RawTy) -> bool:
    if isinstance(ty, (Base, UnitTy)):
        return True
    return isinstance(ty, TySubst) and isinstance(ty.ty, (Base, UnitTy)) and isinstance(ty.sub, Empty)


def _closed_at(kind: RawTy, ctx: RawCtx) -> RawTy:
    return kind if isinstance(ctx, Unit) else TySubst(kind, Empty(ctx))


@_memo
def _unit_id_empty() -> Derivation:
    """id_1 = ⟨⟩_1"""
    return mk(RuleId.EMPTY_UNIQUE, [mk(RuleId.CONG_ID, [mk(RuleId.CONG_UNIT)])])


@_memo
def _drop_unit(kind: RawTy) -> Derivation:
    """K[⟨⟩_1] = K over 1"""
    wk = wf_ty(kind)
    return trans(mk(RuleId.CONG_TYSUB, [wk, sym(_unit_id_empty())]), mk(RuleId.TYSUB_ID, [wk]))


def _shift_closed(nf_ty: RawTy, d_sub: Derivation) -> tuple:
    """Push γ (given by its reflexive derivation) into a closed normal type."""
    delta = d_sub.conclusion.source
    kind = nf_ty if isinstance(nf_ty, (Base, UnitTy)) else nf_ty.ty
    wk = wf_ty(kind)
    delta_nf, d_delta = norm_ctx(delta)
    if nf_ty is kind:
        to_empty = trans(mk(RuleId.EMPTY_UNIQUE, [d_sub]), mk(RuleId.CONG_EMPTY, [d_delta]))
        step = mk(RuleId.CONG_TYSUB, [wk, to_empty])
    else:
        we = wf_sub(nf_ty.sub)
        flat = mk(RuleId.TYSUB_COMP, [wk, we, d_sub])
        to_empty = trans(
            mk(RuleId.EMPTY_UNIQUE, [mk(RuleId.CONG_COMP, [d_sub, we])]),
            mk(RuleId.CONG_EMPTY, [d_delta]),
        )
        step = trans(sym(flat), mk(RuleId.CONG_TYSUB, [wk, to_empty]))
    if isinstance(delta_nf, Unit):
        step = trans(step, _drop_unit(kind))
    return _closed_at(kind, delta_nf), step


# Normalization

@_memo
def norm_ctx(ctx: RawCtx) -> tuple:
    match ctx:
        case Unit():
            return ctx, mk(RuleId.CONG_UNIT)
        case Cons(parent, ty):
            parent_nf, d_parent = norm_ctx(parent)
            ty_nf, d_ty = norm_ty(ty)
            return Cons(parent_nf, ty_nf), mk(RuleId.CONG_CONS, [d_parent, at_ctx(d_ty, parent)])
    raise IllFormed(f"not a context: {ctx!r}")


@_memo
def norm_ty(ty: RawTy) -> tuple:
    match ty:
        case Base() | UnitTy():
            return ty, wf_ty(ty)
        case TySubst(inner, sub):
            inner_nf, d_inner = norm_ty(inner)
            source = dom(sub)
            step = mk(RuleId.CONG_TYSUB, [d_inner, at_sub(wf_sub(sub), source, ctxof(inner))])
            if _is_closed(inner_nf):
                nf, d = _shift_closed(inner_nf, at_sub(wf_sub(sub), source, ctxof(inner_nf)))
                return nf, trans(step, d)
            sub_nf, d_sub = norm_sub(sub)
            d_sub = at_sub(d_sub, source, ctxof(inner_nf))
            to_nf_sub = mk(RuleId.CONG_TYSUB, [wf_ty(inner_nf), d_sub])
            nf, d = sub_ty(inner_nf, sub_nf)
            return nf, trans(step, to_nf_sub, at_ctx(d, source))
        case Ident(left, right):
            left_nf, d_left = norm_tm(left)
            j = d_left.conclusion
            right_nf, d_right = norm_tm(right)
            return Ident(left_nf, right_nf), mk(RuleId.I_FORM, [d_left, at_tm(d_right, j.ctx, j.ty)])
        case Sigma(a, b) | Pi(a, b):
            rule = RuleId.SIGMA_FORM if isinstance(ty, Sigma) else RuleId.PI_FORM
            a_nf, d_a = norm_ty(a)
            b_nf, d_b = norm_ty(b)
            return type(ty)(a_nf, b_nf), mk(rule, [d_a, at_ctx(d_b, Cons(ctxof(a), a))])
    raise IllFormed(f"not a type: {ty!r}")


@_memo
def sub_ty(ty: RawTy, sub: RawSub) -> tuple:
    """Push a normal substitution into a normal type: TyEq(dom sub, ty[sub], nf)."""
    d_sub = wf_sub(sub)
    if _is_closed(ty):
        return _shift_closed(ty, d_sub)
    match ty:
        case Ident(left, right):
            d_left = wf_tm(left)
            j = d_left.conclusion
            step = mk(RuleId.I_SUBST, [d_left, at_tm(wf_tm(right), j.ctx, j.ty), d_sub])
            left_nf, e_left = sub_tm(left, sub)
            right_nf, e_right = sub_tm(right, sub)
            k = e_left.conclusion
            form = mk(RuleId.I_FORM, [e_left, at_tm(e_right, k.ctx, k.ty)])
            return Ident(left_nf, right_nf), trans(step, form)
        case Sigma(a, b) | Pi(a, b):
            sigma = isinstance(ty, Sigma)
            step = mk(RuleId.SIGMA_SUBST if sigma else RuleId.PI_SUBST, [wf_ty(a), wf_ty(b), d_sub])
            a_nf, d_a = norm_ty(TySubst(a, sub))
            b_nf, d_b = norm_ty(TySubst(b, lift(sub, a, checked=False)))
            form = mk(RuleId.SIGMA_FORM if sigma else RuleId.PI_FORM, [d_a, d_b])
            return type(ty)(a_nf, b_nf), trans(step, form)
    raise IllFormed(f"{ty} is not a normal type")


@_memo
def norm_sub(sub: RawSub) -> tuple:
    match sub:
        case Empty(ctx):
            ctx_nf, d_ctx = norm_ctx(ctx)
            return Empty(ctx_nf), mk(RuleId.CONG_EMPTY, [d_ctx])
        case Id(ctx):
            ctx_nf, d_ctx = norm_ctx(ctx)
            nf, d = id_nf(ctx_nf)
            if ctx_nf == ctx:
                return nf, d
            back = sym(d_ctx)
            return nf, trans(mk(RuleId.CONG_ID, [d_ctx]), mk(RuleId.PRES_SUB, [back, back, d]))
        case Proj(ty):
            ctx = ctxof(ty)
            ty_nf, d_ty = norm_ty(ty)
            nf, d = proj_nf(ty_nf)
            return nf, trans(mk(RuleId.CONG_PROJ, [d_ty]), at_sub(d, Cons(ctx, ty), ctx))
        case Comp(outer, inner):
            outer_nf, d_outer = norm_sub(outer)
            inner_nf, d_inner = norm_sub(inner)
            step = mk(RuleId.CONG_COMP, [at_sub(d_inner, dom(inner), dom(outer)), d_outer])
            nf, d = comp_nf(outer_nf, inner_nf)
            return nf, trans(step, at_sub(d, dom(inner), cod(outer)))
        case Ext(inner, tm, ty):
            ctx, source = ctxof(ty), dom(inner)
            ty_nf, d_ty = norm_ty(ty)
            inner_nf, d_inner = norm_sub(inner)
            tm_nf, d_tm = norm_tm(tm)
            d = mk(RuleId.CONG_EXT, [
                d_ty, at_sub(d_inner, source, ctx), at_tm(d_tm, source, TySubst(ty, inner)),
            ])
            return Ext(inner_nf, tm_nf, ty_nf), at_sub(d, source, cod(sub))
    raise IllFormed(f"not a substitution: {sub!r}")


@_memo
def id_nf(ctx: RawCtx) -> tuple:
    """η-expanded identity on a normal context."""
    ident = wf_sub(Id(ctx))
    if isinstance(ctx, Unit):
        return Empty(ctx), mk(RuleId.EMPTY_UNIQUE, [ident])
    b = ctx.ty
    wb, wp = wf_ty(b), wf_sub(Proj(b))
    split = mk(RuleId.SURJECTIVE_PAIRING, [ident])
    right_unit = mk(RuleId.ID_RIGHT, [wp])
    head, d_head = proj_nf(b)
    first = trans(sym(right_unit), d_head)
    second = retype(mk(RuleId.TMSUB_ID, [wf_tm(Var(b))]), mk(RuleId.CONG_TYSUB, [wb, right_unit]))
    return Ext(head, Var(b), b), trans(split, mk(RuleId.CONG_EXT, [wb, first, second]))


@_memo
def proj_nf(ty: RawTy) -> tuple:
    """p_A over a normal context as the tuple of its variables."""
    p = Proj(ty)
    return _expand_chain(p, wf_sub(p))


def _expand_chain(chain: RawSub, d_chain: Derivation) -> tuple:
    j = d_chain.conclusion
    theta, target = j.source, j.target
    if isinstance(target, Unit):
        return Empty(theta), mk(RuleId.EMPTY_UNIQUE, [d_chain])
    b = target.ty
    wb, wp = wf_ty(b), wf_sub(Proj(b))
    split = mk(RuleId.SURJECTIVE_PAIRING, [d_chain])
    longer = Comp(Proj(b), chain)
    rest, d_rest = _expand_chain(longer, mk(RuleId.CONG_COMP, [d_chain, wp]))
    v, d_v = _flatten_tm(Var(b), chain)
    d_v = retype(d_v, sym(mk(RuleId.TYSUB_COMP, [wb, wp, d_chain])))
    return Ext(rest, v, b), trans(split, mk(RuleId.CONG_EXT, [wb, d_rest, d_v]))


def _flatten_tm(tm: RawTm, chain: RawSub) -> tuple:
    """a[p ∘ (p ∘ …)] = a[p][p]… at the type of the left side."""
    if isinstance(chain, Proj):
        flat = TmSubst(tm, chain)
        return flat, wf_tm(flat)
    outer, inner = chain.outer, chain.inner
    d_outer, d_inner = wf_sub(outer), wf_sub(inner)
    wa = wf_tm(tm)
    t = wa.conclusion.ty
    split = mk(RuleId.TMSUB_COMP, [wa, d_outer, d_inner])
    back = sym(mk(RuleId.TYSUB_COMP, [wf_ty(t), d_outer, d_inner]))
    flat, d = _flatten_tm(TmSubst(tm, outer), inner)
    return flat, trans(retype(split, back), retype(d, back))


@_memo
def comp_nf(outer: RawSub, inner: RawSub) -> tuple:
    """Compose normal substitutions: SubEq(dom inner, outer ∘ inner, nf, cod outer)."""
    whole = Comp(outer, inner)
    d_whole = wf_sub(whole)
    if isinstance(outer, Empty):
        return Empty(dom(inner)), mk(RuleId.EMPTY_UNIQUE, [d_whole])
    rest, tm, a_ty = outer.sub, outer.tm, outer.ty
    da, d_rest, d_tm = _ext_parts(outer)
    d_outer, d_inner, wp = wf_sub(outer), wf_sub(inner), wf_sub(Proj(a_ty))
    split = mk(RuleId.SURJECTIVE_PAIRING, [d_whole])
    beta = mk(RuleId.PROJ_BETA, [da, d_rest, d_tm])
    assoc = mk(RuleId.ASSOC, [wp, d_outer, d_inner])
    head, d_head = comp_nf(rest, inner)
    first = trans(sym(assoc), mk(RuleId.CONG_COMP, [d_inner, beta]), d_head)

    weakened = TySubst(a_ty, Proj(a_ty))
    to_target = sym(trans(
        mk(RuleId.TYSUB_COMP, [da, wp, d_whole]),
        mk(RuleId.TYSUB_COMP, [wf_ty(weakened), d_outer, d_inner]),
    ))
    t1 = retype(mk(RuleId.TMSUB_COMP, [wf_tm(Var(a_ty)), d_outer, d_inner]), to_target)
    rest_to_proj = mk(RuleId.CONG_TYSUB, [
        trans(mk(RuleId.CONG_TYSUB, [da, sym(beta)]), mk(RuleId.TYSUB_COMP, [da, wp, d_outer])),
        d_inner,
    ])
    t2 = retype(mk(RuleId.CONG_TMSUB, [mk(RuleId.VAR_BETA, [da, d_rest, d_tm]), d_inner]), trans(rest_to_proj, to_target))
    m, t3 = sub_tm(tm, inner)
    link = at_ctx(eq_ty(typeof(tm), TySubst(a_ty, rest)), dom(rest))
    t3 = retype(t3, trans(mk(RuleId.CONG_TYSUB, [link, d_inner]), rest_to_proj, to_target))
    second = trans(t1, t2, t3)
    return Ext(head, m, a_ty), trans(split, mk(RuleId.CONG_EXT, [da, first, second]))


def _is_var_chain(tm: RawTm) -> bool:
    while isinstance(tm, TmSubst) and isinstance(tm.sub, Proj):
        tm = tm.tm
    return isinstance(tm, Var)


def _norm_var(tm: RawTm) -> tuple:
    match tm:
        case Var(b):
            b_nf, d_b = norm_ty(b)
            return Var(b_nf), mk(RuleId.CONG_VAR, [d_b])
        case TmSubst(inner, Proj(b)):
            inner_nf, d_inner = _norm_var(inner)
            b_nf, d_b = norm_ty(b)
            d_p = at_sub(mk(RuleId.CONG_PROJ, [d_b]), Cons(ctxof(b), b), d_inner.conclusion.ctx)
            return TmSubst(inner_nf, Proj(b_nf)), mk(RuleId.CONG_TMSUB, [d_inner, d_p])
    raise IllFormed(f"{tm} is not a variable")


@_memo
def _drop_unit_zero() -> Derivation:
    """0₁[⟨⟩_1] = 0₁ : N₁[⟨⟩_1]"""
    wz = wf_tm(Zero())
    to_id = mk(RuleId.CONG_TMSUB, [wz, sym(_unit_id_empty())])
    unit = retype(mk(RuleId.TMSUB_ID, [wz]), sym(_drop_unit(UnitTy())))
    return trans(to_id, unit)


def _sub_var(tm: RawTm, sub: RawSub, d_sub: Derivation) -> tuple:
    da, d_rest, d_tm = _ext_parts(sub)
    b, rest = sub.ty, sub.sub
    wp = wf_sub(Proj(b))
    beta = mk(RuleId.PROJ_BETA, [da, d_rest, d_tm])
    if isinstance(tm, Var):
        home_to_rest = trans(sym(mk(RuleId.TYSUB_COMP, [da, wp, d_sub])), mk(RuleId.CONG_TYSUB, [da, beta]))
        return sub.tm, retype(mk(RuleId.VAR_BETA, [da, d_rest, d_tm]), sym(home_to_rest))
    v = tm.tm
    wv = wf_tm(v)
    tv = wv.conclusion.ty
    wt = wf_ty(tv)
    split = mk(RuleId.TYSUB_COMP, [wt, wp, d_sub])
    s1 = sym(mk(RuleId.TMSUB_COMP, [wv, wp, d_sub]))
    s2 = retype(mk(RuleId.CONG_TMSUB, [wv, beta]), split)
    m, s3 = sub_tm(v, rest)
    s3 = retype(s3, trans(mk(RuleId.CONG_TYSUB, [wt, sym(beta)]), split))
    return m, trans(s1, s2, s3)


@_memo
def sub_tm(tm: RawTm, sub: RawSub) -> tuple:
    """Push a normal substitution into a β-normal term, contracting the redexes it creates."""
    d_sub = wf_sub(sub)
    theta = dom(sub)
    if _is_var_chain(tm):
        return _sub_var(tm, sub, d_sub)
    match tm:
        case Zero():
            nf, d = TmSubst(tm, sub), wf_tm(TmSubst(tm, sub))
            if isinstance(theta, Unit):
                return tm, trans(d, _drop_unit_zero())
            return nf, d
        case TmSubst(Zero(), Empty(_) as empty):
            wz, we = wf_tm(Zero()), wf_sub(empty)
            s1 = sym(mk(RuleId.TMSUB_COMP, [wz, we, d_sub]))
            to_empty = mk(RuleId.EMPTY_UNIQUE, [mk(RuleId.CONG_COMP, [d_sub, we])])
            wn = wf_ty(UnitTy())
            flat = mk(RuleId.TYSUB_COMP, [wn, we, d_sub])
            d = trans(s1, retype(mk(RuleId.CONG_TMSUB, [wz, to_empty]), flat))
            if isinstance(theta, Unit):
                # N₁[⟨⟩_1] = N₁[⟨⟩][τ]
                link = trans(sym(mk(RuleId.CONG_TYSUB, [wn, to_empty])), flat)
                return Zero(), trans(d, retype(_drop_unit_zero(), link))
            return TmSubst(Zero(), Empty(theta)), d
        case Refl(u):
            wu = wf_tm(u)
            isub = mk(RuleId.I_SUBST, [wu, wu, d_sub])
            uniq = mk(RuleId.I_UNIQUE, [retype(wf_tm(TmSubst(tm, sub)), isub)])
            u_nf, d_u = sub_tm(u, sub)
            form = mk(RuleId.I_FORM, [wf_tm(TmSubst(u, sub)), d_u])
            intro = retype(mk(RuleId.I_INTRO, [d_u]), sym(form))
            return Refl(u_nf), retype(trans(uniq, intro), sym(isub))
        case Pair(a, b, _, _):
            d_pair = wf_tm(tm)
            step = mk(RuleId.SIGMA_PAIR_SUBST, [*d_pair.premises, d_sub])
            m, d = norm_tm(step.conclusion.right)
            back = sym(mk(RuleId.SIGMA_SUBST, [d_pair.premises[0], d_pair.premises[1], d_sub]))
            return m, trans(step, retype(d, back))
        case Lam(a, body):
            d_lam = wf_tm(tm)
            d_body = d_lam.premises[1]
            step = mk(RuleId.PI_LAM_SUBST, [d_body, d_sub])
            m, d = norm_tm(step.conclusion.right)
            back = sym(mk(RuleId.PI_SUBST, [d_lam.premises[0], at_ctx(wf_ty(d_body.conclusion.ty), d_body.conclusion.ctx), d_sub]))
            return m, trans(step, retype(d, back))
        case Fst() | Snd() | Ap():
            premises = list(wf_tm(tm).premises)
            if isinstance(tm, Fst):
                step = mk(RuleId.SIGMA_FST_SUBST, [premises[0], premises[1], d_sub])
            elif isinstance(tm, Snd):
                step = mk(RuleId.SIGMA_SND_SUBST, [*premises, d_sub])
            else:
                step = mk(RuleId.PI_AP_SUBST, [premises[2], premises[3], d_sub])
            home = TySubst(typeof(tm), sub)
            m, d = norm_tm(step.conclusion.right)
            return m, trans(at_tm(step, theta, home), at_tm(d, theta, home))
    raise IllFormed(f"{tm} is not a β-normal term")


@_memo
def norm_tm(tm: RawTm) -> tuple:
    if _is_var_chain(tm):
        return _norm_var(tm)
    match tm:
        case TmSubst(inner, sub):
            inner_nf, d_inner = norm_tm(inner)
            j = d_inner.conclusion
            sub_nf, d_sub = norm_sub(sub)
            source = dom(sub)
            step = mk(RuleId.CONG_TMSUB, [d_inner, at_sub(d_sub, source, j.ctx)])
            m, d = sub_tm(inner_nf, sub_nf)
            return m, trans(step, at_tm(d, source, TySubst(j.ty, sub)))
        case Zero():
            return tm, wf_tm(tm)
        case Refl(u):
            u_nf, d_u = norm_tm(u)
            form = mk(RuleId.I_FORM, [wf_tm(u), d_u])
            return Refl(u_nf), retype(mk(RuleId.I_INTRO, [d_u]), sym(form))
        case Pair(a, b, x, y):
            ctx = ctxof(a)
            a_nf, d_a = norm_ty(a)
            b_nf, d_b = norm_ty(b)
            x_nf, d_x = norm_tm(x)
            y_nf, d_y = norm_tm(y)
            d = mk(RuleId.SIGMA_PAIR, [
                d_a,
                at_ctx(d_b, Cons(ctx, a)),
                at_tm(d_x, ctx, a),
                at_tm(d_y, ctx, TySubst(b, Ext(Id(ctx), x, a))),
            ])
            return Pair(a_nf, b_nf, x_nf, y_nf), d
        case Lam(a, body):
            a_nf, d_a = norm_ty(a)
            body_nf, d_body = norm_tm(body)
            d = mk(RuleId.PI_LAM, [d_a, at_tm(d_body, Cons(ctxof(a), a), d_body.conclusion.ty)])
            return Lam(a_nf, body_nf), d
        case Fst(a, c):
            ctx = ctxof(a)
            a_nf, d_a = norm_ty(a)
            c_nf, d_c = norm_tm(c)
            step = mk(RuleId.SIGMA_FST, [d_a, at_tm(d_c, ctx, fst_family(a, c))])
            if isinstance(c_nf, Pair) and c_nf.ty_a == a_nf:
                beta = mk(RuleId.SIGMA_BETA_FST, list(wf_tm(c_nf).premises))
                return c_nf.fst, trans(step, at_tm(beta, ctx, a))
            return Fst(a_nf, c_nf), step
        case Snd(a, b, c):
            ctx = ctxof(a)
            a_nf, d_a = norm_ty(a)
            b_nf, d_b = norm_ty(b)
            c_nf, d_c = norm_tm(c)
            step = mk(RuleId.SIGMA_SND, [d_a, at_ctx(d_b, Cons(ctx, a)), at_tm(d_c, ctx, Sigma(a, b))])
            j = step.conclusion
            if isinstance(c_nf, Pair) and c_nf.ty_a == a_nf and c_nf.ty_b == b_nf:
                beta = mk(RuleId.SIGMA_BETA_SND, list(wf_tm(c_nf).premises))
                return c_nf.snd, trans(step, at_tm(beta, j.ctx, j.ty))
            return Snd(a_nf, b_nf, c_nf), step
        case Ap(a, b, c, x):
            ctx = ctxof(a)
            a_nf, d_a = norm_ty(a)
            b_nf, d_b = norm_ty(b)
            c_nf, d_c = norm_tm(c)
            x_nf, d_x = norm_tm(x)
            step = mk(RuleId.PI_AP, [
                d_a, at_ctx(d_b, Cons(ctx, a)), at_tm(d_c, ctx, Pi(a, b)), at_tm(d_x, ctx, a),
            ])
            j = step.conclusion
            if isinstance(c_nf, Lam) and c_nf.ty == a_nf:
                inner_ctx = ctxof(a_nf)
                body = at_tm(wf_tm(c_nf.body), Cons(inner_ctx, a_nf), b_nf)
                beta = mk(RuleId.PI_BETA, [body, at_tm(wf_tm(x_nf), inner_ctx, a_nf)])
                k = beta.conclusion
                m, d = norm_tm(k.right)
                return m, trans(step, at_tm(trans(beta, at_tm(d, k.ctx, k.ty)), j.ctx, j.ty))
            return Ap(a_nf, b_nf, c_nf, x_nf), step
    raise IllFormed(f"not a term: {tm!r}")


# Comparison of normal forms up to η

def conv_sub(left: RawSub, right: RawSub) -> Derivation:
    if left == right:
        return wf_sub(left)
    match left, right:
        case Ext(ls, lt, a), Ext(rs, rt, b) if a == b:
            head = conv_sub(ls, rs)
            tail = conv_tm(lt, rt, dom(ls), TySubst(a, ls))
            return mk(RuleId.CONG_EXT, [wf_ty(a), head, tail])
    raise NotConvertible(f"substitutions {left} and {right} differ")


@_memo
def conv_tm(x: RawTm, y: RawTm, ctx: RawCtx, ty: RawTy) -> Derivation:
    """TmEq(ctx, x, y, ty) for β-normal x and y, with η at the normal type of ty."""
    if x == y:
        return at_tm(wf_tm(x), ctx, ty)
    ty_nf, _ = norm_ty(ty)
    home = ctxof(ty_nf)

    def at_nf(z):
        return at_tm(wf_tm(z), home, ty_nf)

    match ty_nf:
        case UnitTy() | TySubst(UnitTy(), Empty()):
            d = trans(mk(RuleId.N1_ETA, [at_nf(x)]), sym(mk(RuleId.N1_ETA, [at_nf(y)])))
        case Ident():
            d = trans(mk(RuleId.I_UNIQUE, [at_nf(x)]), sym(mk(RuleId.I_UNIQUE, [at_nf(y)])))
        case Sigma(a, b):
            wa, wb = wf_ty(a), wf_ty(b)
            ex = mk(RuleId.SIGMA_ETA, [wa, wb, at_nf(x)])
            ey = mk(RuleId.SIGMA_ETA, [wa, wb, at_nf(y)])
            first = eq_tm(Fst(a, x), Fst(a, y))
            second = eq_tm(Snd(a, b, x), Snd(a, b, y))
            d = trans(ex, mk(RuleId.SIGMA_PAIR, [wa, wb, first, second]), sym(ey))
        case Pi(a, b):
            ex = mk(RuleId.PI_ETA, [at_nf(x)])
            ey = mk(RuleId.PI_ETA, [at_nf(y)])
            inner = at_tm(eq_tm(ex.conclusion.left.body, ey.conclusion.left.body), Cons(home, a), b)
            d = trans(sym(ex), mk(RuleId.PI_LAM, [wf_ty(a), inner]), ey)
        case _:
            d = _conv_neutral(x, y)
    return at_tm(d, ctx, ty)


def _conv_neutral(x: RawTm, y: RawTm) -> Derivation:
    match x, y:
        case Ap(a, b, f, u), Ap(a2, b2, g, v) if a == a2 and b == b2:
            ctx = ctxof(a)
            return mk(RuleId.PI_AP, [
                wf_ty(a), at_ctx(wf_ty(b), Cons(ctx, a)), conv_tm(f, g, ctx, Pi(a, b)), conv_tm(u, v, ctx, a),
            ])
        case Fst(a, c), Fst(a2, c2) if a == a2:
            return mk(RuleId.SIGMA_FST, [wf_ty(a), conv_tm(c, c2, ctxof(a), fst_family(a, c))])
        case Snd(a, b, c), Snd(a2, b2, c2) if a == a2 and b == b2:
            ctx = ctxof(a)
            return mk(RuleId.SIGMA_SND, [
                wf_ty(a), at_ctx(wf_ty(b), Cons(ctx, a)), conv_tm(c, c2, ctx, Sigma(a, b)),
            ])
    raise NotConvertible(f"terms {x} and {y} differ")
