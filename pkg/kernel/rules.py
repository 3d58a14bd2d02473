"""
Judgments, the rule catalog and derivation checking.

Each rule is a function from the conclusions of its premises to the
conclusion it licenses; `check` recomputes that conclusion at every node
and compares it with the stored one, and `mk` builds a node from it.

Repairs to the published rule figures, applied where the printed schema
is evidently garbled:
  - cong-tmsub concludes at type A[γ] (the printed A'[γ'] is an equal type).
  - tmsub-comp takes δ : Θ → Δ (printed with the domain Γ).
  - i-subst concludes in the domain Δ of γ (printed Γ).
  - sigma-pair and the Σ computation rules type b at B[⟨id, a⟩_A] where the
    figure mentions an unbound c; sigma-eta takes c : Σ(A, B) as premise.
  - sigma-beta-snd concludes at B[⟨id, fst(A, pair(A, B, a, b))⟩_A], the type
    sigma-snd assigns to its left side.
  - sigma-fst-subst concludes at A[γ] in Δ.
  - pi-beta takes b : B over Γ.A (the figure lists c : Π(A, B)); pi-eta,
    pi-lam-subst and pi-ap-subst carry the annotations A[p_A], B[p_A↑A],
    A[γ], B[γ↑A] that the figure leaves implicit.
  - n1-eta also applies in any context Γ to terms of N₁[⟨⟩_Γ], concluding
    a = 0₁[⟨⟩_Γ].
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Union

from .exceptions import ParseError, RuleError
from .syntax import (
    Ap, Base, Comp, Cons, Empty, Ext, Fst, Id, Ident, Lam, Node, Pair, Pi, Proj, RawCtx, RawEntity, RawSub,
    RawTm, RawTy, Refl, SList, Sigma, Snd, Sort, TmSubst, Token, TySubst, Unit, UnitTy, Var, Zero,
    entity_from_sexpr, lift, print_entity, read_sexpr, typeof,
)


# Judgments

class Judgment(Node):
    def __str__(self):
        return print_judgment(self)


@dataclass(frozen=True, eq=False)
class CtxEq(Judgment):
    left: RawCtx
    right: RawCtx


@dataclass(frozen=True, eq=False)
class SubEq(Judgment):
    source: RawCtx
    left: RawSub
    right: RawSub
    target: RawCtx


@dataclass(frozen=True, eq=False)
class TyEq(Judgment):
    ctx: RawCtx
    left: RawTy
    right: RawTy


@dataclass(frozen=True, eq=False)
class TmEq(Judgment):
    ctx: RawCtx
    left: RawTm
    right: RawTm
    ty: RawTy


# One-sided forms: Γ ⊢, Δ ⊢ γ : Γ, Γ ⊢ A, Γ ⊢ a : A

@dataclass(frozen=True)
class IsCtx:
    ctx: RawCtx


@dataclass(frozen=True)
class IsSub:
    source: RawCtx
    sub: RawSub
    target: RawCtx


@dataclass(frozen=True)
class IsTy:
    ctx: RawCtx
    ty: RawTy


@dataclass(frozen=True)
class HasType:
    ctx: RawCtx
    tm: RawTm
    ty: RawTy


OneSided = Union[IsCtx, IsSub, IsTy, HasType]


def refl(j: OneSided | Judgment) -> Judgment:
    """Γ ⊢ a : A abbreviates Γ ⊢ a = a : A; equality judgments keep their left side."""
    match j:
        case IsCtx(ctx):
            return CtxEq(ctx, ctx)
        case IsSub(source, sub, target):
            return SubEq(source, sub, sub, target)
        case IsTy(ctx, ty):
            return TyEq(ctx, ty, ty)
        case HasType(ctx, tm, ty):
            return TmEq(ctx, tm, tm, ty)
        case CtxEq(left, _):
            return CtxEq(left, left)
        case SubEq(source, left, _, target):
            return SubEq(source, left, left, target)
        case TyEq(ctx, left, _):
            return TyEq(ctx, left, left)
        case TmEq(ctx, left, _, ty):
            return TmEq(ctx, left, left, ty)
    raise TypeError(f"not a judgment: {j!r}")


def is_reflexive(j: Judgment) -> bool:
    return j.left == j.right


def flip(j: Judgment) -> Judgment:
    match j:
        case CtxEq(left, right):
            return CtxEq(right, left)
        case SubEq(source, left, right, target):
            return SubEq(source, right, left, target)
        case TyEq(ctx, left, right):
            return TyEq(ctx, right, left)
        case TmEq(ctx, left, right, ty):
            return TmEq(ctx, right, left, ty)
    raise TypeError(f"not a judgment: {j!r}")


# Rule catalog

class RuleId(enum.Enum):
    TRANS_CTX = 'trans-ctx'
    SYM_CTX = 'sym-ctx'
    TRANS_SUB = 'trans-sub'
    SYM_SUB = 'sym-sub'
    TRANS_TY = 'trans-ty'
    SYM_TY = 'sym-ty'
    TRANS_TM = 'trans-tm'
    SYM_TM = 'sym-tm'

    PRES_SUB = 'pres-sub'
    PRES_TY = 'pres-ty'
    PRES_TM = 'pres-tm'

    CONG_COMP = 'cong-comp'
    CONG_ID = 'cong-id'
    CONG_TYSUB = 'cong-tysub'
    CONG_TMSUB = 'cong-tmsub'
    CONG_UNIT = 'cong-unit'
    CONG_EMPTY = 'cong-empty'
    CONG_CONS = 'cong-cons'
    CONG_PROJ = 'cong-proj'
    CONG_VAR = 'cong-var'
    CONG_EXT = 'cong-ext'

    ASSOC = 'assoc'
    ID_LEFT = 'id-left'
    ID_RIGHT = 'id-right'
    TYSUB_COMP = 'tysub-comp'
    TYSUB_ID = 'tysub-id'
    TMSUB_COMP = 'tmsub-comp'
    TMSUB_ID = 'tmsub-id'
    EMPTY_UNIQUE = 'empty-unique'
    PROJ_BETA = 'proj-beta'
    VAR_BETA = 'var-beta'
    SURJECTIVE_PAIRING = 'surjective-pairing'

    BASE_TYPE = 'base-type'

    I_FORM = 'i-form'
    I_INTRO = 'i-intro'
    I_REFLECTION = 'i-reflection'
    I_UNIQUE = 'i-unique'
    I_SUBST = 'i-subst'

    N1_FORM = 'n1-form'
    N1_INTRO = 'n1-intro'
    N1_ETA = 'n1-eta'

    SIGMA_FORM = 'sigma-form'
    SIGMA_FST = 'sigma-fst'
    SIGMA_SND = 'sigma-snd'
    SIGMA_PAIR = 'sigma-pair'
    SIGMA_BETA_FST = 'sigma-beta-fst'
    SIGMA_BETA_SND = 'sigma-beta-snd'
    SIGMA_ETA = 'sigma-eta'
    SIGMA_SUBST = 'sigma-subst'
    SIGMA_FST_SUBST = 'sigma-fst-subst'
    SIGMA_SND_SUBST = 'sigma-snd-subst'
    SIGMA_PAIR_SUBST = 'sigma-pair-subst'

    PI_FORM = 'pi-form'
    PI_LAM = 'pi-lam'
    PI_AP = 'pi-ap'
    PI_BETA = 'pi-beta'
    PI_ETA = 'pi-eta'
    PI_SUBST = 'pi-subst'
    PI_LAM_SUBST = 'pi-lam-subst'
    PI_AP_SUBST = 'pi-ap-subst'


PER_RULES = frozenset(r for r in RuleId if r.value.startswith(('trans-', 'sym-')))


def _need(condition: bool, reason: str):
    if not condition:
        raise RuleError(reason)


def _shape(premises: list, *kinds) -> list:
    _need(len(premises) == len(kinds), f"expected {len(kinds)} premises, got {len(premises)}")
    for i, (j, kind) in enumerate(zip(premises, kinds)):
        _need(isinstance(j, kind), f"premise {i} should be a {kind.__name__} judgment")
    return premises


def _refl(j: Judgment, what: str):
    _need(is_reflexive(j), f"{what} must be a reflexive judgment")


def _trans(premises):
    j1, j2 = premises
    _need(type(j1) is type(j2) and len(premises) == 2, 'transitivity needs two judgments of the same form')
    _need(j1.right == j2.left, f"middle entities differ: {print_entity(j1.right)} vs {print_entity(j2.left)}")
    match j1:
        case CtxEq(left, _):
            return CtxEq(left, j2.right)
        case SubEq(source, left, _, target):
            _need(source == j2.source and target == j2.target, 'substitution judgments have different contexts')
            return SubEq(source, left, j2.right, target)
        case TyEq(ctx, left, _):
            _need(ctx == j2.ctx, 'type judgments have different contexts')
            return TyEq(ctx, left, j2.right)
        case TmEq(ctx, left, _, ty):
            _need(ctx == j2.ctx and ty == j2.ty, 'term judgments have different contexts or types')
            return TmEq(ctx, left, j2.right, ty)


def _per(kind):
    def trans(premises, side):
        _shape(premises, kind, kind)
        if side:
            _need(len(side) == 1 and side[0] == premises[0].right, 'side parameter must be the middle entity')
        return _trans(premises)

    def sym(premises, side):
        _shape(premises, kind)
        return flip(premises[0])

    return trans, sym


def _pres_sub(p):
    ctx, target, j = _shape(p, CtxEq, CtxEq, SubEq)
    _need(j.source == ctx.left and j.target == target.left, 'context equalities do not match the substitution judgment')
    return SubEq(ctx.right, j.left, j.right, target.right)


def _pres_ty(p):
    ctx, j = _shape(p, CtxEq, TyEq)
    _need(j.ctx == ctx.left, 'context equality does not match the type judgment')
    return TyEq(ctx.right, j.left, j.right)


def _pres_tm(p):
    ctx, ty, j = _shape(p, CtxEq, TyEq, TmEq)
    _need(ty.ctx == ctx.left and j.ctx == ctx.left, 'context equality does not match')
    _need(j.ty == ty.left, 'type equality does not match the term judgment')
    return TmEq(ctx.right, j.left, j.right, ty.right)


def _cong_comp(p):
    inner, outer = _shape(p, SubEq, SubEq)
    _need(inner.target == outer.source, 'substitutions are not composable')
    return SubEq(inner.source, Comp(outer.left, inner.left), Comp(outer.right, inner.right), outer.target)


def _cong_id(p):
    (ctx,) = _shape(p, CtxEq)
    return SubEq(ctx.left, Id(ctx.left), Id(ctx.right), ctx.left)


def _cong_tysub(p):
    ty, sub = _shape(p, TyEq, SubEq)
    _need(sub.target == ty.ctx, 'substitution codomain differs from the type context')
    return TyEq(sub.source, TySubst(ty.left, sub.left), TySubst(ty.right, sub.right))


def _cong_tmsub(p):
    tm, sub = _shape(p, TmEq, SubEq)
    _need(sub.target == tm.ctx, 'substitution codomain differs from the term context')
    return TmEq(sub.source, TmSubst(tm.left, sub.left), TmSubst(tm.right, sub.right), TySubst(tm.ty, sub.left))


def _cong_unit(p):
    _shape(p)
    return CtxEq(Unit(), Unit())


def _cong_empty(p):
    (ctx,) = _shape(p, CtxEq)
    return SubEq(ctx.left, Empty(ctx.left), Empty(ctx.right), Unit())


def _cong_cons(p):
    ctx, ty = _shape(p, CtxEq, TyEq)
    _need(ty.ctx == ctx.left, 'type judgment is not over the left context')
    return CtxEq(Cons(ctx.left, ty.left), Cons(ctx.right, ty.right))


def _cong_proj(p):
    (ty,) = _shape(p, TyEq)
    return SubEq(Cons(ty.ctx, ty.left), Proj(ty.left), Proj(ty.right), ty.ctx)


def _cong_var(p):
    (ty,) = _shape(p, TyEq)
    return TmEq(Cons(ty.ctx, ty.left), Var(ty.left), Var(ty.right), TySubst(ty.left, Proj(ty.left)))


def _cong_ext(p):
    ty, sub, tm = _shape(p, TyEq, SubEq, TmEq)
    _need(sub.target == ty.ctx, 'substitution codomain differs from the type context')
    _need(tm.ctx == sub.source, 'term is not in the substitution domain')
    _need(tm.ty == TySubst(ty.left, sub.left), 'term is not typed A[γ]')
    return SubEq(sub.source, Ext(sub.left, tm.left, ty.left), Ext(sub.right, tm.right, ty.right), Cons(ty.ctx, ty.left))


def _assoc(p):
    theta, delta, gamma = _shape(p, SubEq, SubEq, SubEq)
    for j, name in ((theta, 'θ'), (delta, 'δ'), (gamma, 'γ')):
        _refl(j, name)
    _need(delta.target == theta.source and gamma.target == delta.source, 'substitutions are not composable')
    return SubEq(
        gamma.source,
        Comp(Comp(theta.left, delta.left), gamma.left),
        Comp(theta.left, Comp(delta.left, gamma.left)),
        theta.target,
    )


def _id_left(p):
    (sub,) = _shape(p, SubEq)
    _refl(sub, 'γ')
    return SubEq(sub.source, sub.left, Comp(Id(sub.target), sub.left), sub.target)


def _id_right(p):
    (sub,) = _shape(p, SubEq)
    _refl(sub, 'γ')
    return SubEq(sub.source, sub.left, Comp(sub.left, Id(sub.source)), sub.target)


def _composable(ty_ctx, gamma, delta):
    _refl(gamma, 'γ')
    _refl(delta, 'δ')
    _need(gamma.target == ty_ctx, 'γ does not land in the context of the entity')
    _need(delta.target == gamma.source, 'δ does not land in the domain of γ')


def _tysub_comp(p):
    ty, gamma, delta = _shape(p, TyEq, SubEq, SubEq)
    _refl(ty, 'A')
    _composable(ty.ctx, gamma, delta)
    return TyEq(
        delta.source,
        TySubst(ty.left, Comp(gamma.left, delta.left)),
        TySubst(TySubst(ty.left, gamma.left), delta.left),
    )


def _tysub_id(p):
    (ty,) = _shape(p, TyEq)
    _refl(ty, 'A')
    return TyEq(ty.ctx, TySubst(ty.left, Id(ty.ctx)), ty.left)


def _tmsub_comp(p):
    tm, gamma, delta = _shape(p, TmEq, SubEq, SubEq)
    _refl(tm, 'a')
    _composable(tm.ctx, gamma, delta)
    return TmEq(
        delta.source,
        TmSubst(tm.left, Comp(gamma.left, delta.left)),
        TmSubst(TmSubst(tm.left, gamma.left), delta.left),
        TySubst(TySubst(tm.ty, gamma.left), delta.left),
    )


def _tmsub_id(p):
    (tm,) = _shape(p, TmEq)
    _refl(tm, 'a')
    return TmEq(tm.ctx, TmSubst(tm.left, Id(tm.ctx)), tm.left, tm.ty)


def _empty_unique(p):
    (sub,) = _shape(p, SubEq)
    _refl(sub, 'γ')
    _need(sub.target == Unit(), 'codomain must be the empty context')
    return SubEq(sub.source, sub.left, Empty(sub.source), Unit())


def _extension_parts(p):
    ty, sub, tm = _shape(p, TyEq, SubEq, TmEq)
    _refl(ty, 'A')
    _refl(sub, 'γ')
    _refl(tm, 'a')
    _need(sub.target == ty.ctx, 'γ does not land in the context of A')
    _need(tm.ctx == sub.source and tm.ty == TySubst(ty.left, sub.left), 'a is not typed A[γ] in the domain of γ')
    return ty.left, sub.left, tm.left, sub.source, ty.ctx


def _proj_beta(p):
    a_ty, gamma, a, delta, ctx = _extension_parts(p)
    return SubEq(delta, Comp(Proj(a_ty), Ext(gamma, a, a_ty)), gamma, ctx)


def _var_beta(p):
    a_ty, gamma, a, delta, _ = _extension_parts(p)
    return TmEq(delta, TmSubst(Var(a_ty), Ext(gamma, a, a_ty)), a, TySubst(a_ty, gamma))


def _surjective_pairing(p):
    (sub,) = _shape(p, SubEq)
    _refl(sub, 'γ')
    _need(isinstance(sub.target, Cons), 'codomain must be a context extension')
    a_ty = sub.target.ty
    expanded = Ext(Comp(Proj(a_ty), sub.left), TmSubst(Var(a_ty), sub.left), a_ty)
    return SubEq(sub.source, sub.left, expanded, sub.target)


def _base_type(p):
    _shape(p)
    return TyEq(Unit(), Base(), Base())


# Identity types

def _i_form(p):
    a, b = _shape(p, TmEq, TmEq)
    _need(a.ctx == b.ctx and a.ty == b.ty, 'both sides must share context and type')
    return TyEq(a.ctx, Ident(a.left, b.left), Ident(a.right, b.right))


def _i_intro(p):
    (a,) = _shape(p, TmEq)
    return TmEq(a.ctx, Refl(a.left), Refl(a.right), Ident(a.left, a.right))


def _identity_inhabitant(p):
    (c,) = _shape(p, TmEq)
    _refl(c, 'c')
    _need(isinstance(c.ty, Ident), 'c must inhabit an identity type')
    return c


def _i_reflection(p):
    c = _identity_inhabitant(p)
    return TmEq(c.ctx, c.ty.left, c.ty.right, typeof(c.ty.left))


def _i_unique(p):
    c = _identity_inhabitant(p)
    return TmEq(c.ctx, c.left, Refl(c.ty.left), c.ty)


def _i_subst(p):
    a, b, sub = _shape(p, TmEq, TmEq, SubEq)
    _refl(a, 'a')
    _refl(b, "a'")
    _refl(sub, 'γ')
    _need(a.ctx == b.ctx and a.ty == b.ty, 'both sides must share context and type')
    _need(sub.target == a.ctx, 'γ does not land in the context of the terms')
    return TyEq(
        sub.source,
        TySubst(Ident(a.left, b.left), sub.left),
        Ident(TmSubst(a.left, sub.left), TmSubst(b.left, sub.left)),
    )


# Unit type

def _n1_form(p):
    _shape(p)
    return TyEq(Unit(), UnitTy(), UnitTy())


def _n1_intro(p):
    _shape(p)
    return TmEq(Unit(), Zero(), Zero(), UnitTy())


def _n1_eta(p):
    (a,) = _shape(p, TmEq)
    _refl(a, 'a')
    if a.ctx == Unit() and a.ty == UnitTy():
        return TmEq(a.ctx, a.left, Zero(), a.ty)
    _need(a.ty == TySubst(UnitTy(), Empty(a.ctx)), 'a must have type N₁ in the empty context or N₁[⟨⟩_Γ]')
    return TmEq(a.ctx, a.left, TmSubst(Zero(), Empty(a.ctx)), a.ty)


# Σ and Π

def _family(a, b, *, reflexive: bool = False):
    """Shared check for premises Γ ⊢ A = A' and Γ.A ⊢ B = B'."""
    if reflexive:
        _refl(a, 'A')
        _refl(b, 'B')
    _need(b.ctx == Cons(a.ctx, a.left), 'family must live over Γ.A')


def _point(a_ty, ctx, tm):
    return Ext(Id(ctx), tm, a_ty)


def _former(cls):
    def form(p):
        a, b = _shape(p, TyEq, TyEq)
        _family(a, b)
        return TyEq(a.ctx, cls(a.left, b.left), cls(a.right, b.right))
    return form


def _sigma_fst(p):
    a, c = _shape(p, TyEq, TmEq)
    _need(c.ctx == a.ctx and isinstance(c.ty, Sigma) and c.ty.dom == a.left, 'c must have type Σ(A, B)')
    return TmEq(a.ctx, Fst(a.left, c.left), Fst(a.right, c.right), a.left)


def _sigma_snd(p):
    a, b, c = _shape(p, TyEq, TyEq, TmEq)
    _family(a, b)
    _need(c.ctx == a.ctx and c.ty == Sigma(a.left, b.left), 'c must have type Σ(A, B)')
    return TmEq(
        a.ctx,
        Snd(a.left, b.left, c.left),
        Snd(a.right, b.right, c.right),
        TySubst(b.left, _point(a.left, a.ctx, Fst(a.left, c.left))),
    )


def _pair_parts(p, *, reflexive: bool):
    a, b, x, y = _shape(p, TyEq, TyEq, TmEq, TmEq)
    _family(a, b, reflexive=reflexive)
    if reflexive:
        _refl(x, 'a')
        _refl(y, 'b')
    _need(x.ctx == a.ctx and x.ty == a.left, 'first component must have type A')
    _need(y.ctx == a.ctx and y.ty == TySubst(b.left, _point(a.left, a.ctx, x.left)), 'second component must have type B[⟨id, a⟩]')
    return a, b, x, y


def _sigma_pair(p):
    a, b, x, y = _pair_parts(p, reflexive=False)
    return TmEq(
        a.ctx,
        Pair(a.left, b.left, x.left, y.left),
        Pair(a.right, b.right, x.right, y.right),
        Sigma(a.left, b.left),
    )


def _sigma_beta_fst(p):
    a, b, x, y = _pair_parts(p, reflexive=True)
    pair = Pair(a.left, b.left, x.left, y.left)
    return TmEq(a.ctx, Fst(a.left, pair), x.left, a.left)


def _sigma_beta_snd(p):
    a, b, x, y = _pair_parts(p, reflexive=True)
    pair = Pair(a.left, b.left, x.left, y.left)
    return TmEq(
        a.ctx,
        Snd(a.left, b.left, pair),
        y.left,
        TySubst(b.left, _point(a.left, a.ctx, Fst(a.left, pair))),
    )


def _sigma_eta(p):
    a, b, c = _shape(p, TyEq, TyEq, TmEq)
    _family(a, b, reflexive=True)
    _refl(c, 'c')
    _need(c.ctx == a.ctx and c.ty == Sigma(a.left, b.left), 'c must have type Σ(A, B)')
    expanded = Pair(a.left, b.left, Fst(a.left, c.left), Snd(a.left, b.left, c.left))
    return TmEq(a.ctx, c.left, expanded, c.ty)


def _stable(a, sub):
    _refl(sub, 'γ')
    _need(sub.target == a.ctx, 'γ does not land in Γ')


def _subst_former(cls):
    def subst(p):
        a, b, sub = _shape(p, TyEq, TyEq, SubEq)
        _family(a, b, reflexive=True)
        _stable(a, sub)
        gamma = sub.left
        return TyEq(
            sub.source,
            TySubst(cls(a.left, b.left), gamma),
            cls(TySubst(a.left, gamma), TySubst(b.left, lift(gamma, a.left, checked=False))),
        )
    return subst


def _sigma_fst_subst(p):
    a, c, sub = _shape(p, TyEq, TmEq, SubEq)
    _refl(a, 'A')
    _refl(c, 'c')
    _need(c.ctx == a.ctx and isinstance(c.ty, Sigma) and c.ty.dom == a.left, 'c must have type Σ(A, B)')
    _stable(a, sub)
    gamma = sub.left
    return TmEq(
        sub.source,
        TmSubst(Fst(a.left, c.left), gamma),
        Fst(TySubst(a.left, gamma), TmSubst(c.left, gamma)),
        TySubst(a.left, gamma),
    )


def _sigma_snd_subst(p):
    a, b, c, sub = _shape(p, TyEq, TyEq, TmEq, SubEq)
    _family(a, b, reflexive=True)
    _refl(c, 'c')
    _need(c.ctx == a.ctx and c.ty == Sigma(a.left, b.left), 'c must have type Σ(A, B)')
    _stable(a, sub)
    gamma = sub.left
    return TmEq(
        sub.source,
        TmSubst(Snd(a.left, b.left, c.left), gamma),
        Snd(TySubst(a.left, gamma), TySubst(b.left, lift(gamma, a.left, checked=False)), TmSubst(c.left, gamma)),
        TySubst(b.left, Ext(gamma, TmSubst(Fst(a.left, c.left), gamma), a.left)),
    )


def _sigma_pair_subst(p):
    *parts, sub = _shape(p, TyEq, TyEq, TmEq, TmEq, SubEq)
    a, b, x, y = _pair_parts(parts, reflexive=True)
    _stable(a, sub)
    gamma = sub.left
    return TmEq(
        sub.source,
        TmSubst(Pair(a.left, b.left, x.left, y.left), gamma),
        Pair(
            TySubst(a.left, gamma),
            TySubst(b.left, lift(gamma, a.left, checked=False)),
            TmSubst(x.left, gamma),
            TmSubst(y.left, gamma),
        ),
        TySubst(Sigma(a.left, b.left), gamma),
    )


def _pi_lam(p):
    a, body = _shape(p, TyEq, TmEq)
    _need(body.ctx == Cons(a.ctx, a.left), 'body must live over Γ.A')
    return TmEq(a.ctx, Lam(a.left, body.left), Lam(a.right, body.right), Pi(a.left, body.ty))


def _pi_ap(p):
    a, b, c, x = _shape(p, TyEq, TyEq, TmEq, TmEq)
    _family(a, b)
    _need(c.ctx == a.ctx and c.ty == Pi(a.left, b.left), 'function must have type Π(A, B)')
    _need(x.ctx == a.ctx and x.ty == a.left, 'argument must have type A')
    return TmEq(
        a.ctx,
        Ap(a.left, b.left, c.left, x.left),
        Ap(a.right, b.right, c.right, x.right),
        TySubst(b.left, _point(a.left, a.ctx, x.left)),
    )


def _pi_beta(p):
    body, x = _shape(p, TmEq, TmEq)
    _refl(body, 'b')
    _refl(x, 'a')
    _need(body.ctx == Cons(x.ctx, x.ty), 'body must live over Γ.A where a : A')
    a_ty, b_ty, ctx = x.ty, body.ty, x.ctx
    point = _point(a_ty, ctx, x.left)
    return TmEq(ctx, Ap(a_ty, b_ty, Lam(a_ty, body.left), x.left), TmSubst(body.left, point), TySubst(b_ty, point))


def _pi_eta(p):
    (c,) = _shape(p, TmEq)
    _refl(c, 'c')
    _need(isinstance(c.ty, Pi), 'c must have a Π-type')
    a_ty, b_ty = c.ty.dom, c.ty.cod
    weaken = Proj(a_ty)
    body = Ap(
        TySubst(a_ty, weaken),
        TySubst(b_ty, lift(weaken, a_ty, checked=False)),
        TmSubst(c.left, weaken),
        Var(a_ty),
    )
    return TmEq(c.ctx, Lam(a_ty, body), c.left, c.ty)


def _pi_lam_subst(p):
    body, sub = _shape(p, TmEq, SubEq)
    _refl(body, 'b')
    _refl(sub, 'γ')
    _need(isinstance(body.ctx, Cons), 'body must live over a context extension')
    ctx, a_ty = body.ctx.parent, body.ctx.ty
    _need(sub.target == ctx, 'γ does not land in Γ')
    gamma = sub.left
    return TmEq(
        sub.source,
        TmSubst(Lam(a_ty, body.left), gamma),
        Lam(TySubst(a_ty, gamma), TmSubst(body.left, lift(gamma, a_ty, checked=False))),
        TySubst(Pi(a_ty, body.ty), gamma),
    )


def _pi_ap_subst(p):
    c, x, sub = _shape(p, TmEq, TmEq, SubEq)
    _refl(c, 'c')
    _refl(x, 'a')
    _refl(sub, 'γ')
    _need(isinstance(c.ty, Pi), 'c must have a Π-type')
    a_ty, b_ty = c.ty.dom, c.ty.cod
    _need(x.ctx == c.ctx and x.ty == a_ty, 'argument must have type A')
    _need(sub.target == c.ctx, 'γ does not land in Γ')
    gamma = sub.left
    return TmEq(
        sub.source,
        TmSubst(Ap(a_ty, b_ty, c.left, x.left), gamma),
        Ap(TySubst(a_ty, gamma), TySubst(b_ty, lift(gamma, a_ty, checked=False)), TmSubst(c.left, gamma), TmSubst(x.left, gamma)),
        TySubst(b_ty, Ext(gamma, TmSubst(x.left, gamma), a_ty)),
    )


def _plain(fn: Callable) -> Callable:
    def rule(premises, side):
        _need(not side, 'this rule takes no side parameters')
        return fn(premises)
    return rule


_TRANS_CTX, _SYM_CTX = _per(CtxEq)
_TRANS_SUB, _SYM_SUB = _per(SubEq)
_TRANS_TY, _SYM_TY = _per(TyEq)
_TRANS_TM, _SYM_TM = _per(TmEq)

CATALOG: dict[RuleId, Callable] = {
    RuleId.TRANS_CTX: _TRANS_CTX,
    RuleId.SYM_CTX: _SYM_CTX,
    RuleId.TRANS_SUB: _TRANS_SUB,
    RuleId.SYM_SUB: _SYM_SUB,
    RuleId.TRANS_TY: _TRANS_TY,
    RuleId.SYM_TY: _SYM_TY,
    RuleId.TRANS_TM: _TRANS_TM,
    RuleId.SYM_TM: _SYM_TM,
    RuleId.PRES_SUB: _plain(_pres_sub),
    RuleId.PRES_TY: _plain(_pres_ty),
    RuleId.PRES_TM: _plain(_pres_tm),
    RuleId.CONG_COMP: _plain(_cong_comp),
    RuleId.CONG_ID: _plain(_cong_id),
    RuleId.CONG_TYSUB: _plain(_cong_tysub),
    RuleId.CONG_TMSUB: _plain(_cong_tmsub),
    RuleId.CONG_UNIT: _plain(_cong_unit),
    RuleId.CONG_EMPTY: _plain(_cong_empty),
    RuleId.CONG_CONS: _plain(_cong_cons),
    RuleId.CONG_PROJ: _plain(_cong_proj),
    RuleId.CONG_VAR: _plain(_cong_var),
    RuleId.CONG_EXT: _plain(_cong_ext),
    RuleId.ASSOC: _plain(_assoc),
    RuleId.ID_LEFT: _plain(_id_left),
    RuleId.ID_RIGHT: _plain(_id_right),
    RuleId.TYSUB_COMP: _plain(_tysub_comp),
    RuleId.TYSUB_ID: _plain(_tysub_id),
    RuleId.TMSUB_COMP: _plain(_tmsub_comp),
    RuleId.TMSUB_ID: _plain(_tmsub_id),
    RuleId.EMPTY_UNIQUE: _plain(_empty_unique),
    RuleId.PROJ_BETA: _plain(_proj_beta),
    RuleId.VAR_BETA: _plain(_var_beta),
    RuleId.SURJECTIVE_PAIRING: _plain(_surjective_pairing),
    RuleId.BASE_TYPE: _plain(_base_type),
    RuleId.I_FORM: _plain(_i_form),
    RuleId.I_INTRO: _plain(_i_intro),
    RuleId.I_REFLECTION: _plain(_i_reflection),
    RuleId.I_UNIQUE: _plain(_i_unique),
    RuleId.I_SUBST: _plain(_i_subst),
    RuleId.N1_FORM: _plain(_n1_form),
    RuleId.N1_INTRO: _plain(_n1_intro),
    RuleId.N1_ETA: _plain(_n1_eta),
    RuleId.SIGMA_FORM: _plain(_former(Sigma)),
    RuleId.SIGMA_FST: _plain(_sigma_fst),
    RuleId.SIGMA_SND: _plain(_sigma_snd),
    RuleId.SIGMA_PAIR: _plain(_sigma_pair),
    RuleId.SIGMA_BETA_FST: _plain(_sigma_beta_fst),
    RuleId.SIGMA_BETA_SND: _plain(_sigma_beta_snd),
    RuleId.SIGMA_ETA: _plain(_sigma_eta),
    RuleId.SIGMA_SUBST: _plain(_subst_former(Sigma)),
    RuleId.SIGMA_FST_SUBST: _plain(_sigma_fst_subst),
    RuleId.SIGMA_SND_SUBST: _plain(_sigma_snd_subst),
    RuleId.SIGMA_PAIR_SUBST: _plain(_sigma_pair_subst),
    RuleId.PI_FORM: _plain(_former(Pi)),
    RuleId.PI_LAM: _plain(_pi_lam),
    RuleId.PI_AP: _plain(_pi_ap),
    RuleId.PI_BETA: _plain(_pi_beta),
    RuleId.PI_ETA: _plain(_pi_eta),
    RuleId.PI_SUBST: _plain(_subst_former(Pi)),
    RuleId.PI_LAM_SUBST: _plain(_pi_lam_subst),
    RuleId.PI_AP_SUBST: _plain(_pi_ap_subst),
}


# Derivations

@dataclass(frozen=True, eq=False)
class Derivation:
    rule: RuleId
    conclusion: Judgment
    premises: tuple = ()
    side: tuple = ()

    def __str__(self):
        return print_derivation(self)


def instantiate(rule: RuleId, premises: list[Judgment], side: tuple = ()) -> Judgment:
    """The conclusion `rule` licenses from the given premise conclusions."""
    fn = CATALOG.get(rule)
    if fn is None:
        raise RuleError(f"unknown rule {rule!r}")
    try:
        return fn(list(premises), tuple(side))
    except RuleError as exc:
        raise RuleError(exc.reason, rule.value) from None


def mk(rule: RuleId, premises: list[Derivation] | tuple = (), side: tuple = ()) -> Derivation:
    """Validating constructor: the conclusion is computed, never supplied."""
    if not isinstance(rule, RuleId):
        try:
            rule = RuleId(rule)
        except ValueError:
            raise RuleError(f"unknown rule {rule!r}") from None
    premises = tuple(premises)
    concl = instantiate(rule, [d.conclusion for d in premises], side)
    return Derivation(rule, concl, premises, tuple(side))


def conclusion(d: Derivation) -> Judgment:
    return d.conclusion


def check(d: Derivation) -> None:
    """
    Validate every node of `d`; raise RuleError naming the first failing
    node in pre-order. Shared subderivations are inspected once.
    """
    seen = set()
    stack = [(d, ())]
    while stack:
        node, path = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if not isinstance(node, Derivation) or not isinstance(node.rule, RuleId):
            raise RuleError('unknown rule or malformed node', '', path)
        try:
            expected = instantiate(node.rule, [p.conclusion for p in node.premises], node.side)
        except RuleError as exc:
            raise RuleError(exc.reason, node.rule.value, path) from None
        if expected != node.conclusion:
            raise RuleError(
                f"conclusion {print_judgment(node.conclusion)} does not match the rule instance {print_judgment(expected)}",
                node.rule.value,
                path,
            )
        for i in reversed(range(len(node.premises))):
            stack.append((node.premises[i], path + (i,)))


def rules_used(d: Derivation) -> set[RuleId]:
    used, seen, stack = set(), set(), [d]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        used.add(node.rule)
        stack.extend(node.premises)
    return used


def derivation_size(d: Derivation) -> int:
    """Number of distinct nodes."""
    seen, stack = set(), [d]
    while stack:
        node = stack.pop()
        if id(node) not in seen:
            seen.add(id(node))
            stack.extend(node.premises)
    return len(seen)


# Surface format

_JUDGMENTS = {
    CtxEq: ('ctx-eq', (Sort.CTX, Sort.CTX)),
    SubEq: ('sub-eq', (Sort.CTX, Sort.SUB, Sort.SUB, Sort.CTX)),
    TyEq: ('ty-eq', (Sort.CTX, Sort.TY, Sort.TY)),
    TmEq: ('tm-eq', (Sort.CTX, Sort.TM, Sort.TM, Sort.TY)),
}
_JUDGMENT_BY_HEAD = {head: (cls, sorts) for cls, (head, sorts) in _JUDGMENTS.items()}


def print_judgment(j: Judgment) -> str:
    head, _ = _JUDGMENTS[type(j)]
    return '(' + ' '.join([head] + [print_entity(part) for part in j._key()]) + ')'


def judgment_from_sexpr(form) -> Judgment:
    if not isinstance(form, SList) or not form.items or not isinstance(form.items[0], Token):
        line, column = form.line, form.column
        raise ParseError('expected a judgment', line, column, frozenset(f'({h}' for h in _JUDGMENT_BY_HEAD))
    head = form.items[0]
    entry = _JUDGMENT_BY_HEAD.get(head.text)
    if entry is None:
        raise ParseError(f"unknown judgment form {head.text!r}", head.line, head.column, frozenset(_JUDGMENT_BY_HEAD))
    cls, sorts = entry
    args = form.items[1:]
    if len(args) != len(sorts):
        raise ParseError(f"{head.text} takes {len(sorts)} components", head.line, head.column, frozenset({')'}))
    return cls(*(entity_from_sexpr(arg, sort) for arg, sort in zip(args, sorts)))


def parse_judgment(text: str) -> Judgment:
    return judgment_from_sexpr(read_sexpr(text))


def _keyword(form, word: str) -> tuple:
    if not isinstance(form, SList) or not form.items or not isinstance(form.items[0], Token) or form.items[0].text != word:
        raise ParseError(f"expected ({word} ...)", form.line, form.column, frozenset({f'({word}'}))
    return form.items[1:]


def _side_entity(form) -> RawEntity:
    return entity_from_sexpr(form)


def derivation_from_sexpr(form, shared: dict | None = None) -> Derivation:
    shared = {} if shared is None else shared
    if isinstance(form, SList) and form.items and isinstance(form.items[0], Token) and form.items[0].text == 'ref':
        name = form.items[1].text if len(form.items) == 2 and isinstance(form.items[1], Token) else None
        if name not in shared:
            raise ParseError(f"undefined reference {name!r}", form.line, form.column, frozenset(shared))
        return shared[name]
    args = _keyword(form, 'rule')
    if len(args) != 4 or not isinstance(args[0], Token):
        raise ParseError('expected (rule <id> (concl ...) (side ...) (prem ...))', form.line, form.column, frozenset({'(rule'}))
    try:
        rule = RuleId(args[0].text)
    except ValueError:
        raise ParseError(f"unknown rule {args[0].text!r}", args[0].line, args[0].column, frozenset(r.value for r in RuleId)) from None
    concl_forms = _keyword(args[1], 'concl')
    if len(concl_forms) != 1:
        raise ParseError('expected exactly one conclusion', args[1].line, args[1].column, frozenset({'(ctx-eq', '(sub-eq', '(ty-eq', '(tm-eq'}))
    concl_form = concl_forms[0]
    side = tuple(_side_entity(f) for f in _keyword(args[2], 'side'))
    premises = tuple(derivation_from_sexpr(f, shared) for f in _keyword(args[3], 'prem'))
    return Derivation(rule, judgment_from_sexpr(concl_form), premises, side)


def parse_derivation(text: str) -> Derivation:
    """
    Read a derivation file. Besides the plain `(rule ...)` tree, the shared
    form `(shared (def <name> <derivation>)* <derivation>)` with `(ref <name>)`
    premises is accepted; it is what `print_derivation` emits for DAGs.
    """
    form = read_sexpr(text)
    if isinstance(form, SList) and form.items and isinstance(form.items[0], Token) and form.items[0].text == 'shared':
        shared = {}
        *defs, root = form.items[1:]
        for d in defs:
            parts = _keyword(d, 'def')
            if len(parts) != 2 or not isinstance(parts[0], Token):
                raise ParseError('expected (def <name> <derivation>)', d.line, d.column, frozenset({'(def'}))
            shared[parts[0].text] = derivation_from_sexpr(parts[1], shared)
        return derivation_from_sexpr(root, shared)
    return derivation_from_sexpr(form)


def _node_text(d: Derivation, names: dict, indent: int) -> str:
    pad = '  ' * indent
    if id(d) in names:
        return f"{pad}(ref {names[id(d)]})"
    side = ' '.join(print_entity(e) for e in d.side)
    head = f"{pad}(rule {d.rule.value} (concl {print_judgment(d.conclusion)}) (side{' ' + side if side else ''}) (prem"
    if not d.premises:
        return head + '))'
    body = '\n'.join(_node_text(p, names, indent + 1) for p in d.premises)
    return f"{head}\n{body}))"


def print_derivation(d: Derivation) -> str:
    """Render `d`; subderivations used more than once are shared by name."""
    counts, order, stack = {}, [], [(d, False)]
    while stack:
        node, done = stack.pop()
        if done:
            order.append(node)
            continue
        counts[id(node)] = counts.get(id(node), 0) + 1
        if counts[id(node)] > 1:
            continue
        stack.append((node, True))
        stack.extend((p, False) for p in reversed(node.premises))
    repeated = [n for n in order if counts[id(n)] > 1 and n.premises]
    if not repeated:
        return _node_text(d, {}, 0)
    names = {}
    defs = []
    for node in repeated:
        text = _node_text(node, names, 1)
        names[id(node)] = f"d{len(names) + 1}"
        defs.append(f"  (def {names[id(node)]}\n{text})")
    return '(shared\n' + '\n'.join(defs) + '\n' + _node_text(d, names, 1) + ')'
