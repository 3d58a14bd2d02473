"""
Models of the calculus. `CwfModel` is the signature a model provides,
`FinSetCwf` the strict finite-set instance, `Interpreter` the partial
interpretation of raw syntax, and `soundness_check` evaluates every
judgment of a derivation in a model.

In FinSet a context is a list of elements (an element of Γ.A is a pair
(γ, x)), a type is a fiber per context element, a substitution maps
elements to elements and a term picks one fiber element per context
element. Element lists are kept in construction order, which is
deterministic and serves as the canonical order.
"""
from __future__ import annotations

import abc
import itertools
import logging
from dataclasses import dataclass
from functools import cached_property

from .exceptions import ShapeMismatch, Undefined
from .rules import CtxEq, Derivation, Judgment, SubEq, TmEq, TyEq
from .syntax import (
    Ap, Base, Comp, Cons, Empty, Ext, Fst, Id, Ident, Lam, Pair, Pi, Proj, RawCtx, RawEntity, RawSub, RawTm,
    RawTy, Refl, Sigma, Snd, TmSubst, TySubst, Unit, UnitTy, Var, Zero, cod, ctxof, dom, typeof,
)

logger = logging.getLogger(__name__)

TT = 'tt'
REFL = 'refl'


@dataclass(frozen=True)
class FinCtx:
    elements: tuple

    @cached_property
    def _positions(self) -> dict:
        return {e: i for i, e in enumerate(self.elements)}

    def index(self, element) -> int:
        try:
            return self._positions[element]
        except KeyError:
            raise Undefined(f"{element!r} is not an element of this context") from None

    def __len__(self):
        return len(self.elements)


@dataclass(frozen=True)
class FinTy:
    ctx: FinCtx
    fibers: tuple

    def fiber(self, element) -> tuple:
        return self.fibers[self.ctx.index(element)]


@dataclass(frozen=True)
class FinSub:
    source: FinCtx
    target: FinCtx
    images: tuple


@dataclass(frozen=True)
class FinTm:
    ty: FinTy
    values: tuple

    def at(self, element):
        return self.values[self.ty.ctx.index(element)]


class CwfModel(abc.ABC):
    """Operations of a category with families; the type formers are optional."""

    @abc.abstractmethod
    def terminal(self): ...

    @abc.abstractmethod
    def comprehension(self, ty): ...

    @abc.abstractmethod
    def identity(self, ctx): ...

    @abc.abstractmethod
    def compose(self, outer, inner): ...

    @abc.abstractmethod
    def bang(self, ctx): ...

    @abc.abstractmethod
    def ty_action(self, ty, sub): ...

    @abc.abstractmethod
    def tm_action(self, tm, sub): ...

    @abc.abstractmethod
    def proj(self, ty): ...

    @abc.abstractmethod
    def var(self, ty): ...

    @abc.abstractmethod
    def extend(self, sub, tm, ty): ...

    @abc.abstractmethod
    def base(self): ...

    def ident(self, left, right):
        raise Undefined(f"{type(self).__name__} has no identity types")

    def refl(self, tm):
        raise Undefined(f"{type(self).__name__} has no identity types")

    def unit(self):
        raise Undefined(f"{type(self).__name__} has no unit type")

    def zero(self):
        raise Undefined(f"{type(self).__name__} has no unit type")

    def sigma(self, a, b):
        raise Undefined(f"{type(self).__name__} has no Σ-types")

    def pair(self, a, b, x, y):
        raise Undefined(f"{type(self).__name__} has no Σ-types")

    def fst(self, a, c):
        raise Undefined(f"{type(self).__name__} has no Σ-types")

    def snd(self, a, b, c):
        raise Undefined(f"{type(self).__name__} has no Σ-types")

    def pi(self, a, b):
        raise Undefined(f"{type(self).__name__} has no Π-types")

    def lam(self, a, body):
        raise Undefined(f"{type(self).__name__} has no Π-types")

    def ap(self, a, b, c, x):
        raise Undefined(f"{type(self).__name__} has no Π-types")


def _need(condition: bool, message: str):
    if not condition:
        raise Undefined(message)


class FinSetCwf(CwfModel):
    def __init__(self, base_size: int = 2):
        if base_size < 0:
            raise ValueError('base_size must be non-negative')
        self.base_size = base_size

    def __repr__(self):
        return f"FinSetCwf(base_size={self.base_size})"

    def terminal(self) -> FinCtx:
        return FinCtx(((),))

    def comprehension(self, ty: FinTy) -> FinCtx:
        return FinCtx(tuple((g, x) for g, fiber in zip(ty.ctx.elements, ty.fibers) for x in fiber))

    def identity(self, ctx: FinCtx) -> FinSub:
        return FinSub(ctx, ctx, ctx.elements)

    def compose(self, outer: FinSub, inner: FinSub) -> FinSub:
        _need(inner.target == outer.source, 'composite of non-composable maps')
        images = tuple(outer.images[outer.source.index(e)] for e in inner.images)
        return FinSub(inner.source, outer.target, images)

    def bang(self, ctx: FinCtx) -> FinSub:
        return FinSub(ctx, self.terminal(), ((),) * len(ctx))

    def ty_action(self, ty: FinTy, sub: FinSub) -> FinTy:
        _need(sub.target == ty.ctx, 'substitution does not land in the context of the type')
        return FinTy(sub.source, tuple(ty.fiber(e) for e in sub.images))

    def tm_action(self, tm: FinTm, sub: FinSub) -> FinTm:
        _need(sub.target == tm.ty.ctx, 'substitution does not land in the context of the term')
        return FinTm(self.ty_action(tm.ty, sub), tuple(tm.at(e) for e in sub.images))

    def proj(self, ty: FinTy) -> FinSub:
        ext = self.comprehension(ty)
        return FinSub(ext, ty.ctx, tuple(e[0] for e in ext.elements))

    def var(self, ty: FinTy) -> FinTm:
        ext = self.comprehension(ty)
        return FinTm(self.ty_action(ty, self.proj(ty)), tuple(e[1] for e in ext.elements))

    def extend(self, sub: FinSub, tm: FinTm, ty: FinTy) -> FinSub:
        _need(tm.ty == self.ty_action(ty, sub), 'term does not have type A[γ]')
        images = tuple(zip(sub.images, tm.values))
        return FinSub(sub.source, self.comprehension(ty), images)

    def base(self) -> FinTy:
        return FinTy(self.terminal(), (tuple(range(self.base_size)),))

    def ident(self, left: FinTm, right: FinTm) -> FinTy:
        _need(left.ty == right.ty, 'identity type between terms of different types')
        fibers = tuple((REFL,) if x == y else () for x, y in zip(left.values, right.values))
        return FinTy(left.ty.ctx, fibers)

    def refl(self, tm: FinTm) -> FinTm:
        return FinTm(self.ident(tm, tm), (REFL,) * len(tm.values))

    def unit(self) -> FinTy:
        return FinTy(self.terminal(), ((TT,),))

    def zero(self) -> FinTm:
        return FinTm(self.unit(), (TT,))

    def _point(self, a: FinTy, x: FinTm) -> FinSub:
        return self.extend(self.identity(a.ctx), x, a)

    def sigma(self, a: FinTy, b: FinTy) -> FinTy:
        _need(b.ctx == self.comprehension(a), 'family does not live over Γ.A')
        fibers = tuple(
            tuple((x, y) for x in fiber for y in b.fiber((g, x)))
            for g, fiber in zip(a.ctx.elements, a.fibers)
        )
        return FinTy(a.ctx, fibers)

    def pair(self, a: FinTy, b: FinTy, x: FinTm, y: FinTm) -> FinTm:
        _need(x.ty == a, 'first component does not have type A')
        _need(y.ty == self.ty_action(b, self._point(a, x)), 'second component does not have type B[⟨id, a⟩]')
        return FinTm(self.sigma(a, b), tuple(zip(x.values, y.values)))

    def fst(self, a: FinTy, c: FinTm) -> FinTm:
        _need(c.ty.ctx == a.ctx, 'projection from another context')
        values = []
        for fiber, own, v in zip(a.fibers, c.ty.fibers, c.values):
            _need(all(isinstance(e, tuple) and len(e) == 2 and e[0] in fiber for e in own), 'not a Σ-type over A')
            values.append(v[0])
        return FinTm(a, tuple(values))

    def snd(self, a: FinTy, b: FinTy, c: FinTm) -> FinTm:
        _need(c.ty == self.sigma(a, b), 'c does not have type Σ(A, B)')
        first = self.fst(a, c)
        return FinTm(self.ty_action(b, self._point(a, first)), tuple(v[1] for v in c.values))

    def pi(self, a: FinTy, b: FinTy) -> FinTy:
        _need(b.ctx == self.comprehension(a), 'family does not live over Γ.A')
        fibers = []
        for g, fiber in zip(a.ctx.elements, a.fibers):
            choices = [b.fiber((g, x)) for x in fiber]
            fibers.append(tuple(tuple(zip(fiber, combo)) for combo in itertools.product(*choices)))
        return FinTy(a.ctx, tuple(fibers))

    def lam(self, a: FinTy, body: FinTm) -> FinTm:
        _need(body.ty.ctx == self.comprehension(a), 'body does not live over Γ.A')
        values = tuple(
            tuple((x, body.at((g, x))) for x in fiber)
            for g, fiber in zip(a.ctx.elements, a.fibers)
        )
        return FinTm(self.pi(a, body.ty), values)

    def ap(self, a: FinTy, b: FinTy, c: FinTm, x: FinTm) -> FinTm:
        _need(c.ty == self.pi(a, b), 'function does not have type Π(A, B)')
        _need(x.ty == a, 'argument does not have type A')
        values = tuple(dict(table)[v] for table, v in zip(c.values, x.values))
        return FinTm(self.ty_action(b, self._point(a, x)), values)


# Interpretation

class Interpreter:
    """
    ⟦−⟧ on raw syntax, defined by structural recursion and partial: any
    mismatch between the pieces raises Undefined.
    """

    def __init__(self, model: CwfModel):
        self.model = model
        self._cache: dict = {}

    def __call__(self, entity: RawEntity):
        try:
            return self._cache[entity]
        except KeyError:
            pass
        match entity:
            case RawCtx():
                value = self._ctx(entity)
            case RawSub():
                value = self._sub(entity)
            case RawTy():
                value = self._ty(entity)
            case RawTm():
                value = self._tm(entity)
            case _:
                raise Undefined(f"not a raw entity: {entity!r}")
        self._cache[entity] = value
        return value

    def _ctx(self, ctx):
        m = self.model
        match ctx:
            case Unit():
                return m.terminal()
            case Cons(parent, ty):
                sem = self(ty)
                _need(sem.ctx == self(parent), f"{ty} does not live in {parent}")
                return m.comprehension(sem)

    def _sub(self, sub):
        m = self.model
        match sub:
            case Comp(outer, inner):
                if self(dom(outer)) != self(cod(inner)):
                    raise Undefined(f"{inner} does not land where {outer} starts")
                return m.compose(self(outer), self(inner))
            case Id(ctx):
                return m.identity(self(ctx))
            case Empty(ctx):
                return m.bang(self(ctx))
            case Proj(ty):
                return m.proj(self(ty))
            case Ext(inner, tm, ty):
                return m.extend(self(inner), self(tm), self(ty))

    def _ty(self, ty):
        m = self.model
        match ty:
            case Base():
                return m.base()
            case TySubst(inner, sub):
                return m.ty_action(self(inner), self(sub))
            case Ident(left, right):
                return m.ident(self(left), self(right))
            case UnitTy():
                return m.unit()
            case Sigma(a, b):
                return m.sigma(self(a), self(b))
            case Pi(a, b):
                return m.pi(self(a), self(b))

    def _tm(self, tm):
        m = self.model
        match tm:
            case TmSubst(inner, sub):
                return m.tm_action(self(inner), self(sub))
            case Var(ty):
                return m.var(self(ty))
            case Refl(inner):
                return m.refl(self(inner))
            case Zero():
                return m.zero()
            case Fst(a, c):
                return m.fst(self(a), self(c))
            case Snd(a, b, c):
                return m.snd(self(a), self(b), self(c))
            case Pair(a, b, x, y):
                return m.pair(self(a), self(b), self(x), self(y))
            case Ap(a, b, c, x):
                return m.ap(self(a), self(b), self(c), self(x))
            case Lam(a, body):
                return m.lam(self(a), self(body))


def interp(entity: RawEntity, model: CwfModel):
    return Interpreter(model)(entity)


def interp_ctx(ctx: RawCtx, model: CwfModel) -> FinCtx:
    return interp(ctx, model)


def interp_sub(sub: RawSub, model: CwfModel) -> FinSub:
    return interp(sub, model)


def interp_ty(ty: RawTy, model: CwfModel) -> FinTy:
    return interp(ty, model)


def interp_tm(tm: RawTm, model: CwfModel) -> FinTm:
    return interp(tm, model)


class PointwiseEvaluator:
    """
    FinSet semantics computed one context element at a time, by a recursion
    independent of `Interpreter`; `evaluate` tabulates it into the same
    value shapes so the two can be compared exactly.
    """

    def __init__(self, base_size: int = 2):
        self.base_size = base_size

    def elements(self, ctx: RawCtx) -> tuple:
        if isinstance(ctx, Unit):
            return ((),)
        return tuple((g, x) for g in self.elements(ctx.parent) for x in self.fiber(ctx.ty, g))

    def fiber(self, ty: RawTy, g) -> tuple:
        match ty:
            case Base():
                return tuple(range(self.base_size))
            case TySubst(inner, sub):
                return self.fiber(inner, self.image(sub, g))
            case Ident(left, right):
                return (REFL,) if self.value(left, g) == self.value(right, g) else ()
            case UnitTy():
                return (TT,)
            case Sigma(a, b):
                return tuple((x, y) for x in self.fiber(a, g) for y in self.fiber(b, (g, x)))
            case Pi(a, b):
                xs = self.fiber(a, g)
                choices = [self.fiber(b, (g, x)) for x in xs]
                return tuple(tuple(zip(xs, combo)) for combo in itertools.product(*choices))
        raise Undefined(f"not a type: {ty!r}")

    def image(self, sub: RawSub, g):
        match sub:
            case Comp(outer, inner):
                return self.image(outer, self.image(inner, g))
            case Id():
                return g
            case Empty():
                return ()
            case Proj():
                return g[0]
            case Ext(inner, tm, _):
                return self.image(inner, g), self.value(tm, g)
        raise Undefined(f"not a substitution: {sub!r}")

    def value(self, tm: RawTm, g):
        match tm:
            case TmSubst(inner, sub):
                return self.value(inner, self.image(sub, g))
            case Var():
                return g[1]
            case Refl():
                return REFL
            case Zero():
                return TT
            case Fst(_, c):
                return self.value(c, g)[0]
            case Snd(_, _, c):
                return self.value(c, g)[1]
            case Pair(_, _, x, y):
                return self.value(x, g), self.value(y, g)
            case Ap(_, _, c, x):
                return dict(self.value(c, g))[self.value(x, g)]
            case Lam(a, body):
                return tuple((x, self.value(body, (g, x))) for x in self.fiber(a, g))
        raise Undefined(f"not a term: {tm!r}")

    def _ty(self, ty: RawTy) -> FinTy:
        ctx = self.elements(ctxof(ty))
        return FinTy(FinCtx(ctx), tuple(self.fiber(ty, g) for g in ctx))

    def evaluate(self, entity: RawEntity):
        match entity:
            case RawCtx():
                return FinCtx(self.elements(entity))
            case RawSub():
                source = self.elements(dom(entity))
                images = tuple(self.image(entity, g) for g in source)
                return FinSub(FinCtx(source), FinCtx(self.elements(cod(entity))), images)
            case RawTy():
                return self._ty(entity)
            case RawTm():
                ty = self._ty(typeof(entity))
                return FinTm(ty, tuple(self.value(entity, g) for g in ty.ctx.elements))
        raise Undefined(f"not a raw entity: {entity!r}")


# Soundness

@dataclass(frozen=True)
class Sound:
    judgments: int


@dataclass(frozen=True)
class CounterModel:
    judgment: Judgment
    path: tuple
    left: object = None
    right: object = None
    reason: str = ''

    def __bool__(self):
        return False


def _restrict(value, keep):
    """The parts of a semantic value over the kept context positions."""
    if keep is None:
        return value
    match value:
        case FinTy(_, fibers):
            return tuple(fibers[i] for i in keep)
        case FinTm(ty, values):
            return _restrict(ty, keep), tuple(values[i] for i in keep)
        case FinSub(_, _, images):
            return tuple(images[i] for i in keep)
    return value


def _kept(ctx: RawCtx, sem_ctx: FinCtx, env) -> list | None:
    """Context positions lying over the environment point, or None for all."""
    if env is None:
        return None
    prefix, point = env
    depth, walk = 0, ctx
    while walk != prefix:
        if not isinstance(walk, Cons):
            return None
        walk, depth = walk.parent, depth + 1
    keep = []
    for i, e in enumerate(sem_ctx.elements):
        for _ in range(depth):
            e = e[0]
        if e == point:
            keep.append(i)
    return keep


def _compare(j: Judgment, sem: Interpreter, env) -> tuple | None:
    """(left value, right value) when the judgment fails in the model."""
    match j:
        case CtxEq(left, right):
            lv, rv = sem(left), sem(right)
            return None if lv == rv else (lv, rv)
        case SubEq(source, left, right, target):
            src, tgt = sem(source), sem(target)
            lv, rv = sem(left), sem(right)
            if not (lv.source == rv.source == src and lv.target == rv.target == tgt):
                return lv, rv
            keep = _kept(source, src, env)
        case TyEq(ctx, left, right):
            c = sem(ctx)
            lv, rv = sem(left), sem(right)
            if not lv.ctx == rv.ctx == c:
                return lv, rv
            keep = _kept(ctx, c, env)
        case TmEq(ctx, left, right, ty):
            c, t = sem(ctx), sem(ty)
            lv, rv = sem(left), sem(right)
            if not lv.ty.ctx == rv.ty.ctx == t.ctx == c:
                return lv, rv
            keep = _kept(ctx, c, env)
            if not _restrict(lv.ty, keep) == _restrict(rv.ty, keep) == _restrict(t, keep):
                return lv, rv
    if _restrict(lv, keep) != _restrict(rv, keep):
        return lv, rv
    return None


def soundness_check(d: Derivation, model: CwfModel, env: tuple | None = None) -> Sound | CounterModel:
    """
    Interpret both sides of every judgment in `d`. With `env = (Γ, ρ)`,
    judgments over extensions of Γ are compared only above the point ρ of ⟦Γ⟧.
    """
    sem = Interpreter(model)
    seen = set()
    stack = [(d, ())]
    count = 0
    while stack:
        node, path = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        count += 1
        j = node.conclusion
        try:
            failure = _compare(j, sem, env)
        except Undefined as exc:
            logger.error(f"{j} is undefined in {model}: {exc}")
            return CounterModel(j, path, reason=str(exc))
        if failure is not None:
            logger.error(f"{j} fails in {model} at {list(path)}")
            return CounterModel(j, path, *failure)
        for i in reversed(range(len(node.premises))):
            stack.append((node.premises[i], path + (i,)))
    return Sound(count)


# Type morphisms in FinSet

@dataclass(frozen=True)
class FinTyMorphism:
    """A map A → A' over Γ, one fiber map per context element."""
    source: FinTy
    target: FinTy
    maps: tuple

    def image(self, i: int, x):
        return dict(self.maps[i])[x]

    def is_iso(self) -> bool:
        return all(
            sorted(map(repr, (y for _, y in fmap))) == sorted(map(repr, fiber))
            for fmap, fiber in zip(self.maps, self.target.fibers)
        )


def identity_type_morphism(ty: FinTy) -> FinTyMorphism:
    return FinTyMorphism(ty, ty, tuple(tuple((x, x) for x in fiber) for fiber in ty.fibers))


def compose_type_morphisms(first: FinTyMorphism, second: FinTyMorphism) -> FinTyMorphism:
    """second ∘ first"""
    if first.target != second.source:
        raise ShapeMismatch('type morphisms are not composable')
    maps = tuple(
        tuple((x, dict(g)[y]) for x, y in f)
        for f, g in zip(first.maps, second.maps)
    )
    return FinTyMorphism(first.source, second.target, maps)


def invert_type_morphism(f: FinTyMorphism) -> FinTyMorphism:
    if not f.is_iso():
        raise ShapeMismatch('type morphism is not an isomorphism')
    maps = tuple(tuple((y, x) for x, y in fmap) for fmap in f.maps)
    return FinTyMorphism(f.target, f.source, maps)


def _family_target(model: FinSetCwf, f_a: FinTyMorphism, f_b: FinTyMorphism) -> FinTy:
    """B' over Γ.A' read off f_B : B ≅ B'[f_A]."""
    source_ext = model.comprehension(f_a.source)
    if f_b.source.ctx != source_ext or f_b.target.ctx != source_ext:
        raise ShapeMismatch('family morphism does not live over Γ.A')
    back = invert_type_morphism(f_a)
    target_ext = model.comprehension(f_a.target)
    fibers = []
    for g, x2 in target_ext.elements:
        i = f_a.source.ctx.index(g)
        fibers.append(f_b.target.fiber((g, back.image(i, x2))))
    return FinTy(target_ext, tuple(fibers))


def compose_over(model: FinSetCwf, f_a: FinTyMorphism, f_b: FinTyMorphism, g_b: FinTyMorphism) -> FinTyMorphism:
    """g_B ∘ f_B : B → B''[g_A ∘ f_A] for f_B over f_A and g_B over g_A."""
    ext = model.comprehension(f_a.source)
    if f_b.source.ctx != ext:
        raise ShapeMismatch('family morphism does not live over Γ.A')
    mid_ext = model.comprehension(f_a.target)
    maps, fibers = [], []
    for i, (g, x) in enumerate(ext.elements):
        j = mid_ext.index((g, f_a.image(f_a.source.ctx.index(g), x)))
        maps.append(tuple((y, g_b.image(j, z)) for y, z in f_b.maps[i]))
        fibers.append(g_b.target.fibers[j])
    return FinTyMorphism(f_b.source, FinTy(ext, tuple(fibers)), tuple(maps))


def sigma_map(model: FinSetCwf, f_a: FinTyMorphism, f_b: FinTyMorphism) -> FinTyMorphism:
    """Σ(f_A, f_B) : Σ(A, B) ≅ Σ(A', B'), (x, y) ↦ (f_A x, f_B y)."""
    if not f_a.is_iso() or not f_b.is_iso():
        raise ShapeMismatch('Σ acts on isomorphisms')
    b_target = _family_target(model, f_a, f_b)
    source = model.sigma(f_a.source, f_b.source)
    target = model.sigma(f_a.target, b_target)
    ext = model.comprehension(f_a.source)
    maps = []
    for i, (g, fiber) in enumerate(zip(source.ctx.elements, source.fibers)):
        maps.append(tuple(
            ((x, y), (f_a.image(i, x), f_b.image(ext.index((g, x)), y)))
            for x, y in fiber
        ))
    return FinTyMorphism(source, target, tuple(maps))


def pi_map(model: FinSetCwf, f_a: FinTyMorphism, f_b: FinTyMorphism) -> FinTyMorphism:
    """Π(f_A, f_B) : Π(A, B) ≅ Π(A', B'), t ↦ λx'. f_B(t(f_A⁻¹ x'))."""
    if not f_a.is_iso() or not f_b.is_iso():
        raise ShapeMismatch('Π acts on isomorphisms')
    b_target = _family_target(model, f_a, f_b)
    back = invert_type_morphism(f_a)
    source = model.pi(f_a.source, f_b.source)
    target = model.pi(f_a.target, b_target)
    ext = model.comprehension(f_a.source)
    maps = []
    for i, (g, fiber) in enumerate(zip(source.ctx.elements, source.fibers)):
        row = []
        for table in fiber:
            t = dict(table)
            image = []
            for x2 in f_a.target.fibers[i]:
                x = back.image(i, x2)
                image.append((x2, f_b.image(ext.index((g, x)), t[x])))
            row.append((table, tuple(image)))
        maps.append(tuple(row))
    return FinTyMorphism(source, target, tuple(maps))


def morphism_from_sub(model: FinSetCwf, sem: FinSub, source: FinTy, target: FinTy) -> FinTyMorphism:
    """The type morphism A → B over Γ given by φ : Γ.A → Γ.B with p ∘ φ = p."""
    maps = []
    src_ext = model.comprehension(source)
    for g, fiber in zip(source.ctx.elements, source.fibers):
        row = []
        for x in fiber:
            g2, y = sem.images[src_ext.index((g, x))]
            if g2 != g:
                raise ShapeMismatch('substitution does not commute with the projections')
            row.append((x, y))
        maps.append(tuple(row))
    return FinTyMorphism(source, target, tuple(maps))


# Printing

def _atom(x) -> str:
    if isinstance(x, tuple):
        return '(' + ' '.join(_atom(e) for e in x) + ')'
    return str(x)


def print_value(value) -> str:
    """Canonical s-expression of a semantic value."""
    match value:
        case FinCtx(elements):
            return '(ctx ' + ' '.join(_atom(e) for e in elements) + ')'
        case FinTy(ctx, fibers):
            return '(ty ' + ' '.join(f"({_atom(g)} {_atom(f)})" for g, f in zip(ctx.elements, fibers)) + ')'
        case FinSub(source, _, images):
            return '(sub ' + ' '.join(f"({_atom(g)} {_atom(i)})" for g, i in zip(source.elements, images)) + ')'
        case FinTm(ty, values):
            return '(tm ' + ' '.join(f"({_atom(g)} {_atom(v)})" for g, v in zip(ty.ctx.elements, values)) + ')'
    return _atom(value)
