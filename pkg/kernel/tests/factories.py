"""
Entity generators shared by the property and exhaustive tests.
"""
import itertools
from functools import cache

from ..cl import App, K, S
from ..syntax import (
    Ap, Base, Comp, Cons, Empty, Ext, Fst, Id, Ident, Lam, Pair, Pi, Proj, Refl, Sigma, Snd, Sort, TmSubst,
    TySubst, Unit, UnitTy, Var, Zero, children, ctxof, dom, lift, o_over, typeof,
)

SHAPES = {
    Sort.CTX: ((Unit, ()), (Cons, (Sort.CTX, Sort.TY))),
    Sort.SUB: (
        (Id, (Sort.CTX,)),
        (Empty, (Sort.CTX,)),
        (Proj, (Sort.TY,)),
        (Comp, (Sort.SUB, Sort.SUB)),
        (Ext, (Sort.SUB, Sort.TM, Sort.TY)),
    ),
    Sort.TY: (
        (Base, ()),
        (UnitTy, ()),
        (TySubst, (Sort.TY, Sort.SUB)),
        (Ident, (Sort.TM, Sort.TM)),
        (Sigma, (Sort.TY, Sort.TY)),
        (Pi, (Sort.TY, Sort.TY)),
    ),
    Sort.TM: (
        (Zero, ()),
        (Var, (Sort.TY,)),
        (TmSubst, (Sort.TM, Sort.SUB)),
        (Refl, (Sort.TM,)),
        (Fst, (Sort.TY, Sort.TM)),
        (Snd, (Sort.TY, Sort.TY, Sort.TM)),
        (Pair, (Sort.TY, Sort.TY, Sort.TM, Sort.TM)),
        (Ap, (Sort.TY, Sort.TY, Sort.TM, Sort.TM)),
        (Lam, (Sort.TY, Sort.TM)),
    ),
}

PURE_SHAPES = {
    Sort.CTX: ((Unit, ()), (Cons, (Sort.CTX, Sort.TY))),
    Sort.SUB: (
        (Id, (Sort.CTX,)),
        (Empty, (Sort.CTX,)),
        (Proj, (Sort.TY,)),
        (Comp, (Sort.SUB, Sort.SUB)),
        (Ext, (Sort.SUB, Sort.TM, Sort.TY)),
    ),
    Sort.TY: ((Base, ()), (TySubst, (Sort.TY, Sort.SUB))),
    Sort.TM: ((Var, (Sort.TY,)), (TmSubst, (Sort.TM, Sort.SUB))),
}


def tree_depth(entity) -> int:
    return 1 + max((tree_depth(child) for child in children(entity)), default=0)


# Sort-correct raw trees, well-formed or not

def random_tree(rng, sort: Sort, depth: int):
    """A raw entity of `sort` no deeper than `depth` (at least 2)."""
    shapes = SHAPES[sort]
    leaves = [cls for cls, args in shapes if not args]
    if depth <= 2 or rng.random() < 0.4:
        if leaves:
            return rng.choice(leaves)()
        return rng.choice((Id, Empty))(Unit())
    cls, args = rng.choice([s for s in shapes if s[1]])
    return cls(*(random_tree(rng, s, depth - 1) for s in args))


# Well-formed pure entities, built so that every boundary matches syntactically

def _types_over(ctx):
    found = [Base()] if isinstance(ctx, Unit) else [o_over(ctx)]
    if isinstance(ctx, Cons):
        found.append(TySubst(ctx.ty, Proj(ctx.ty)))
    return found


def random_ctx(rng, length: int):
    ctx = Unit()
    for _ in range(rng.randint(0, length)):
        ctx = Cons(ctx, rng.choice(_types_over(ctx)))
    return ctx


def random_sub(rng, target, depth: int):
    """A substitution with codomain exactly `target`."""
    options = [lambda: Id(target), lambda: Proj(o_over(target))]
    if isinstance(target, Unit):
        options.append(lambda: Empty(random_ctx(rng, 2)))
    if isinstance(target, Cons):
        options.append(lambda: Proj(TySubst(target.ty, Proj(target.ty))))
    if depth > 0:
        def composite():
            outer = random_sub(rng, target, depth - 1)
            return Comp(outer, random_sub(rng, dom(outer), depth - 1))
        options.append(composite)
        if isinstance(target, Cons):
            options.append(lambda: lift(random_sub(rng, target.parent, depth - 1), target.ty))
            options.append(lambda: Ext(Proj(target.ty), Var(target.ty), target.ty))
    return rng.choice(options)()


def random_ty(rng, depth: int):
    if depth <= 0 or rng.random() < 0.3:
        return rng.choice(_types_over(random_ctx(rng, 2)))
    inner = random_ty(rng, depth - 1)
    return TySubst(inner, random_sub(rng, ctxof(inner), depth - 1))


def random_tm(rng, depth: int):
    if depth <= 0 or rng.random() < 0.3:
        return Var(random_ty(rng, depth - 1))
    inner = random_tm(rng, depth - 1)
    return TmSubst(inner, random_sub(rng, ctxof(typeof(inner)), depth - 1))


def random_pure(rng, depth: int = 3):
    match rng.choice(list(Sort)):
        case Sort.CTX:
            return random_ctx(rng, depth)
        case Sort.SUB:
            return random_sub(rng, random_ctx(rng, 2), depth)
        case Sort.TY:
            return random_ty(rng, depth)
        case Sort.TM:
            return random_tm(rng, depth)


def random_pure_entities(rng, count: int, max_depth: int = 8) -> list:
    found = []
    while len(found) < count:
        entity = random_pure(rng)
        if tree_depth(entity) <= max_depth:
            found.append(entity)
    return found


# Exhaustive enumeration of the pure fragment

def _splits(total: int, parts: int):
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _splits(total - first, parts - 1):
            yield (first,) + rest


@cache
def pure_of_size(sort: Sort, n: int) -> tuple:
    """Every raw pure entity of `sort` with exactly `n` constructors."""
    found = []
    for cls, args in PURE_SHAPES[sort]:
        if not args:
            if n == 1:
                found.append(cls())
            continue
        for sizes in _splits(n - 1, len(args)):
            pools = [pure_of_size(s, k) for s, k in zip(args, sizes)]
            found.extend(cls(*parts) for parts in itertools.product(*pools))
    return tuple(found)


# Combinatory terms

def random_cl(rng, size: int):
    if size <= 1:
        return rng.choice((K, S))
    split = rng.randint(1, size - 1)
    return App(random_cl(rng, split), random_cl(rng, size - split))


@cache
def cl_of_size(n: int) -> tuple:
    if n == 1:
        return (K, S)
    return tuple(
        App(f, a)
        for k in range(1, n)
        for f in cl_of_size(k)
        for a in cl_of_size(n - k)
    )


def is_cl_normal(t) -> bool:
    if not isinstance(t, App):
        return True
    if isinstance(t.fun, App) and t.fun.fun == K:
        return False
    if isinstance(t.fun, App) and isinstance(t.fun.fun, App) and t.fun.fun.fun == S:
        return False
    return is_cl_normal(t.fun) and is_cl_normal(t.arg)
