"""
Raw syntax of the cwf calculus: contexts, substitutions, types and terms,
the structural functions dom/cod/ctxof/typeof, and the s-expression
surface format.

Entities are frozen dataclasses compared structurally. Annotations are
exactly those of the grammar; everything else is recovered by the
structural functions.
"""
from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

from .exceptions import AnnotationMismatch, IndexOutOfRange, ParseError, PathInvalid, Undefined


class Node:
    """Base for raw syntax: immutable, structurally compared, hash cached."""

    def _key(self) -> tuple:
        return tuple(getattr(self, f.name) for f in dataclasses.fields(self))

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or hash(self) != hash(other):
            return False
        return self._key() == other._key()

    def __hash__(self):
        cached = self.__dict__.get('_hash')
        if cached is None:
            cached = hash((type(self).__name__,) + self._key())
            object.__setattr__(self, '_hash', cached)
        return cached

    def __str__(self):
        return print_entity(self)


class RawCtx(Node):
    pass


class RawSub(Node):
    pass


class RawTy(Node):
    pass


class RawTm(Node):
    pass


RawEntity = Union[RawCtx, RawSub, RawTy, RawTm]


# Contexts

@dataclass(frozen=True, eq=False)
class Unit(RawCtx):
    pass


@dataclass(frozen=True, eq=False)
class Cons(RawCtx):
    parent: RawCtx
    ty: RawTy


# Substitutions

@dataclass(frozen=True, eq=False)
class Comp(RawSub):
    outer: RawSub
    inner: RawSub


@dataclass(frozen=True, eq=False)
class Id(RawSub):
    ctx: RawCtx


@dataclass(frozen=True, eq=False)
class Empty(RawSub):
    ctx: RawCtx


@dataclass(frozen=True, eq=False)
class Proj(RawSub):
    ty: RawTy


@dataclass(frozen=True, eq=False)
class Ext(RawSub):
    sub: RawSub
    tm: RawTm
    ty: RawTy


# Types

@dataclass(frozen=True, eq=False)
class Base(RawTy):
    pass


@dataclass(frozen=True, eq=False)
class TySubst(RawTy):
    ty: RawTy
    sub: RawSub


@dataclass(frozen=True, eq=False)
class Ident(RawTy):
    left: RawTm
    right: RawTm


@dataclass(frozen=True, eq=False)
class UnitTy(RawTy):
    pass


@dataclass(frozen=True, eq=False)
class Sigma(RawTy):
    dom: RawTy
    cod: RawTy


@dataclass(frozen=True, eq=False)
class Pi(RawTy):
    dom: RawTy
    cod: RawTy


# Terms

@dataclass(frozen=True, eq=False)
class TmSubst(RawTm):
    tm: RawTm
    sub: RawSub


@dataclass(frozen=True, eq=False)
class Var(RawTm):
    ty: RawTy


@dataclass(frozen=True, eq=False)
class Refl(RawTm):
    tm: RawTm


@dataclass(frozen=True, eq=False)
class Zero(RawTm):
    pass


@dataclass(frozen=True, eq=False)
class Fst(RawTm):
    ty: RawTy
    tm: RawTm


@dataclass(frozen=True, eq=False)
class Snd(RawTm):
    ty_a: RawTy
    ty_b: RawTy
    tm: RawTm


@dataclass(frozen=True, eq=False)
class Pair(RawTm):
    ty_a: RawTy
    ty_b: RawTy
    fst: RawTm
    snd: RawTm


@dataclass(frozen=True, eq=False)
class Ap(RawTm):
    ty_a: RawTy
    ty_b: RawTy
    fun: RawTm
    arg: RawTm


@dataclass(frozen=True, eq=False)
class Lam(RawTm):
    ty: RawTy
    body: RawTm


class Sort(enum.Enum):
    CTX = 'ctx'
    SUB = 'sub'
    TY = 'ty'
    TM = 'tm'


def sort_of(entity: RawEntity) -> Sort:
    if isinstance(entity, RawCtx):
        return Sort.CTX
    if isinstance(entity, RawSub):
        return Sort.SUB
    if isinstance(entity, RawTy):
        return Sort.TY
    if isinstance(entity, RawTm):
        return Sort.TM
    raise Undefined(f"not a raw entity: {entity!r}")


# Structural functions

@lru_cache(maxsize=65536)
def dom(sub: RawSub) -> RawCtx:
    """Domain of a substitution."""
    match sub:
        case Comp(_, inner):
            return dom(inner)
        case Id(ctx) | Empty(ctx):
            return ctx
        case Proj(ty):
            return Cons(ctxof(ty), ty)
        case Ext(inner, _, _):
            return dom(inner)
    raise Undefined(f"dom of non-substitution {sub!r}")


@lru_cache(maxsize=65536)
def cod(sub: RawSub) -> RawCtx:
    """Codomain of a substitution."""
    match sub:
        case Comp(outer, _):
            return cod(outer)
        case Id(ctx):
            return ctx
        case Empty(_):
            return Unit()
        case Proj(ty):
            return ctxof(ty)
        case Ext(inner, _, ty):
            return Cons(cod(inner), ty)
    raise Undefined(f"cod of non-substitution {sub!r}")


@lru_cache(maxsize=65536)
def ctxof(ty: RawTy) -> RawCtx:
    """
    Context a type lives in. A[γ] lives in the domain of γ; N₁ is closed
    like o.
    """
    match ty:
        case Base() | UnitTy():
            return Unit()
        case TySubst(_, sub):
            return dom(sub)
        case Ident(left, _):
            return ctxof(typeof(left))
        case Sigma(a, _) | Pi(a, _):
            return ctxof(a)
    raise Undefined(f"ctxof of non-type {ty!r}")


@lru_cache(maxsize=65536)
def typeof(tm: RawTm) -> RawTy:
    """Type of a term, recovered from its annotations."""
    match tm:
        case TmSubst(inner, sub):
            return TySubst(typeof(inner), sub)
        case Var(ty):
            return TySubst(ty, Proj(ty))
        case Refl(inner):
            return Ident(inner, inner)
        case Zero():
            return UnitTy()
        case Fst(a, _):
            return a
        case Snd(a, b, c):
            return TySubst(b, Ext(Id(ctxof(a)), Fst(a, c), a))
        case Pair(a, b, _, _):
            return Sigma(a, b)
        case Ap(a, b, _, arg):
            return TySubst(b, Ext(Id(ctxof(a)), arg, a))
        case Lam(a, body):
            return Pi(a, typeof(body))
    raise Undefined(f"typeof of non-term {tm!r}")


def ctx_length(ctx: RawCtx) -> int:
    n = 0
    while isinstance(ctx, Cons):
        n += 1
        ctx = ctx.parent
    return n


def ctx_entries(ctx: RawCtx) -> list[RawTy]:
    """Entry types, outermost first."""
    entries = []
    while isinstance(ctx, Cons):
        entries.append(ctx.ty)
        ctx = ctx.parent
    return entries[::-1]


def lift(sub: RawSub, ty: RawTy, checked: bool = True) -> RawSub:
    """
    γ↑A = ⟨γ ∘ p_{A[γ]}, q_{A[γ]}⟩_A : dom(γ).A[γ] → cod(γ).A
    """
    if checked and cod(sub) != ctxof(ty):
        raise AnnotationMismatch(f"cannot lift {sub} over {ty}: codomain {cod(sub)} is not {ctxof(ty)}")
    moved = TySubst(ty, sub)
    return Ext(Comp(sub, Proj(moved)), Var(moved), ty)


def var(ctx: RawCtx, index: int) -> RawTm:
    """de Bruijn projection q[pⁱ], counting from the innermost entry."""
    if index < 0 or not isinstance(ctx, Cons):
        raise IndexOutOfRange(f"variable {index} out of range in context of length {ctx_length(ctx)}")
    if index == 0:
        return Var(ctx.ty)
    return TmSubst(var(ctx.parent, index - 1), Proj(ctx.ty))


def apply_type_morphism(morph: RawSub, tm: RawTm) -> RawTm:
    """
    {φ}(a) = q_B[φ ∘ ⟨id_Γ, a⟩_A] for φ : Γ.A → Γ.B
    """
    source, target = dom(morph), cod(morph)
    if not isinstance(source, Cons) or not isinstance(target, Cons):
        raise Undefined(f"{morph} is not a morphism between context extensions")
    if source.parent != target.parent:
        raise AnnotationMismatch(f"{morph} does not fix the context: {source.parent} against {target.parent}")
    if typeof(tm) != source.ty:
        raise AnnotationMismatch(f"{tm} has type {typeof(tm)}, not {source.ty}")
    return TmSubst(Var(target.ty), Comp(morph, Ext(Id(source.parent), tm, source.ty)))


def transport_type_morphism(sub: RawSub, morph: RawSub) -> RawSub:
    """
    Action of γ : Γ → Δ on a type morphism φ : Δ.A → Δ.B, giving
    ⟨p, q[φ ∘ γ↑A]⟩ : Γ.A[γ] → Γ.B[γ].
    """
    source, target = dom(morph), cod(morph)
    if not isinstance(source, Cons) or not isinstance(target, Cons):
        raise Undefined(f"{morph} is not a morphism between context extensions")
    moved_a = TySubst(source.ty, sub)
    body = TmSubst(Var(target.ty), Comp(morph, lift(sub, source.ty, checked=False)))
    return Ext(Proj(moved_a), body, TySubst(target.ty, sub))


# Paths and measures

def children(entity: RawEntity) -> tuple:
    return entity._key()


def subterm_at(entity: RawEntity, path: tuple) -> RawEntity:
    for step in path:
        kids = children(entity)
        if not 0 <= step < len(kids):
            raise PathInvalid(f"no child {step} in {entity}")
        entity = kids[step]
    return entity


def replace_at(entity: RawEntity, path: tuple, new: RawEntity) -> RawEntity:
    if not path:
        if sort_of(new) != sort_of(entity):
            raise PathInvalid(f"cannot put a {sort_of(new).value} where a {sort_of(entity).value} stands")
        return new
    kids = list(children(entity))
    step = path[0]
    if not 0 <= step < len(kids):
        raise PathInvalid(f"no child {step} in {entity}")
    kids[step] = replace_at(kids[step], path[1:], new)
    return type(entity)(*kids)


def size(entity: RawEntity) -> int:
    return 1 + sum(size(child) for child in children(entity))


_IMPURE = (Ident, UnitTy, Sigma, Pi, Refl, Zero, Fst, Snd, Pair, Ap, Lam)


def is_pure(entity: RawEntity) -> bool:
    """True when no I/N₁/Σ/Π constructor occurs anywhere."""
    if isinstance(entity, _IMPURE):
        return False
    return all(is_pure(child) for child in children(entity))


def o_over(ctx: RawCtx) -> RawTy:
    """The base type moved to `ctx`: o[⟨⟩_Γ]."""
    return TySubst(Base(), Empty(ctx))


# Surface format

_ATOMS = {
    Unit: ('unit', Sort.CTX),
    Base: ('o', Sort.TY),
    UnitTy: ('n1', Sort.TY),
    Zero: ('zero', Sort.TM),
}

_FORMS = {
    Cons: ('cons', Sort.CTX, (Sort.CTX, Sort.TY)),
    Comp: ('comp', Sort.SUB, (Sort.SUB, Sort.SUB)),
    Id: ('id', Sort.SUB, (Sort.CTX,)),
    Empty: ('empty', Sort.SUB, (Sort.CTX,)),
    Proj: ('p', Sort.SUB, (Sort.TY,)),
    Ext: ('ext', Sort.SUB, (Sort.SUB, Sort.TM, Sort.TY)),
    TySubst: ('tysub', Sort.TY, (Sort.TY, Sort.SUB)),
    Ident: ('I', Sort.TY, (Sort.TM, Sort.TM)),
    Sigma: ('sigma', Sort.TY, (Sort.TY, Sort.TY)),
    Pi: ('pi', Sort.TY, (Sort.TY, Sort.TY)),
    TmSubst: ('tmsub', Sort.TM, (Sort.TM, Sort.SUB)),
    Var: ('q', Sort.TM, (Sort.TY,)),
    Refl: ('refl', Sort.TM, (Sort.TM,)),
    Fst: ('fst', Sort.TM, (Sort.TY, Sort.TM)),
    Snd: ('snd', Sort.TM, (Sort.TY, Sort.TY, Sort.TM)),
    Pair: ('pair', Sort.TM, (Sort.TY, Sort.TY, Sort.TM, Sort.TM)),
    Ap: ('ap', Sort.TM, (Sort.TY, Sort.TY, Sort.TM, Sort.TM)),
    Lam: ('lam', Sort.TM, (Sort.TY, Sort.TM)),
}

_ATOM_BY_NAME = {name: (cls, sort) for cls, (name, sort) in _ATOMS.items()}
_FORM_BY_HEAD = {head: (cls, sort, args) for cls, (head, sort, args) in _FORMS.items()}


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    column: int


@dataclass(frozen=True)
class SList:
    items: tuple
    line: int
    column: int


def _tokenize(text: str) -> list[Token]:
    tokens = []
    line, column, i = 1, 1, 0
    while i < len(text):
        ch = text[i]
        if ch == '\n':
            line, column, i = line + 1, 1, i + 1
            continue
        if ch.isspace():
            column, i = column + 1, i + 1
            continue
        if ch == ';':
            while i < len(text) and text[i] != '\n':
                i += 1
            continue
        if ch in '()':
            tokens.append(Token(ch, line, column))
            column, i = column + 1, i + 1
            continue
        start, start_column = i, column
        while i < len(text) and not text[i].isspace() and text[i] not in '();':
            i += 1
            column += 1
        tokens.append(Token(text[start:i], line, start_column))
    return tokens


MAX_NESTING = 4000


def _read(tokens: list[Token], i: int) -> tuple:
    if i >= len(tokens):
        last = tokens[-1] if tokens else Token('', 1, 1)
        raise ParseError('unexpected end of input', last.line, last.column + len(last.text), frozenset({'(', 'atom'}))
    tok = tokens[i]
    if tok.text == ')':
        raise ParseError('unbalanced parenthesis', tok.line, tok.column, frozenset({'(', 'atom'}))
    if tok.text != '(':
        return tok, i + 1
    open_lists = [(tok, [])]
    i += 1
    while True:
        if i >= len(tokens):
            opener = open_lists[-1][0]
            raise ParseError('list not closed', opener.line, opener.column, frozenset({')'}))
        tok = tokens[i]
        i += 1
        if tok.text == '(':
            if len(open_lists) >= MAX_NESTING:
                raise ParseError(f'nested deeper than {MAX_NESTING} lists', tok.line, tok.column, frozenset({')'}))
            open_lists.append((tok, []))
        elif tok.text == ')':
            opener, items = open_lists.pop()
            form = SList(tuple(items), opener.line, opener.column)
            if not open_lists:
                return form, i
            open_lists[-1][1].append(form)
        else:
            open_lists[-1][1].append(tok)


def read_sexpr(text: str):
    """Read exactly one s-expression (Token or SList) from `text`."""
    tokens = _tokenize(text)
    form, i = _read(tokens, 0)
    if i != len(tokens):
        extra = tokens[i]
        raise ParseError('trailing input', extra.line, extra.column, frozenset({'end of input'}))
    return form


def _expected(sort: Sort | None) -> frozenset:
    atoms = {name for name, (_, s) in _ATOM_BY_NAME.items() if sort in (None, s)}
    heads = {f'({head}' for head, (_, s, _) in _FORM_BY_HEAD.items() if sort in (None, s)}
    return frozenset(atoms | heads)


def position(form) -> tuple[int, int]:
    return form.line, form.column


def entity_from_sexpr(form, sort: Sort | None = None) -> RawEntity:
    """Build a raw entity from a read s-expression, checking sorts."""
    if isinstance(form, Token):
        entry = _ATOM_BY_NAME.get(form.text)
        if entry is None or sort not in (None, entry[1]):
            raise ParseError(f"unexpected atom {form.text!r}", form.line, form.column, _expected(sort))
        return entry[0]()
    if not form.items or not isinstance(form.items[0], Token):
        raise ParseError('expected a constructor name', form.line, form.column, _expected(sort))
    head = form.items[0]
    entry = _FORM_BY_HEAD.get(head.text)
    if entry is None or sort not in (None, entry[1]):
        raise ParseError(f"unexpected constructor {head.text!r}", head.line, head.column, _expected(sort))
    cls, _, arg_sorts = entry
    args = form.items[1:]
    if len(args) != len(arg_sorts):
        raise ParseError(
            f"{head.text} takes {len(arg_sorts)} arguments, got {len(args)}",
            head.line, head.column, frozenset({')'} if len(args) > len(arg_sorts) else _expected(arg_sorts[len(args)])),
        )
    return cls(*(entity_from_sexpr(arg, s) for arg, s in zip(args, arg_sorts)))


def parse(text: str, sort: Sort | None = None) -> RawEntity:
    """Parse surface text into a raw entity; the sort is inferred when not given."""
    return entity_from_sexpr(read_sexpr(text), sort)


def print_entity(entity: RawEntity) -> str:
    cls = type(entity)
    if cls in _ATOMS:
        return _ATOMS[cls][0]
    head = _FORMS[cls][0]
    return '(' + ' '.join([head] + [print_entity(child) for child in children(entity)]) + ')'
