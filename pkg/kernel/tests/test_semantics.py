"""
Tests for the finite-set model, soundness checking and type morphisms.
"""
import dataclasses
import itertools

from django.test import SimpleTestCase

from ..corpus import G1, G2, IDENTITY, O1, O2, PAIR, X, corpus
from ..exceptions import ShapeMismatch, Undefined
from ..rules import Derivation, RuleId, SubEq, TyEq
from ..semantics import (
    CounterModel,
    FinCtx,
    FinSetCwf,
    FinSub,
    FinTm,
    FinTy,
    FinTyMorphism,
    Interpreter,
    PointwiseEvaluator,
    Sound,
    compose_over,
    compose_type_morphisms,
    identity_type_morphism,
    interp,
    interp_ctx,
    interp_ty,
    invert_type_morphism,
    morphism_from_sub,
    pi_map,
    print_value,
    sigma_map,
    soundness_check,
)
from ..syntax import (
    Ap, Base, Comp, Cons, Empty, Ext, Fst, Id, Ident, Pi, Proj, RawSub, RawTy, Refl, Sigma, Snd, TmSubst, TySubst,
    Unit, UnitTy, Var, Zero, children, cod, ctxof, dom, is_pure, typeof,
)

SAMPLES = [
    G1,
    G2,
    O1,
    O2,
    X,
    Proj(O1),
    Id(G2),
    IDENTITY,
    PAIR,
    Fst(O1, PAIR),
    Snd(O1, O2, PAIR),
    Ap(O1, typeof(IDENTITY).cod, IDENTITY, X),
    Sigma(O1, O2),
    Pi(O1, O2),
    Refl(X),
    Ident(X, X),
    TmSubst(Zero(), Proj(Base())),
]


class TestFinSetModel(SimpleTestCase):
    def test_one_variable_context(self):
        ctx = interp_ctx(G1, FinSetCwf(2))
        self.assertEqual(ctx.elements, (((), 0), ((), 1)))
        self.assertEqual(len(ctx), 2)

    def test_base_type_size(self):
        self.assertEqual(interp_ty(Base(), FinSetCwf(3)).fibers, ((0, 1, 2),))

    def test_sigma_and_pi_fibers(self):
        model = FinSetCwf(2)
        sigma = interp(Sigma(O1, O2), model)
        self.assertEqual(sigma.fibers[0], ((0, 0), (0, 1), (1, 0), (1, 1)))
        pi = interp(Pi(O1, O2), model)
        self.assertEqual(len(pi.fibers[0]), 4)

    def test_identity_function(self):
        value = interp(IDENTITY, FinSetCwf(2))
        self.assertEqual(value.values[0], ((0, 0), (1, 1)))

    def test_mismatched_context(self):
        with self.assertRaises(Undefined):
            interp(Cons(Unit(), TySubst(Base(), Proj(Base()))), FinSetCwf(2))

    def test_non_composable(self):
        with self.assertRaises(Undefined):
            interp(Comp(Proj(Base()), Proj(Base())), FinSetCwf(2))

    def test_composite_compares_interpreted_boundaries(self):
        # 1.o[id] is not 1.o as syntax but is in the model
        model = FinSetCwf(2)
        other = Cons(Unit(), TySubst(Base(), Id(Unit())))
        self.assertEqual(interp(Comp(Id(G1), Id(other)), model), interp(Id(G1), model))
        with self.assertRaises(Undefined):
            interp(Comp(Id(G1), Id(Unit())), model)

    def test_interpreter_caches(self):
        sem = Interpreter(FinSetCwf(2))
        self.assertIs(sem(G2), sem(G2))

    def test_negative_size(self):
        with self.assertRaises(ValueError):
            FinSetCwf(-1)

    def test_print_value(self):
        model = FinSetCwf(2)
        self.assertEqual(print_value(interp(G1, model)), '(ctx (() 0) (() 1))')
        self.assertEqual(print_value(interp(Base(), model)), '(ty (() (0 1)))')
        self.assertEqual(print_value(interp(Zero(), model)), '(tm (() tt))')


class TestPointwiseAgreement(SimpleTestCase):
    def test_both_evaluations_agree(self):
        for size in (1, 2, 3):
            model = FinSetCwf(size)
            evaluator = PointwiseEvaluator(size)
            for entity in SAMPLES:
                with self.subTest(size=size, entity=str(entity)):
                    self.assertEqual(interp(entity, model), evaluator.evaluate(entity))


class TestSoundness(SimpleTestCase):
    def test_corpus_is_sound(self):
        for size in (1, 2, 3):
            model = FinSetCwf(size)
            for rule, d in corpus().items():
                with self.subTest(size=size, rule=rule.value):
                    result = soundness_check(d, model)
                    self.assertIsInstance(result, Sound)
                    self.assertGreaterEqual(result.judgments, 1)

    def test_false_judgment_is_refuted(self):
        bad = Derivation(RuleId.BASE_TYPE, TyEq(Unit(), Base(), UnitTy()))
        with self.assertLogs('kernel.semantics', level='ERROR'):
            result = soundness_check(bad, FinSetCwf(2))
        self.assertIsInstance(result, CounterModel)
        self.assertFalse(result)
        self.assertEqual(result.path, ())

    def test_refutation_names_the_premise(self):
        bad = Derivation(RuleId.BASE_TYPE, TyEq(Unit(), Base(), UnitTy()))
        root = Derivation(RuleId.N1_FORM, TyEq(Unit(), UnitTy(), UnitTy()), (bad,))
        with self.assertLogs('kernel.semantics', level='ERROR'):
            result = soundness_check(root, FinSetCwf(2))
        self.assertEqual(result.path, (0,))
        self.assertEqual(result.judgment, bad.conclusion)

    def test_undefined_side(self):
        bad = Derivation(RuleId.BASE_TYPE, TyEq(Unit(), Base(), TySubst(Base(), Comp(Proj(Base()), Proj(Base())))))
        with self.assertLogs('kernel.semantics', level='ERROR'):
            result = soundness_check(bad, FinSetCwf(2))
        self.assertFalse(result)
        self.assertTrue(result.reason)


class TestTypeMorphisms(SimpleTestCase):
    def setUp(self):
        self.model = FinSetCwf(2)
        self.a = interp(Base(), self.model)
        self.b = interp(O1, self.model)
        self.swap = FinTyMorphism(self.a, self.a, (((0, 1), (1, 0)),))
        self.const = FinTyMorphism(self.a, self.a, (((0, 0), (1, 0)),))

    def test_swap_is_its_own_inverse(self):
        self.assertTrue(self.swap.is_iso())
        self.assertEqual(invert_type_morphism(self.swap), self.swap)
        self.assertEqual(compose_type_morphisms(self.swap, self.swap), identity_type_morphism(self.a))

    def test_constant_map_is_not_invertible(self):
        self.assertFalse(self.const.is_iso())
        with self.assertRaises(ShapeMismatch):
            invert_type_morphism(self.const)

    def test_composition_needs_matching_types(self):
        unit = identity_type_morphism(interp(UnitTy(), self.model))
        with self.assertRaises(ShapeMismatch):
            compose_type_morphisms(self.swap, unit)

    def test_sigma_map(self):
        f = sigma_map(self.model, self.swap, identity_type_morphism(self.b))
        self.assertTrue(f.is_iso())
        self.assertEqual(f.image(0, (0, 1)), (1, 1))
        self.assertEqual(f.target, self.model.sigma(self.a, self.b))

    def test_pi_map(self):
        f = pi_map(self.model, self.swap, identity_type_morphism(self.b))
        self.assertTrue(f.is_iso())
        self.assertEqual(f.image(0, ((0, 0), (1, 1))), ((0, 1), (1, 0)))

    def test_maps_need_isomorphisms(self):
        with self.assertRaises(ShapeMismatch):
            sigma_map(self.model, self.const, identity_type_morphism(self.b))
        with self.assertRaises(ShapeMismatch):
            pi_map(self.model, self.const, identity_type_morphism(self.b))

    def test_identity_substitution_gives_identity_morphism(self):
        sem = interp(Id(G1), self.model)
        self.assertEqual(morphism_from_sub(self.model, sem, self.a, self.a), identity_type_morphism(self.a))

    def test_compose_over_identities(self):
        ident_b = identity_type_morphism(self.b)
        result = compose_over(self.model, identity_type_morphism(self.a), ident_b, ident_b)
        self.assertEqual(result, ident_b)


def maps_between(source, target):
    for images in itertools.product(target.elements, repeat=len(source)):
        yield FinSub(source, target, images)


def types_over(ctx, size):
    options = [tuple(range(k)) for k in range(size + 1)]
    for fibers in itertools.product(options, repeat=len(ctx)):
        yield FinTy(ctx, fibers)


def terms_of(ty):
    for values in itertools.product(*ty.fibers):
        yield FinTm(ty, values)


class TestModelLaws(SimpleTestCase):
    """The cwf equations hold on the nose over every small instance."""

    def setUp(self):
        self.model = m = FinSetCwf(2)
        terminal = m.terminal()
        one = m.comprehension(FinTy(terminal, ((0, 1),)))
        self.small = [FinCtx(()), terminal, one]
        self.contexts = self.small + [m.comprehension(FinTy(one, ((0,), (0, 1, 2))))]

    def test_identity_laws(self):
        m = self.model
        for source, target in itertools.product(self.contexts, repeat=2):
            for f in maps_between(source, target):
                with self.subTest(f=f):
                    self.assertEqual(m.compose(m.identity(target), f), f)
                    self.assertEqual(m.compose(f, m.identity(source)), f)

    def test_associativity(self):
        m = self.model
        for a, b, c, d in itertools.product(self.small, repeat=4):
            for f, g, h in itertools.product(maps_between(a, b), maps_between(b, c), maps_between(c, d)):
                self.assertEqual(m.compose(h, m.compose(g, f)), m.compose(m.compose(h, g), f))

    def test_terminal_object(self):
        m = self.model
        for ctx in self.contexts:
            self.assertEqual(list(maps_between(ctx, m.terminal())), [m.bang(ctx)])

    def test_substitution_is_functorial(self):
        m = self.model
        for b in self.small:
            for ty in types_over(b, 2):
                self.assertEqual(m.ty_action(ty, m.identity(b)), ty)
                for tm in terms_of(ty):
                    self.assertEqual(m.tm_action(tm, m.identity(b)), tm)
                for c, d in itertools.product(self.small, repeat=2):
                    for f, g in itertools.product(maps_between(c, b), maps_between(d, c)):
                        fg = m.compose(f, g)
                        self.assertEqual(m.ty_action(m.ty_action(ty, f), g), m.ty_action(ty, fg))
                        for tm in terms_of(ty):
                            self.assertEqual(m.tm_action(m.tm_action(tm, f), g), m.tm_action(tm, fg))

    def test_comprehension(self):
        m = self.model
        for ctx in self.small:
            for ty in types_over(ctx, 2):
                ext = m.comprehension(ty)
                p, q = m.proj(ty), m.var(ty)
                self.assertEqual(m.extend(p, q, ty), m.identity(ext))
                for d in self.small:
                    for f in maps_between(d, ctx):
                        for tm in terms_of(m.ty_action(ty, f)):
                            pair = m.extend(f, tm, ty)
                            self.assertEqual(m.compose(p, pair), f)
                            self.assertEqual(m.tm_action(q, pair), tm)
                    for h in maps_between(d, ext):
                        self.assertEqual(m.extend(m.compose(p, h), m.tm_action(q, h), ty), h)


class TestIsomorphismFunctoriality(SimpleTestCase):
    """Σ and Π act functorially on isomorphisms with fibers of up to three elements."""

    def setUp(self):
        self.model = FinSetCwf(2)
        self.terminal = self.model.terminal()

    def automorphisms(self, ty):
        for perms in itertools.product(*(itertools.permutations(fiber) for fiber in ty.fibers)):
            yield FinTyMorphism(ty, ty, tuple(tuple(zip(fiber, perm)) for fiber, perm in zip(ty.fibers, perms)))

    def test_composition_of_isomorphisms(self):
        for k in range(4):
            ty = FinTy(self.terminal, (tuple(range(k)),))
            ident = identity_type_morphism(ty)
            autos = list(self.automorphisms(ty))
            for f in autos:
                self.assertTrue(f.is_iso())
                self.assertEqual(compose_type_morphisms(ident, f), f)
                self.assertEqual(compose_type_morphisms(f, ident), f)
                self.assertEqual(compose_type_morphisms(f, invert_type_morphism(f)), ident)
                for g, h in itertools.product(autos, repeat=2):
                    self.assertEqual(
                        compose_type_morphisms(compose_type_morphisms(f, g), h),
                        compose_type_morphisms(f, compose_type_morphisms(g, h)),
                    )

    def test_sigma_and_pi_preserve_identities_and_composites(self):
        m = self.model
        for k, n in itertools.product(range(1, 4), range(1, 3)):
            a = FinTy(self.terminal, (tuple(range(k)),))
            b = FinTy(m.comprehension(a), (tuple(range(n)),) * k)
            ident_a, ident_b = identity_type_morphism(a), identity_type_morphism(b)
            for action in (sigma_map, pi_map):
                with self.subTest(k=k, n=n, action=action.__name__):
                    whole = action(m, ident_a, ident_b)
                    self.assertEqual(whole, identity_type_morphism(whole.source))
                    for f_a, f_b, g_a, g_b in itertools.product(
                        self.automorphisms(a), self.automorphisms(b), self.automorphisms(a), self.automorphisms(b),
                    ):
                        both = action(m, compose_type_morphisms(f_a, g_a), compose_over(m, f_a, f_b, g_b))
                        self.assertEqual(both, compose_type_morphisms(action(m, f_a, f_b), action(m, g_a, g_b)))


class TestStrictMorphism(SimpleTestCase):
    """Interpretation preserves every operation on the nose over the corpus."""

    def entities(self):
        seen, stack, visited = set(), [], set()
        for d in corpus().values():
            nodes = [d]
            while nodes:
                node = nodes.pop()
                if id(node) in visited:
                    continue
                visited.add(id(node))
                nodes.extend(node.premises)
                stack.extend(getattr(node.conclusion, f.name) for f in dataclasses.fields(node.conclusion))
        while stack:
            entity = stack.pop()
            if entity in seen:
                continue
            seen.add(entity)
            stack.extend(children(entity))
        return seen

    def test_operations_are_preserved(self):
        m = FinSetCwf(2)
        sem = Interpreter(m)
        checked = 0
        for entity in self.entities():
            try:
                value = sem(entity)
            except Undefined:
                continue
            with self.subTest(entity=str(entity)):
                match entity:
                    case Comp(outer, inner):
                        self.assertEqual(value, m.compose(sem(outer), sem(inner)))
                    case Id(ctx):
                        self.assertEqual(value, m.identity(sem(ctx)))
                    case Empty(ctx):
                        self.assertEqual(value, m.bang(sem(ctx)))
                    case Proj(ty):
                        self.assertEqual(value, m.proj(sem(ty)))
                    case Ext(sub, tm, ty):
                        self.assertEqual(value, m.extend(sem(sub), sem(tm), sem(ty)))
                    case TySubst(ty, sub):
                        self.assertEqual(value, m.ty_action(sem(ty), sem(sub)))
                    case TmSubst(tm, sub):
                        self.assertEqual(value, m.tm_action(sem(tm), sem(sub)))
                    case Var(ty):
                        self.assertEqual(value, m.var(sem(ty)))
                    case Cons(_, ty):
                        self.assertEqual(value, m.comprehension(sem(ty)))
                pure = is_pure(entity)
                if pure and isinstance(entity, RawSub):
                    self.assertEqual(sem(Comp(entity, Id(dom(entity)))), value)
                    self.assertEqual(sem(Comp(Id(cod(entity)), entity)), value)
                elif pure and isinstance(entity, RawTy):
                    self.assertEqual(sem(TySubst(entity, Id(ctxof(entity)))), value)
            checked += 1
        self.assertGreater(checked, 20)

    def test_checked_substitution_judgments(self):
        m = FinSetCwf(2)
        sem = Interpreter(m)
        for rule, d in corpus().items():
            j = d.conclusion
            if not isinstance(j, SubEq):
                continue
            with self.subTest(rule=rule.value):
                for side in (j.left, j.right):
                    self.assertEqual(sem(side).source, sem(j.source))
                    self.assertEqual(sem(side).target, sem(j.target))
                self.assertEqual(sem(j.left), sem(j.right))
