"""
Tests for certified normalization of the pure fragment, the equality
combinators, hypothesis search and the democracy construction.
"""
import logging
import random

from django.test import SimpleTestCase

from .. import engine
from ..corpus import G1, G2, O1, O2
from ..exceptions import ChainMismatch, IllFormed, KernelError, NotPure, PathInvalid
from ..rewrite import (
    Certificate,
    Inequal,
    NotFound,
    compose_eq,
    congruence_lift,
    decide_pure_eq,
    democratize,
    harvest,
    home,
    judgment,
    normalize_pure,
    resolve_position,
    rewrite_normal_form,
    search_eq,
)
from ..rules import SubEq, TmEq, TyEq, check
from ..semantics import FinSetCwf, Sound, soundness_check
from ..syntax import (
    Base, Comp, Cons, Empty, Id, Ident, Proj, Sigma, Sort, TySubst, Unit, UnitTy, Var, typeof, var,
)
from .factories import pure_of_size, random_pure_entities

P = Proj(Base())
P_ID = Comp(P, Id(G1))


class TestPositions(SimpleTestCase):
    def test_home(self):
        self.assertEqual(home(G1), ())
        self.assertEqual(home(P), (G1, Unit()))
        self.assertEqual(home(O1), (G1,))
        self.assertEqual(home(Var(Base())), (G1, TySubst(Base(), P)))

    def test_judgment_at_a_position(self):
        self.assertEqual(judgment(P, Empty(G1), (G1, Unit())), SubEq(G1, P, Empty(G1), Unit()))

    def test_resolve_bare_context(self):
        self.assertEqual(resolve_position(O1, G1), (G1,))
        self.assertEqual(resolve_position(P, G1), (G1, Unit()))
        self.assertIsNone(resolve_position(P, None))

    def test_resolve_rejects_non_positions(self):
        with self.assertRaises(IllFormed):
            resolve_position(P, Base())


class TestNormalizePure(SimpleTestCase):
    def test_composite_with_identity(self):
        result = normalize_pure(P_ID)
        self.assertEqual(result.entity, Empty(G1))
        self.assertEqual(result.cert.target, SubEq(G1, P_ID, Empty(G1), Unit()))
        check(result.cert.derivation)

    def test_randomized_pass_reaches_the_same_form(self):
        for seed in range(5):
            with self.subTest(seed=seed):
                result = normalize_pure(P_ID, rng=random.Random(seed))
                self.assertEqual(result.entity, Empty(G1))
                self.assertEqual(result.cert.target.left, P_ID)

    def test_rewriting_removes_the_identity(self):
        self.assertEqual(rewrite_normal_form(P_ID), P)

    def test_impure_input(self):
        with self.assertRaises(NotPure):
            normalize_pure(Cons(Unit(), UnitTy()))

    def test_ill_formed_input(self):
        with self.assertRaises(IllFormed):
            normalize_pure(Comp(Id(G1), P))


class TestDecidePureEq(SimpleTestCase):
    def test_projection_is_the_empty_tuple(self):
        cert = decide_pure_eq(P, Empty(G1))
        self.assertIsInstance(cert, Certificate)
        self.assertEqual(cert.target, SubEq(G1, P, Empty(G1), Unit()))

    def test_closed_type_moved_twice(self):
        ty = TySubst(Base(), Comp(Empty(G1), Proj(O1)))
        cert = decide_pure_eq(ty, O2)
        self.assertEqual(cert.target, TyEq(G2, ty, O2))

    def test_distinct_variables(self):
        result = decide_pure_eq(var(G2, 0), var(G2, 1))
        self.assertIsInstance(result, Inequal)
        self.assertFalse(result)
        self.assertEqual(result.left, Var(O1))

    def test_sorts_must_agree(self):
        with self.assertRaises(IllFormed):
            decide_pure_eq(G1, O1)


class TestCombinators(SimpleTestCase):
    def setUp(self):
        self.to_empty = decide_pure_eq(P, Empty(G1))
        self.drop_id = decide_pure_eq(P_ID, P)

    def test_compose(self):
        cert = compose_eq([self.drop_id, self.to_empty])
        self.assertEqual(cert.target, SubEq(G1, P_ID, Empty(G1), Unit()))

    def test_compose_with_flips(self):
        cert = compose_eq([self.to_empty, self.drop_id], [True, True])
        self.assertEqual(cert.target, SubEq(G1, Empty(G1), P_ID, Unit()))

    def test_compose_mismatch(self):
        with self.assertRaises(ChainMismatch):
            compose_eq([self.to_empty, self.to_empty])

    def test_compose_nothing(self):
        with self.assertRaises(ChainMismatch):
            compose_eq([])

    def test_compose_flag_count(self):
        with self.assertRaises(ChainMismatch):
            compose_eq([self.to_empty], [True, False])

    def test_congruence_lift(self):
        entity = TySubst(Base(), P_ID)
        cert = congruence_lift(entity, (1,), self.drop_id)
        self.assertEqual(cert.target, TyEq(G1, entity, TySubst(Base(), P)))

    def test_congruence_lift_wrong_path(self):
        with self.assertRaises(PathInvalid):
            congruence_lift(TySubst(Base(), P_ID), (0,), self.drop_id)


class TestSearch(SimpleTestCase):
    def setUp(self):
        # 1.o.o[⟨⟩].I(x, y)
        self.hyp_ty = Ident(var(G2, 1), var(G2, 0))
        self.ctx = Cons(G2, self.hyp_ty)

    def test_harvest_reads_both_directions(self):
        hypotheses = harvest(self.ctx)
        self.assertEqual(len(hypotheses), 2)
        self.assertEqual({h.forward for h in hypotheses}, {True, False})

    def test_hypothesis_closes_the_goal(self):
        left = var(self.ctx, 2)
        goal = judgment(left, var(self.ctx, 1), home(left))
        cert = search_eq(goal, 2)
        self.assertIsInstance(cert, Certificate)
        self.assertEqual(cert.target, goal)

    def test_no_hypotheses(self):
        left = var(G2, 0)
        goal = TmEq(G2, left, var(G2, 1), typeof(left))
        result = search_eq(goal, 3)
        self.assertIsInstance(result, NotFound)
        self.assertFalse(result)
        self.assertGreaterEqual(result.explored, 1)

    def test_zero_depth(self):
        goal = TyEq(G1, O1, O1)
        result = search_eq(goal, 0)
        self.assertFalse(result)
        self.assertEqual(result.reason, 'depth exhausted')

    def test_convertible_goal_at_depth_one(self):
        goal = TyEq(G1, TySubst(Base(), P), O1)
        cert = search_eq(goal, 1)
        self.assertEqual(cert.target, goal)


class TestDemocracy(SimpleTestCase):
    def test_empty_context(self):
        result = democratize(Unit())
        self.assertEqual(result.closed_ty, UnitTy())
        self.assertEqual(len(result.certs), 4)

    def test_one_variable(self):
        result = democratize(G1)
        self.assertEqual(result.closed_ty, Sigma(UnitTy(), TySubst(Base(), Empty(Cons(Unit(), UnitTy())))))
        extended = Cons(Unit(), result.closed_ty)
        to_typing, from_typing, section, retraction = (c.target for c in result.certs)
        self.assertEqual(to_typing, SubEq(G1, result.to, result.to, extended))
        self.assertEqual(from_typing, SubEq(extended, result.from_, result.from_, G1))
        self.assertEqual(section, SubEq(G1, Comp(result.from_, result.to), Id(G1), G1))
        self.assertEqual(retraction, SubEq(extended, Comp(result.to, result.from_), Id(extended), extended))

    def test_two_variables(self):
        result = democratize(G2)
        for cert in result.certs:
            check(cert.derivation)

    def test_three_variables(self):
        ctx = Cons(G2, O2)
        result = democratize(ctx)
        closed = result.closed_ty
        for _ in range(3):
            self.assertIsInstance(closed, Sigma)
            closed = closed.dom
        self.assertEqual(closed, UnitTy())
        extended = Cons(Unit(), result.closed_ty)
        section, retraction = (c.target for c in result.certs[2:])
        self.assertEqual(section, SubEq(ctx, Comp(result.from_, result.to), Id(ctx), ctx))
        self.assertEqual(retraction, SubEq(extended, Comp(result.to, result.from_), Id(extended), extended))
        for cert in result.certs:
            check(cert.derivation)


class TestConfluence(SimpleTestCase):
    def test_rule_order_does_not_matter(self):
        rng = random.Random(0)
        for i, entity in enumerate(random_pure_entities(rng, 500)):
            with self.subTest(i=i, entity=str(entity)):
                engine.wf(entity)
                expected = rewrite_normal_form(entity)
                for seed in range(3):
                    self.assertEqual(rewrite_normal_form(entity, random.Random(seed)), expected)
                self.assertEqual(engine.normalize(expected)[0], engine.normalize(entity)[0])


class TestDecisionAgainstSearch(SimpleTestCase):
    def setUp(self):
        logging.disable(logging.WARNING)
        self.addCleanup(logging.disable, logging.NOTSET)

    def well_formed(self, sort):
        found = []
        for n in range(1, 7):
            for entity in pure_of_size(sort, n):
                try:
                    engine.wf(entity)
                except KernelError:
                    continue
                found.append(entity)
        return found

    def test_small_pure_pairs(self):
        model = FinSetCwf(2)
        for sort in Sort:
            entities = self.well_formed(sort)
            for left in entities:
                for right in entities:
                    with self.subTest(left=str(left), right=str(right)):
                        try:
                            decided = decide_pure_eq(left, right)
                        except IllFormed:
                            decided = None
                        found = search_eq(judgment(left, right, home(left)), 10)
                        self.assertEqual(isinstance(decided, Certificate), isinstance(found, Certificate))
                        if decided:
                            self.assertIsInstance(soundness_check(decided.derivation, model), Sound)
