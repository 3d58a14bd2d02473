"""
Tests for the rule catalog, derivation checking and the derivation file format.
"""
from pathlib import Path

from django.test import SimpleTestCase

from .. import engine
from ..corpus import BUILDERS, G1, O1, WEAKEN, X, build, corpus
from ..exceptions import ParseError, RuleError
from ..rules import (
    CtxEq,
    Derivation,
    RuleId,
    SubEq,
    TmEq,
    TyEq,
    check,
    derivation_size,
    flip,
    is_reflexive,
    mk,
    parse_derivation,
    parse_judgment,
    print_derivation,
    print_judgment,
    refl,
    rules_used,
)
from ..syntax import Base, Comp, Empty, Ext, Proj, TmSubst, TySubst, Unit, UnitTy, Zero

FIXTURES = Path(__file__).resolve().parent.parent / 'fixtures' / 'derivations'


class TestCorpus(SimpleTestCase):
    def test_every_rule_has_a_builder(self):
        self.assertEqual(set(BUILDERS), set(RuleId))

    def test_every_corpus_derivation_checks(self):
        for rule, d in corpus().items():
            with self.subTest(rule=rule.value):
                check(d)
                self.assertEqual(d.rule, rule)

    def test_corpus_survives_the_file_format(self):
        for rule, d in corpus().items():
            with self.subTest(rule=rule.value):
                again = parse_derivation(print_derivation(d))
                check(again)
                self.assertEqual(again.conclusion, d.conclusion)

    def test_build_accepts_rule_names(self):
        self.assertEqual(build('proj-beta').rule, RuleId.PROJ_BETA)


class TestJudgmentHelpers(SimpleTestCase):
    def test_flip_swaps_sides(self):
        j = SubEq(G1, WEAKEN, Proj(Base()), Unit())
        self.assertEqual(flip(j), SubEq(G1, Proj(Base()), WEAKEN, Unit()))
        self.assertEqual(flip(flip(j)), j)

    def test_refl_keeps_left_side(self):
        j = TyEq(G1, O1, TySubst(Base(), Proj(Base())))
        self.assertEqual(refl(j), TyEq(G1, O1, O1))
        self.assertTrue(is_reflexive(refl(j)))
        self.assertFalse(is_reflexive(j))

    def test_judgment_text(self):
        j = CtxEq(Unit(), Unit())
        self.assertEqual(print_judgment(j), '(ctx-eq unit unit)')
        self.assertEqual(parse_judgment('(ctx-eq unit unit)'), j)


class TestRuleInstances(SimpleTestCase):
    def _parts(self):
        gamma = mk(RuleId.CONG_EMPTY, [mk(RuleId.CONG_UNIT)])
        a = mk(RuleId.CONG_TMSUB, [mk(RuleId.N1_INTRO), gamma])
        return mk(RuleId.N1_FORM), gamma, a

    def test_proj_beta(self):
        d = mk(RuleId.PROJ_BETA, list(self._parts()))
        a = TmSubst(Zero(), Empty(Unit()))
        self.assertEqual(
            d.conclusion,
            SubEq(Unit(), Comp(Proj(UnitTy()), Ext(Empty(Unit()), a, UnitTy())), Empty(Unit()), Unit()),
        )

    def test_var_beta_checks_the_term_type(self):
        ty, gamma, _ = self._parts()
        with self.assertRaises(RuleError) as ctx:
            mk(RuleId.VAR_BETA, [ty, gamma, mk(RuleId.N1_INTRO)])
        self.assertEqual(ctx.exception.rule, 'var-beta')

    def test_wrong_premise_count(self):
        with self.assertRaises(RuleError):
            mk(RuleId.PROJ_BETA, [mk(RuleId.N1_FORM)])

    def test_trans_needs_matching_middle(self):
        with self.assertRaises(RuleError):
            mk(RuleId.TRANS_TY, [engine.wf(O1), mk(RuleId.N1_FORM)])

    def test_trans_side_parameter_is_the_middle(self):
        d = mk(RuleId.TRANS_TY, [engine.wf(O1), engine.wf(O1)], side=(O1,))
        check(d)
        with self.assertRaises(RuleError):
            mk(RuleId.TRANS_TY, [engine.wf(O1), engine.wf(O1)], side=(Base(),))

    def test_plain_rules_take_no_side_parameters(self):
        with self.assertRaises(RuleError):
            mk(RuleId.CONG_UNIT, side=(Base(),))

    def test_n1_eta_over_a_context(self):
        zero_g1 = TmSubst(Zero(), Empty(G1))
        d = mk(RuleId.N1_ETA, [engine.wf(zero_g1)])
        self.assertEqual(d.conclusion, TmEq(G1, zero_g1, zero_g1, TySubst(UnitTy(), Empty(G1))))

    def test_n1_eta_rejects_other_types(self):
        with self.assertRaises(RuleError):
            mk(RuleId.N1_ETA, [engine.move(engine.wf(X), G1, O1)])

    def test_unknown_rule_name(self):
        with self.assertRaises(RuleError):
            mk('no-such-rule')

    def test_sym_flips(self):
        d = mk(RuleId.SYM_SUB, [build(RuleId.PROJ_BETA)])
        self.assertEqual(d.conclusion, flip(build(RuleId.PROJ_BETA).conclusion))


class TestCheck(SimpleTestCase):
    def test_tampered_conclusion_is_located(self):
        good = build(RuleId.PROJ_BETA)
        bad_leaf = Derivation(RuleId.N1_FORM, TyEq(Unit(), Base(), Base()))
        bad = Derivation(good.rule, good.conclusion, (bad_leaf,) + good.premises[1:])
        with self.assertRaises(RuleError) as ctx:
            check(bad)
        self.assertEqual(ctx.exception.path, (0,))
        self.assertEqual(ctx.exception.rule, 'n1-form')

    def test_wrong_root_conclusion(self):
        good = build(RuleId.N1_INTRO)
        bad = Derivation(good.rule, TmEq(Unit(), Zero(), Zero(), Base()), good.premises)
        with self.assertRaises(RuleError) as ctx:
            check(bad)
        self.assertEqual(ctx.exception.path, ())

    def test_shared_subderivation_counted_once(self):
        leaf = engine.wf(O1)
        d = mk(RuleId.TRANS_TY, [leaf, leaf])
        self.assertEqual(derivation_size(d), 1 + derivation_size(leaf))
        self.assertIn('(shared', print_derivation(d))
        again = parse_derivation(print_derivation(d))
        self.assertIs(again.premises[0], again.premises[1])
        check(again)

    def test_rules_used(self):
        used = rules_used(build(RuleId.PROJ_BETA))
        self.assertIn(RuleId.PROJ_BETA, used)


class TestDerivationFiles(SimpleTestCase):
    def _load(self, name):
        return parse_derivation((FIXTURES / name).read_text())

    def test_proj_beta_file(self):
        d = self._load('proj_beta.drv')
        check(d)
        self.assertEqual(
            print_judgment(d.conclusion),
            '(sub-eq unit (comp (p n1) (ext (empty unit) (tmsub zero (empty unit)) n1)) (empty unit) unit)',
        )
        self.assertEqual(derivation_size(d), 8)

    def test_var_beta_file_shares_its_premise(self):
        d = self._load('var_beta.drv')
        check(d)
        self.assertIs(d.premises[1], d.premises[2].premises[1])
        self.assertEqual(derivation_size(d), 6)

    def test_n1_eta_file(self):
        d = self._load('n1_eta.drv')
        check(d)
        self.assertEqual(d.conclusion, TmEq(Unit(), Zero(), Zero(), UnitTy()))

    def test_undefined_reference(self):
        with self.assertRaises(ParseError):
            parse_derivation('(shared (ref d1))')

    def test_unknown_rule_in_file(self):
        with self.assertRaises(ParseError):
            parse_derivation('(rule frob (concl (ctx-eq unit unit)) (side) (prem))')

    def test_missing_sections(self):
        with self.assertRaises(ParseError):
            parse_derivation('(rule cong-unit (concl (ctx-eq unit unit)))')
