"""
Fixture corpus: one small derivation per catalog rule, each concluding
with that rule. Built over the contexts 1, 1.o and 1.o.o[⟨⟩].
"""
from typing import Callable

from . import engine
from .rules import Derivation, RuleId, mk
from .syntax import Base, Cons, Empty, Ext, Id, Lam, Pair, Proj, Refl, TySubst, Unit, Var, Zero, o_over

BUILDERS: dict[RuleId, Callable[[RuleId], Derivation]] = {}


def builds(*rules: RuleId):
    def register(fn):
        for rule in rules:
            BUILDERS[rule] = fn
        return fn
    return register


# Shared entities
ONE = Unit()
G1 = Cons(ONE, Base())          # 1.o
O1 = o_over(G1)                 # o over 1.o
G2 = Cons(G1, O1)               # 1.o.o
O2 = o_over(G2)
X = Var(Base())                 # the variable of 1.o
WEAKEN = Proj(O1)               # G2 → G1
IDENTITY = Lam(O1, Var(O1))     # λx. x over 1.o
PAIR = Pair(O1, O2, X, X)


def x_at_o1() -> Derivation:
    return engine.move(engine.wf(X), G1, O1)


def x_as_second() -> Derivation:
    return engine.move(engine.wf(X), G1, TySubst(O2, Ext(Id(G1), X, O1)))


def pair_parts() -> list:
    wf = engine.wf
    return [wf(O1), wf(O2), x_at_o1(), x_as_second()]


_PER_SAMPLES = {
    'ctx': lambda: engine.wf(G1),
    'sub': lambda: engine.wf(WEAKEN),
    'ty': lambda: engine.wf(O1),
    'tm': lambda: engine.wf(X),
}


def _per_builder(rule: RuleId):
    kind = rule.value.split('-')[1]
    sample = _PER_SAMPLES[kind]
    if rule.value.startswith('trans-'):
        return lambda r: mk(r, [sample(), sample()])
    return lambda r: mk(r, [sample()])


for _rule in (RuleId.TRANS_CTX, RuleId.TRANS_SUB, RuleId.TRANS_TY, RuleId.TRANS_TM,
              RuleId.SYM_CTX, RuleId.SYM_SUB, RuleId.SYM_TY, RuleId.SYM_TM):
    BUILDERS[_rule] = _per_builder(_rule)


@builds(RuleId.PRES_SUB)
def _pres_sub(rule):
    return mk(rule, [engine.wf(G1), engine.wf(ONE), engine.wf(Empty(G1))])


@builds(RuleId.PRES_TY)
def _pres_ty(rule):
    return mk(rule, [engine.wf(G1), engine.wf(O1)])


@builds(RuleId.PRES_TM)
def _pres_tm(rule):
    d = engine.wf(X)
    return mk(rule, [engine.wf(G1), engine.wf(d.conclusion.ty), d])


@builds(RuleId.CONG_COMP)
def _cong_comp(rule):
    return mk(rule, [engine.wf(Proj(Base())), engine.wf(Id(ONE))])


@builds(RuleId.CONG_ID)
def _cong_id(rule):
    return mk(rule, [engine.wf(G1)])


@builds(RuleId.CONG_TYSUB)
def _cong_tysub(rule):
    return mk(rule, [engine.wf(Base()), engine.wf(Proj(Base()))])


@builds(RuleId.CONG_TMSUB)
def _cong_tmsub(rule):
    return mk(rule, [engine.wf(X), engine.wf(Id(G1))])


@builds(RuleId.CONG_UNIT)
def _cong_unit(rule):
    return mk(rule, [])


@builds(RuleId.CONG_EMPTY)
def _cong_empty(rule):
    return mk(rule, [engine.wf(G1)])


@builds(RuleId.CONG_CONS)
def _cong_cons(rule):
    return mk(rule, [engine.wf(ONE), engine.wf(Base())])


@builds(RuleId.CONG_PROJ)
def _cong_proj(rule):
    return mk(rule, [engine.wf(Base())])


@builds(RuleId.CONG_VAR)
def _cong_var(rule):
    return mk(rule, [engine.wf(Base())])


@builds(RuleId.CONG_EXT)
def _cong_ext(rule):
    return mk(rule, [engine.wf(Base()), engine.wf(Empty(G1)), x_at_o1()])


@builds(RuleId.ASSOC)
def _assoc(rule):
    return mk(rule, [engine.wf(Empty(G1)), engine.wf(WEAKEN), engine.wf(Id(G2))])


@builds(RuleId.ID_LEFT, RuleId.ID_RIGHT, RuleId.EMPTY_UNIQUE)
def _on_projection(rule):
    return mk(rule, [engine.wf(Proj(Base()))])


@builds(RuleId.TYSUB_COMP)
def _tysub_comp(rule):
    return mk(rule, [engine.wf(Base()), engine.wf(Empty(G1)), engine.wf(WEAKEN)])


@builds(RuleId.TYSUB_ID)
def _tysub_id(rule):
    return mk(rule, [engine.wf(Base())])


@builds(RuleId.TMSUB_COMP)
def _tmsub_comp(rule):
    return mk(rule, [engine.wf(X), engine.wf(Id(G1)), engine.wf(WEAKEN)])


@builds(RuleId.TMSUB_ID)
def _tmsub_id(rule):
    return mk(rule, [engine.wf(X)])


@builds(RuleId.PROJ_BETA, RuleId.VAR_BETA)
def _extension(rule):
    return mk(rule, [engine.wf(Base()), engine.wf(Empty(G1)), x_at_o1()])


@builds(RuleId.SURJECTIVE_PAIRING)
def _surjective_pairing(rule):
    return mk(rule, [engine.wf(Id(G1))])


@builds(RuleId.BASE_TYPE)
def _base_type(rule):
    return mk(rule, [])


@builds(RuleId.I_FORM)
def _i_form(rule):
    return mk(rule, [engine.wf(X), engine.wf(X)])


@builds(RuleId.I_INTRO)
def _i_intro(rule):
    return mk(rule, [engine.wf(X)])


@builds(RuleId.I_REFLECTION)
def _i_reflection(rule):
    return mk(rule, [engine.wf(Refl(X))])


@builds(RuleId.I_UNIQUE)
def _i_unique(rule):
    return mk(rule, [engine.wf(Refl(X))])


@builds(RuleId.I_SUBST)
def _i_subst(rule):
    return mk(rule, [engine.wf(X), engine.wf(X), engine.wf(WEAKEN)])


@builds(RuleId.N1_FORM)
def _n1_form(rule):
    return mk(rule, [])


@builds(RuleId.N1_INTRO)
def _n1_intro(rule):
    return mk(rule, [])


@builds(RuleId.N1_ETA)
def _n1_eta(rule):
    return mk(rule, [engine.wf(Zero())])


@builds(RuleId.SIGMA_FORM)
def _sigma_form(rule):
    return mk(rule, [engine.wf(O1), engine.wf(O2)])


@builds(RuleId.SIGMA_FST)
def _sigma_fst(rule):
    return mk(rule, [engine.wf(O1), engine.wf(PAIR)])


@builds(RuleId.SIGMA_SND)
def _sigma_snd(rule):
    return mk(rule, [engine.wf(O1), engine.wf(O2), engine.wf(PAIR)])


@builds(RuleId.SIGMA_PAIR)
def _sigma_pair(rule):
    return mk(rule, pair_parts())


@builds(RuleId.SIGMA_BETA_FST)
def _sigma_beta_fst(rule):
    return mk(rule, pair_parts())


@builds(RuleId.SIGMA_BETA_SND)
def _sigma_beta_snd(rule):
    return mk(rule, pair_parts())


@builds(RuleId.SIGMA_ETA)
def _sigma_eta(rule):
    return mk(rule, [engine.wf(O1), engine.wf(O2), engine.wf(PAIR)])


@builds(RuleId.SIGMA_SUBST)
def _sigma_subst(rule):
    return mk(rule, [engine.wf(O1), engine.wf(O2), engine.wf(WEAKEN)])


@builds(RuleId.SIGMA_FST_SUBST)
def _sigma_fst_subst(rule):
    return mk(rule, [engine.wf(O1), engine.wf(PAIR), engine.wf(WEAKEN)])


@builds(RuleId.SIGMA_SND_SUBST)
def _sigma_snd_subst(rule):
    return mk(rule, [engine.wf(O1), engine.wf(O2), engine.wf(PAIR), engine.wf(WEAKEN)])


@builds(RuleId.SIGMA_PAIR_SUBST)
def _sigma_pair_subst(rule):
    return mk(rule, pair_parts() + [engine.wf(WEAKEN)])


@builds(RuleId.PI_FORM)
def _pi_form(rule):
    return mk(rule, [engine.wf(O1), engine.wf(O2)])


@builds(RuleId.PI_LAM)
def _pi_lam(rule):
    return mk(rule, [engine.wf(O1), engine.wf(Var(O1))])


@builds(RuleId.PI_AP)
def _pi_ap(rule):
    return mk(rule, [engine.wf(O1), engine.wf(TySubst(O1, WEAKEN)), engine.wf(IDENTITY), x_at_o1()])


@builds(RuleId.PI_BETA)
def _pi_beta(rule):
    return mk(rule, [engine.wf(Var(O1)), x_at_o1()])


@builds(RuleId.PI_ETA)
def _pi_eta(rule):
    return mk(rule, [engine.wf(IDENTITY)])


@builds(RuleId.PI_SUBST)
def _pi_subst(rule):
    return mk(rule, [engine.wf(O1), engine.wf(O2), engine.wf(WEAKEN)])


@builds(RuleId.PI_LAM_SUBST)
def _pi_lam_subst(rule):
    return mk(rule, [engine.wf(Var(O1)), engine.wf(WEAKEN)])


@builds(RuleId.PI_AP_SUBST)
def _pi_ap_subst(rule):
    return mk(rule, [engine.wf(IDENTITY), x_at_o1(), engine.wf(WEAKEN)])


def build(rule: RuleId | str) -> Derivation:
    rule = RuleId(rule)
    return BUILDERS[rule](rule)


def corpus() -> dict[RuleId, Derivation]:
    """Every fixture, in catalog order."""
    return {rule: build(rule) for rule in RuleId}
