"""Evaluation, lifting, readback and conversion."""
import random

import pytest

from kernel import core
from kernel.levels import StructureId, get_structure, to_internal_nf
from kernel.nbe import (
    KernelBug,
    LClosed,
    LNeutral,
    LSupNode,
    Normalizer,
    VBoolTy,
    VLam,
    VLiftStuck,
    VLtTok,
    VLtTy,
    VLvl,
    VNatTy,
    VPi,
    VSuc,
    VTrue,
    VUniv,
    VZero,
    Closure,
    fresh_var,
    is_irrelevant,
    normalizer_for,
)
from tests.conftest import random_type

NAT = normalizer_for(StructureId.NAT)


def lvl(norm: Normalizer, n: int) -> LClosed:
    return LClosed(norm.structure.fin(n))


def numeral(n: int) -> core.Term:
    term: core.Term = core.Zero()
    for _ in range(n):
        term = core.Suc(term)
    return term


ADD = core.Lam(
    "m",
    core.Lam(
        "n",
        core.NatElim(
            core.Lam("_", core.NatTy()),
            core.Var(1),
            core.Lam("_", core.Lam("r", core.Suc(core.Var(0)))),
            core.Var(0),
        ),
    ),
)


class TestEval:
    def test_two_plus_two(self):
        value = NAT.eval((), core.App(core.App(ADD, numeral(2)), numeral(2)))
        assert NAT.quote(0, value) == numeral(4)

    def test_if_true(self):
        term = core.If(core.Lam("_", core.NatTy()), core.TrueTm(), numeral(1), numeral(2))
        assert NAT.eval((), term) == NAT.eval((), numeral(1))

    def test_lift_of_bool_is_bool(self):
        zero, one = core.LZero(), core.LSuc(core.LZero())
        term = core.LiftTy(core.LtPrim(core.PrimId.LT_DEC, (zero, one)), core.BoolTy(), zero, one)
        assert NAT.eval((), term) == VBoolTy()

    def test_let_unfolds(self):
        term = core.Let("x", core.NatTy(), numeral(3), core.Suc(core.Var(0)))
        assert NAT.normalize((), term) == numeral(4)

    def test_levels(self):
        assert NAT.eval((), core.LSuc(core.LSuc(core.LZero()))) == VLvl(lvl(NAT, 2))
        omega1 = normalizer_for(StructureId.OMEGA_PLUS_ONE)
        assert omega1.eval((), core.LOmega()) == VLvl(LClosed(omega1.structure.omega()))

    def test_omega_under_nat_is_a_bug(self):
        with pytest.raises(KernelBug):
            NAT.eval((), core.LOmega())

    def test_escaping_index_is_a_bug(self):
        with pytest.raises(KernelBug):
            NAT.eval((), core.Var(0))

    def test_fin_to_lvl(self):
        assert NAT.fin_to_lvl(NAT.eval((), numeral(3))) == lvl(NAT, 3)

    def test_lvl_elim_counts(self):
        term = core.LvlElim(
            core.Lam("_", core.NatTy()),
            core.Zero(),
            core.Lam("_", core.Lam("r", core.Suc(core.Var(0)))),
            to_internal_nf(NAT.structure.fin(4)),
        )
        assert NAT.normalize((), term) == numeral(4)

    def test_primitives_evaluate_to_tokens(self):
        two = to_internal_nf(NAT.structure.fin(2))
        token = NAT.eval((), core.LtPrim(core.PrimId.LT_SUC_SELF, (two,)))
        assert token == VLtTok(lvl(NAT, 2), lvl(NAT, 3))

    def test_long_numerals(self):
        value = NAT.eval((), core.App(core.App(ADD, numeral(200)), numeral(300)))
        count = 0
        while isinstance(value, VSuc):
            value = value.pred
            count += 1
        assert count == 500 and value == VZero()


class TestLevelValues:
    def test_sup_of_closed(self):
        assert NAT.lsup_value(lvl(NAT, 2), lvl(NAT, 5)) == lvl(NAT, 5)

    def test_sup_idempotent_on_neutral(self):
        x = LNeutral(fresh_var(0).neutral)
        assert NAT.lsup_value(x, x) == x

    def test_sup_absorbs_small_literal(self):
        x = LNeutral(fresh_var(0).neutral, 2)
        assert NAT.lsup_value(x, lvl(NAT, 1)) == x

    def test_sup_keeps_larger_literal(self):
        x = LNeutral(fresh_var(0).neutral, 0)
        result = NAT.lsup_value(x, lvl(NAT, 3))
        assert isinstance(result, LSupNode) and lvl(NAT, 3) in result.operands

    def test_omega_absorbs_under_omega1(self):
        omega1 = normalizer_for(StructureId.OMEGA_PLUS_ONE)
        top = LClosed(omega1.structure.omega())
        assert omega1.lsup_value(LNeutral(fresh_var(0).neutral), top) == top

    def test_sup_readback_ignores_operand_order(self):
        f = fresh_var(0)
        a = LNeutral(NAT.vapp(f, VLvl(lvl(NAT, 0))).neutral)
        b = LNeutral(NAT.vapp(f, VLvl(lvl(NAT, 1))).neutral)
        assert NAT.quote_level(1, NAT.lsup_value(a, b)) == NAT.quote_level(1, NAT.lsup_value(b, a))
        c = LNeutral(fresh_var(1).neutral, 1)
        orders = [(a, b, c), (c, b, a), (b, c, a)]
        quoted = {NAT.quote_level(2, NAT.lsup_value(NAT.lsup_value(x, y), z)) for x, y, z in orders}
        assert len(quoted) == 1

    def test_sup_merges_convertible_operands(self):
        g = fresh_var(0)
        a = LNeutral(NAT.vapp(g, VLam("x", Closure((), core.Var(0)))).neutral)
        b = LNeutral(NAT.vapp(g, VLam("y", Closure((VTrue(),), core.Var(0)))).neutral, 1)
        assert a.base != b.base
        assert NAT.lsup_value(a, b) == b

    def test_successor_of_neutral(self):
        x = LNeutral(fresh_var(0).neutral)
        assert NAT.lsuc(NAT.lsuc(x)) == LNeutral(x.base, 2)


class TestLift:
    def test_base_fixed(self):
        assert NAT.lift_value(lvl(NAT, 0), lvl(NAT, 1), VBoolTy()) == VBoolTy()

    def test_universe_fixed(self):
        u = VUniv(lvl(NAT, 0), lvl(NAT, 1))
        assert NAT.lift_value(lvl(NAT, 1), lvl(NAT, 2), u) == u

    def test_neutral_gets_stuck_and_retargets(self):
        x = fresh_var(0)
        once = NAT.lift_value(lvl(NAT, 0), lvl(NAT, 1), x)
        twice = NAT.lift_value(lvl(NAT, 1), lvl(NAT, 2), once)
        assert twice == VLiftStuck(lvl(NAT, 0), lvl(NAT, 2), x.neutral)

    def test_distributes_over_pi(self):
        x = fresh_var(0)
        pi = VPi("y", x, Closure((x,), core.Var(1)))
        lifted = NAT.lift_value(lvl(NAT, 0), lvl(NAT, 1), pi)
        assert isinstance(lifted, VPi)
        assert lifted.dom == VLiftStuck(lvl(NAT, 0), lvl(NAT, 1), x.neutral)
        assert NAT.instantiate(lifted.cod, fresh_var(1)) == VLiftStuck(lvl(NAT, 0), lvl(NAT, 1), x.neutral)

    @pytest.mark.parametrize("structure_id", list(StructureId), ids=lambda sid: sid.value)
    def test_functorial_on_random_types(self, structure_id, rng):
        norm = normalizer_for(structure_id)
        structure = get_structure(structure_id)
        levels = structure.enumerate(3)
        type_var = fresh_var(0, VUniv(LClosed(structure.zero()), LClosed(structure.fin(1))))
        env = (type_var,)
        for _ in range(200):
            i, j, k = sorted(rng.sample(range(len(levels)), 3))
            a, b, c = (LClosed(levels[n]) for n in (i, j, k))
            ty = norm.eval(env, random_type(rng, structure, size=3, type_vars=1))
            two_step = norm.lift_value(b, c, norm.lift_value(a, b, ty))
            one_step = norm.lift_value(a, c, ty)
            assert norm.quote(1, two_step) == norm.quote(1, one_step)
            assert norm.conv_type(1, two_step, one_step)


class TestQuote:
    def test_canonical(self):
        assert NAT.quote(0, VTrue()) == core.TrueTm()

    def test_variable(self):
        assert NAT.quote(1, fresh_var(0)) == core.Var(0)

    def test_token_reads_back_as_decision(self):
        one, two = to_internal_nf(NAT.structure.fin(1)), to_internal_nf(NAT.structure.fin(2))
        assert NAT.quote(0, VLtTok(lvl(NAT, 1), lvl(NAT, 2))) == core.LtPrim(core.PrimId.LT_DEC, (one, two))

    def test_stuck_lift_reads_back_as_lift(self):
        stuck = VLiftStuck(lvl(NAT, 0), lvl(NAT, 1), fresh_var(0).neutral)
        quoted = NAT.quote(1, stuck)
        assert isinstance(quoted, core.LiftTy) and quoted.ty == core.Var(0)

    @pytest.mark.parametrize("seed", range(10))
    def test_eval_quote_eval_is_stable(self, seed):
        rng = random.Random(seed)
        structure = NAT.structure
        term = random_type(rng, structure, size=4)
        normal = NAT.normalize((), term)
        assert NAT.normalize((), normal) == normal


class TestConv:
    def test_proofs_are_irrelevant(self):
        ty = VLtTy(lvl(NAT, 0), lvl(NAT, 2))
        p = fresh_var(0, ty)
        q = VLtTok(lvl(NAT, 0), lvl(NAT, 2))
        assert is_irrelevant(p)
        assert NAT.conv(1, p, q, ty)

    def test_eta(self):
        f = fresh_var(0)
        identity_type = VPi("x", VNatTy(), Closure((), core.NatTy()))
        expanded = VLam("x", Closure((f,), core.App(core.Var(1), core.Var(0))))
        assert NAT.conv(1, f, expanded, identity_type)

    def test_universes_compare_lower_index(self):
        assert NAT.conv_type(0, VUniv(lvl(NAT, 0), lvl(NAT, 1)), VUniv(lvl(NAT, 0), lvl(NAT, 3)))
        assert not NAT.conv_type(0, VUniv(lvl(NAT, 0), lvl(NAT, 2)), VUniv(lvl(NAT, 1), lvl(NAT, 2)))

    def test_cumulative_sees_through_lift(self):
        x = fresh_var(0)
        stuck = NAT.lift_value(lvl(NAT, 0), lvl(NAT, 1), x)
        assert not NAT.conv_type(1, stuck, x)
        assert NAT.conv_type(1, stuck, x, cumulative=True)

    def test_sup_as_operand_set(self):
        x = LNeutral(fresh_var(0).neutral)
        y = LNeutral(fresh_var(1).neutral)
        assert NAT.conv_level(2, NAT.lsup_value(x, y), NAT.lsup_value(y, x))

    def test_distinct_variables(self):
        assert not NAT.conv_untyped(2, fresh_var(0), fresh_var(1))

    def test_level_mentions(self):
        x = LNeutral(fresh_var(0).neutral, 1)
        assert NAT.level_mentions(1, x, 0)
        assert not NAT.level_mentions(2, x, 1)

    def test_irrelevant_in_spines(self):
        f = fresh_var(0)
        p = fresh_var(1, VLtTy(lvl(NAT, 0), lvl(NAT, 1)))
        token = VLtTok(lvl(NAT, 0), lvl(NAT, 1))
        assert NAT.conv_untyped(2, NAT.vapp(f, p), NAT.vapp(f, token))
