"""Bidirectional elaboration: universes, lifts, level proofs and error kinds."""
import itertools

import pytest

from kernel import core
from kernel.elab import Ctx, ElabError, ErrorKind, join_levels, prove_lt, recheck
from kernel.levels import StructureId, get_structure, to_internal_nf
from kernel.nbe import LClosed, LNeutral, LSupNode, VBoolTy, VLtTy, VLvlTy, VUniv, fresh_var, normalizer_for

ZERO = core.LZero()
ONE = core.LSuc(ZERO)


def univ_value(structure_id, lo, hi):
    structure = get_structure(structure_id)
    return VUniv(LClosed(structure.fin(lo)), LClosed(structure.fin(hi)))


def lam_chain(*names, body):
    for name in reversed(names):
        body = core.Lam(name, body)
    return body


class TestUniverses:
    def test_infer_universe(self, elab):
        decl = elab("u = U 0 1;").find("u")
        assert decl.type_value == univ_value(StructureId.NAT, 1, 2)

    def test_empty_interval(self, elab):
        with pytest.raises(ElabError) as info:
            elab("u = U 0 0;")
        assert info.value.kind is ErrorKind.LEVEL_ORDER

    def test_pi_lives_at_join(self, elab):
        decl = elab("T = Bool -> U 0 1;").find("T")
        assert decl.type_value == univ_value(StructureId.NAT, 1, 2)

    def test_universe_code_checks_at_lower_bound(self, elab):
        module = elab("u : U 1 2 = U 0 1;")
        assert isinstance(module.find("u").term, core.Univ)

    def test_proof_is_erased(self, elab):
        module = elab(
            "u : U 0 2 (ltTrans 0 1 2 (ltDec 1 2) (ltDec 0 1)) = Bool;\n"
            "v : U 0 2 = u;\n"
            "w : (l : Lvl) (p q : Lt l 3) -> U l 3 p -> U l 3 q = \\l p q A. A;\n"
        )
        assert module.find("w").term == lam_chain("l", "p", "q", "A", body=core.Var(0))

    def test_open_universe_needs_proof(self, elab):
        with pytest.raises(ElabError) as info:
            elab("F : (l : Lvl) -> U 5 6 = \\l. U l 3;")
        assert info.value.kind is ErrorKind.LEVEL_ORDER

    def test_top_universe_under_omega1(self, elab):
        with pytest.raises(ElabError) as info:
            elab("top = U 0 lomega;", StructureId.OMEGA_PLUS_ONE)
        assert info.value.kind is ErrorKind.LEVEL_ORDER

    def test_omega_universe_under_omega_omega(self, elab):
        structure = get_structure(StructureId.OMEGA_PLUS_OMEGA)
        decl = elab("top = U 0 lomega;", StructureId.OMEGA_PLUS_OMEGA).find("top")
        assert decl.type_value == VUniv(LClosed(structure.omega()), LClosed(structure.level(1, 1)))


class TestCheckMode:
    def test_constant_function(self, elab):
        decl = elab("k : Bool -> Nat -> Bool = \\x. \\y. x;").find("k")
        assert decl.term == core.Lam("x", core.Lam("y", core.Var(1)))

    def test_lift_of_base_type_needs_no_node(self, elab):
        decl = elab("b : Lift (ltDec 0 1) Bool = true;").find("b")
        assert decl.term == core.TrueTm()
        assert isinstance(decl.type, core.LiftTy)

    def test_universe_variable_is_lifted(self, elab):
        decl = elab("g : U 0 1 -> U 1 2 = \\A. A;").find("g")
        lifted = core.LiftTy(core.LtPrim(core.PrimId.LT_DEC, (ZERO, ONE)), core.Var(0), ZERO, ONE)
        assert decl.term == core.Lam("A", lifted)

    def test_universe_variable_cannot_go_down(self, elab):
        with pytest.raises(ElabError) as info:
            elab("g : U 1 2 -> U 0 1 = \\A. A;")
        assert info.value.kind is ErrorKind.MISMATCH

    def test_annotation_becomes_typed_let(self, elab):
        decl = elab("x = (true : Bool);").find("x")
        assert decl.term == core.Let("_", core.BoolTy(), core.TrueTm(), core.Var(0))

    def test_motive_less_eliminators(self, elab):
        module = elab(
            "six : Nat = natElim 0 (\\k r. suc (suc r)) 3;\n"
            "b : Bool = if true false true;\n"
            "absurd : Empty -> Nat = \\e. exfalso e;\n"
            "two : Nat = lvlElim 0 (\\l r. suc r) 2;\n"
        )
        assert module.normal_form("six") == core.Suc(core.Suc(core.Suc(core.Suc(core.Suc(core.Suc(core.Zero()))))))
        assert module.normal_form("b") == core.FalseTm()
        assert module.normal_form("two") == core.Suc(core.Suc(core.Zero()))

    def test_large_elimination(self, elab):
        module = elab("P : Bool -> U 0 1 = \\b. if (\\_. U 0 1) b Unit Empty;\nt : P true = tt;")
        assert module.normal_type("t") == core.UnitTy()

    def test_level_literal_in_level_position(self, elab):
        assert elab("l : Lvl = 3;").normal_form("l") == to_internal_nf(get_structure(StructureId.NAT).fin(3))


class TestStrictness:
    SOURCE = (
        "idUpTo3 : (l : Lvl) (p : Lt l 3) (A : U l 3 p) -> Lift p A -> Lift p A = \\l p A a. a;\n"
        "plainId : (l : Lvl) (p : Lt l 3) (A : U l 3 p) -> A -> A = \\l p A a. a;\n"
        "unlift : (l : Lvl) (p : Lt l 3) (A : U l 3 p) -> Lift p A -> A = \\l p A a. a;\n"
    )

    def test_bodies_carry_no_coercion(self, elab):
        module = elab(self.SOURCE)
        identity = lam_chain("l", "p", "A", "a", body=core.Var(0))
        for name in ("idUpTo3", "plainId", "unlift"):
            assert module.find(name).term == identity

    def test_lifted_type_is_distinct(self, elab):
        module = elab(self.SOURCE)
        norm = module.ctx.norm
        lifted, plain = module.find("idUpTo3").type_value, module.find("plainId").type_value
        assert not norm.conv_type(0, lifted, plain)
        assert norm.conv_type(0, lifted, plain, cumulative=True)

    @pytest.mark.parametrize(
        "ty, lifted, body",
        [
            ("Bool", "Lift (ltDec 0 1) Bool", "if true false true"),
            ("Nat", "Lift (ltDec 0 3) Nat", "natElim 2 (\\_ r. suc r) 3"),
            ("Bool -> Nat", "Lift (ltDec 0 2) (Bool -> Nat)", "\\b. if b 1 0"),
            ("U 0 1", "Lift (ltDec 1 2) (U 0 1)", "Bool -> Nat"),
            ("(A : U 0 1) -> A -> A", "Lift (ltDec 1 2) ((A : U 0 1) -> A -> A)", "\\A a. a"),
        ],
    )
    def test_lifted_expected_type_gives_same_term(self, elab, ty, lifted, body):
        plain = elab(f"x : {ty} = {body};").find("x").term
        assert elab(f"x : {lifted} = {body};").find("x").term == plain

    def test_lift_through_pi(self, elab):
        module = elab(self.SOURCE + "f : Lift (ltDec 0 1) (Bool -> Nat) = \\b. 0;\n")
        assert module.normal_type("f") == core.Pi("_", core.BoolTy(), core.NatTy())


class TestLevelProofs:
    def test_hypothesis_then_closed_step(self, elab):
        elab("f : (l : Lvl) -> Lt l 3 -> Lt l 4 = \\l p. ltDec l 4;")

    def test_no_hypothesis(self, elab):
        with pytest.raises(ElabError) as info:
            elab("f : (l : Lvl) -> Lt l 4 = \\l. ltDec l 4;")
        assert info.value.kind is ErrorKind.LEVEL_ORDER

    def test_wrong_direction(self, elab):
        with pytest.raises(ElabError) as info:
            elab("f : (l : Lvl) -> Lt l 3 -> Lt 4 l = \\l p. ltDec 4 l;")
        assert info.value.kind is ErrorKind.LEVEL_ORDER

    def test_closed_decision(self, elab):
        with pytest.raises(ElabError) as info:
            elab("p : Lt 2 1 = ltDec 2 1;")
        assert info.value.kind is ErrorKind.LEVEL_ORDER

    def test_successor_of_variable(self):
        ctx = Ctx.empty().bind("l", VLvlTy(), None)
        base = LNeutral(ctx.env[-1].neutral)
        assert prove_lt(ctx, base, LNeutral(base.base, 1))
        assert not prove_lt(ctx, LNeutral(base.base, 1), base)

    def test_literal_below_successors(self):
        ctx = Ctx.empty()
        base = LNeutral(fresh_var(0).neutral, 2)
        assert prove_lt(ctx, LClosed(ctx.structure.fin(1)), base)
        assert not prove_lt(ctx, LClosed(ctx.structure.fin(2)), base)

    def test_supremum_bounds(self):
        ctx = Ctx.empty()
        x = LNeutral(fresh_var(0).neutral)
        joined = ctx.norm.lsup_value(x, LClosed(ctx.structure.fin(3)))
        assert isinstance(joined, LSupNode)
        assert prove_lt(ctx, LClosed(ctx.structure.fin(2)), joined)
        assert not prove_lt(ctx, joined, LClosed(ctx.structure.fin(9)))

    def test_join_prefers_the_larger_side(self):
        ctx = Ctx.empty()
        two, five = LClosed(ctx.structure.fin(2)), LClosed(ctx.structure.fin(5))
        assert join_levels(ctx, two, five) == five
        assert join_levels(ctx, five, two) == five

    def test_chained_hypotheses(self, elab):
        elab("f : (i j m : Lvl) -> Lt i j -> Lt j m -> Lt m 4 -> Lt i 4 = \\i j m p q r. ltDec i 4;")

    def test_broken_chain(self, elab):
        with pytest.raises(ElabError) as info:
            elab("f : (i j m : Lvl) -> Lt i j -> Lt m 4 -> Lt i 4 = \\i j m p r. ltDec i 4;")
        assert info.value.kind is ErrorKind.LEVEL_ORDER

    @pytest.mark.parametrize(
        "source",
        [
            "g : (i j : Lvl) (p : Lt i j) (q : Lt j 5) (A : U i j p) -> Lift (ltTrans i j 5 q p) A -> Bool"
            " = \\i j p q A a. true;\nh = g;\n",
            "k : (i j m : Lvl) (p : Lt i j) (q : Lt j m) (r : Lt m 4) (A : U i j p)"
            " -> Lift (ltTrans i m 4 r (ltTrans i j m q p)) A -> A = \\i j m p q r A a. a;\nk2 = k;\n",
        ],
        ids=["two", "three"],
    )
    def test_composed_proofs_recheck(self, elab, source):
        module = elab(source)
        assert "ltDec i" in module.dump()
        again = recheck(module)
        assert again.names == module.names

    def test_fin_to_lvl_is_below_omega(self, elab):
        elab(
            "finToLvl : Nat -> Lvl = \\n. natElim (\\_. Lvl) 0 (\\k r. lsuc r) n;\n"
            "below : (n : Nat) -> Lt (finToLvl n) lomega = \\n. ltDec (finToLvl n) lomega;\n",
            StructureId.OMEGA_PLUS_ONE,
        )

    def test_transitive_proofs_are_irrelevant(self, structure_id, rng):
        norm = normalizer_for(structure_id)
        levels = get_structure(structure_id).enumerate()
        triples = list(itertools.combinations(levels, 3))
        for i, j, k in rng.sample(triples, 100):
            ti, tj, tk = (to_internal_nf(level) for level in (i, j, k))
            composed = core.LtPrim(
                core.PrimId.LT_TRANS,
                (ti, tj, tk, core.LtPrim(core.PrimId.LT_DEC, (tj, tk)), core.LtPrim(core.PrimId.LT_DEC, (ti, tj))),
            )
            direct = core.LtPrim(core.PrimId.LT_DEC, (ti, tk))
            prop = VLtTy(LClosed(i), LClosed(k))
            assert norm.conv(0, norm.eval((), composed), norm.eval((), direct), prop)
            assert norm.quote(0, norm.eval((), composed)) == direct


class TestErrors:
    @pytest.mark.parametrize(
        "source, kind",
        [
            ("x = y;", ErrorKind.UNBOUND),
            ("x : Bool = 3;", ErrorKind.MISMATCH),
            ("x : true = tt;", ErrorKind.NOT_A_TYPE),
            ("x = \\y. y;", ErrorKind.CANNOT_INFER),
            ("x = if true false true;", ErrorKind.CANNOT_INFER),
            ("x = coerce Nat true;", ErrorKind.NO_SUBTYPE),
            ("x = (l : Lvl) -> U l (lsuc l) (ltSucSelf l);", ErrorKind.LEVEL_SCOPE),
            ("x = lomega;", ErrorKind.LEVEL_ORDER),
            ("x = (;", ErrorKind.PARSE),
        ],
    )
    def test_kinds(self, elab, source, kind):
        with pytest.raises(ElabError) as info:
            elab(source)
        assert info.value.kind is kind

    def test_lvl_elim_only_under_nat(self, elab):
        with pytest.raises(ElabError) as info:
            elab("two : Nat = lvlElim 0 (\\l r. suc r) 2;", StructureId.OMEGA_PLUS_ONE)
        assert info.value.kind is ErrorKind.UNBOUND

    def test_context_is_reported(self, elab):
        with pytest.raises(ElabError) as info:
            elab("f : (A : U 0 1) -> Bool -> A = \\A b. b;")
        assert info.value.context == ("A : U 0 1", "b : Bool")

    def test_span_points_at_offender(self, elab):
        source = "x : Bool = tt;"
        with pytest.raises(ElabError) as info:
            elab(source)
        span = info.value.span
        assert source[span.start:span.end] == "tt"

    def test_earlier_declarations_in_scope(self, elab):
        module = elab("a : Bool = true;\nb : Bool = a;")
        assert module.normal_form("b") == core.TrueTm()
        assert module.find("b").term == core.Var(0)

    def test_base_type_value(self, elab):
        assert elab("t = Bool;").find("t").value == VBoolTy()


def suc_layers(term, step, base):
    layers = 0
    while isinstance(term, step):
        term = term.pred
        layers += 1
    assert isinstance(term, base)
    return layers


class TestLargeLiterals:
    def test_nat_literal(self, elab):
        module = elab("x : Nat = 2000;\ny : Nat = natElim (\\_. Nat) 1 (\\_ r. suc r) x;\n")
        assert suc_layers(module.normal_form("x"), core.Suc, core.Zero) == 2000
        assert suc_layers(module.normal_form("y"), core.Suc, core.Zero) == 2001
        recheck(module)

    def test_level_literal(self, elab):
        module = elab("T = U 0 1500;\nl : Lvl = 1500;\n")
        assert module.find("T").type_value == univ_value(StructureId.NAT, 1500, 1501)
        assert suc_layers(module.normal_form("l"), core.LSuc, core.LZero) == 1500
        recheck(module)

    def test_literals_convert(self, elab):
        module = elab("a : Nat = 1200;\nb : Nat = natElim (\\_. Nat) 200 (\\_ r. suc r) 1000;\n")
        norm = module.ctx.norm
        assert norm.conv(0, module.find("a").value, module.find("b").value, module.find("a").type_value)
