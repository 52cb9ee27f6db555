"""Bidirectional elaboration from surface syntax into the core language.

``infer`` synthesises a type, ``check`` pushes an expected type inwards, and
``elab_type`` elaborates a term that must be a type, returning the level it
lives at. Cumulativity is silent for terms (``Lift p A`` and ``A`` have the
same elements) and explicit for types (a type used at a higher level is
wrapped in ``Lift``). Subtyping between universes and functions inserts
coercions.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, List, Optional, Tuple

from kernel import core
from kernel.levels import StructureId, get_structure, lt, to_internal_nf
from kernel.nbe import (
    HostClosure,
    KernelBug,
    LClosed,
    LevelValue,
    LNeutral,
    LSupNode,
    Normalizer,
    Value,
    VBoolTy,
    VEmptyTy,
    VFalse,
    VLtTy,
    VLvl,
    VLvlTy,
    VNatTy,
    VPi,
    VSuc,
    VTrue,
    VUnitTy,
    VUniv,
    VZero,
    ENatElim,
    Neutral,
    fresh_var,
)
from syntax.printer import core_to_source, pretty_print, print_module
from syntax.surface import (
    Module,
    Decl,
    ParseError,
    SAnn,
    SApp,
    SBuiltin,
    SCoerce,
    SLam,
    SLet,
    SLift,
    SLit,
    SPi,
    SUniv,
    SVar,
    SourceTerm,
    Span,
    parse,
)

logger = logging.getLogger("ttfl.elab")


class ErrorKind(Enum):
    UNBOUND = "UNBOUND"
    MISMATCH = "MISMATCH"
    NOT_A_TYPE = "NOT_A_TYPE"
    LEVEL_ORDER = "LEVEL_ORDER"
    NO_SUBTYPE = "NO_SUBTYPE"
    PARSE = "PARSE"
    CANNOT_INFER = "CANNOT_INFER"
    LEVEL_SCOPE = "LEVEL_SCOPE"


class ElabError(Exception):
    """
    Elaboration failure.

    Attributes:
        kind: Error category
        message: Human-readable description
        span: Source location of the offending term
        context: Printed local context, one ``name : type`` line per binder
    """

    def __init__(self, kind: ErrorKind, message: str, span: Span, context: Tuple[str, ...] = ()):
        super().__init__(f"{kind.value}: {message}")
        self.kind = kind
        self.message = message
        self.span = span
        self.context = context

    @classmethod
    def from_parse_error(cls, error: ParseError) -> "ElabError":
        return cls(ErrorKind.PARSE, error.message, error.span)


@dataclass(frozen=True)
class TypeAtLevel:
    """A type together with the level it was shown to live at, when known."""

    type: Value
    level: Optional[LevelValue]


@dataclass(frozen=True)
class Ctx:
    """
    Elaboration context.

    Entries are either bound variables (their environment slot holds a fresh
    neutral) or definitions (the slot holds the defined value). Globals of a
    module are definitions.
    """

    norm: Normalizer
    names: Tuple[str, ...] = ()
    types: Tuple[Value, ...] = ()
    levels: Tuple[Optional[LevelValue], ...] = ()
    env: Tuple[Value, ...] = ()
    bound: Tuple[bool, ...] = ()

    @classmethod
    def empty(cls, structure_id: StructureId = StructureId.NAT) -> "Ctx":
        return cls(Normalizer(get_structure(structure_id)))

    @property
    def depth(self) -> int:
        return len(self.env)

    @property
    def structure(self):
        return self.norm.structure

    def bind(self, name: str, ty: Value, level: Optional[LevelValue]) -> "Ctx":
        return self._extend(name, ty, level, fresh_var(self.depth, ty), True)

    def define(self, name: str, ty: Value, level: Optional[LevelValue], value: Value) -> "Ctx":
        return self._extend(name, ty, level, value, False)

    def _extend(self, name, ty, level, value, bound) -> "Ctx":
        return Ctx(
            self.norm,
            self.names + (name,),
            self.types + (ty,),
            self.levels + (level,),
            self.env + (value,),
            self.bound + (bound,),
        )

    def lookup(self, name: str) -> Optional[Tuple[int, Value, Optional[LevelValue]]]:
        for pos in range(self.depth - 1, -1, -1):
            if self.names[pos] == name:
                return self.depth - 1 - pos, self.types[pos], self.levels[pos]
        return None

    def hypotheses(self) -> Iterator[VLtTy]:
        for ty in self.types:
            if isinstance(ty, VLtTy):
                yield ty

    def eval(self, t: core.Term) -> Value:
        return self.norm.eval(self.env, t)

    def level(self, t: core.Term) -> LevelValue:
        return self.norm.level(self.env, t)

    def quote(self, v: Value) -> core.Term:
        return self.norm.quote(self.depth, v)

    def quote_level(self, lv: LevelValue) -> core.Term:
        return self.norm.quote_level(self.depth, lv)

    def show(self, v: Value) -> str:
        return pretty_print(self.quote(v), self.names)

    def show_level(self, lv: LevelValue) -> str:
        return pretty_print(self.quote_level(lv), self.names)

    def describe(self) -> Tuple[str, ...]:
        lines = []
        for pos in range(self.depth):
            if self.bound[pos]:
                ty = pretty_print(self.norm.quote(pos, self.types[pos]), self.names[:pos])
                lines.append(f"{self.names[pos]} : {ty}")
        return tuple(lines)


def _fail(ctx: Ctx, kind: ErrorKind, message: str, term: SourceTerm) -> ElabError:
    return ElabError(kind, message, term.span, ctx.describe())


# Level reasoning

def _zero(ctx: Ctx) -> LClosed:
    return LClosed(ctx.structure.zero())


def _is_finite(ctx: Ctx, lv: LevelValue) -> bool:
    """Closed finite levels and anything computed by ``finToLvl``, plus successors."""
    if isinstance(lv, LClosed):
        return lv.level.is_finite
    if isinstance(lv, LSupNode):
        return all(_is_finite(ctx, op) for op in lv.operands)
    spine = lv.base.spine
    if not spine or not isinstance(spine[-1], ENatElim):
        return False
    scrut = Neutral(lv.base.head, spine[:-1])
    expected = ctx.norm.fin_to_lvl(ctx.norm.from_level(LNeutral(scrut, 0)))
    return isinstance(expected, LNeutral) and ctx.norm.conv_neutral(ctx.depth, expected.base, lv.base)


def prove_lt(ctx: Ctx, lo: LevelValue, hi: LevelValue, hypotheses: bool = True) -> bool:
    """
    Decide ``lo < hi`` in a context.

    Closed levels are compared directly. Open levels succeed when a context
    hypothesis states the order, when both sides share a neutral and ``hi``
    has more successors (outside saturating structures), when a finite
    literal sits below the successor count of ``hi``, when a finite level is
    compared with a transfinite literal, when ``hi`` is a supremum with a
    suitable operand, or through any chain of hypotheses by transitivity.

    Args:
        ctx: Context providing hypotheses of type ``Lt i j``
        lo: Candidate smaller level
        hi: Candidate larger level
        hypotheses: Whether context hypotheses may be used

    Returns:
        True when the order was established
    """
    norm, depth = ctx.norm, ctx.depth
    if isinstance(lo, LClosed) and isinstance(hi, LClosed):
        return lt(lo.level, hi.level)
    if isinstance(hi, LSupNode) and any(prove_lt(ctx, lo, op, hypotheses) for op in hi.operands):
        return True
    if isinstance(lo, LSupNode):
        return all(prove_lt(ctx, op, hi, hypotheses) for op in lo.operands)
    if isinstance(lo, LClosed) and lo.level.is_finite and isinstance(hi, LNeutral) and lo.level.offset < hi.succs:
        return True
    if isinstance(hi, LClosed) and not hi.level.is_finite and _is_finite(ctx, lo):
        return True
    if (
        isinstance(lo, LNeutral)
        and isinstance(hi, LNeutral)
        and not ctx.structure.saturating
        and lo.succs < hi.succs
        and norm.conv_neutral(depth, lo.base, hi.base)
    ):
        return True
    if hypotheses:
        return _hypothesis_chain(ctx, lo, hi)
    return False


def _same(ctx: Ctx, a: LevelValue, b: LevelValue) -> bool:
    return ctx.norm.conv_level(ctx.depth, a, b)


def _at_most(ctx: Ctx, a: LevelValue, b: LevelValue) -> bool:
    return _same(ctx, a, b) or prove_lt(ctx, a, b, False)


def _hypothesis_chain(ctx: Ctx, lo: LevelValue, hi: LevelValue) -> bool:
    """
    Search the context hypotheses for ``lo ≤ h1.lo < h1.hi ≤ h2.lo < ... < hn.hi ≤ hi``.

    Every link between hypotheses is an equality or an order shown without
    hypotheses, so the search is the transitive closure of the hypothesis
    graph and terminates after visiting each hypothesis once.
    """
    hyps = list(ctx.hypotheses())
    pending = [i for i, hyp in enumerate(hyps) if _at_most(ctx, lo, hyp.lo)]
    seen = set(pending)
    while pending:
        reached = hyps[pending.pop()].hi
        if _at_most(ctx, reached, hi):
            return True
        for i, hyp in enumerate(hyps):
            if i not in seen and _at_most(ctx, reached, hyp.lo):
                seen.add(i)
                pending.append(i)
    return False


def join_levels(ctx: Ctx, a: LevelValue, b: LevelValue) -> LevelValue:
    """Level of a Π from the levels of its domain and codomain."""
    if _same(ctx, a, b) or prove_lt(ctx, b, a):
        return a
    if prove_lt(ctx, a, b):
        return b
    return ctx.norm.lsup_value(a, b)


def level_above(ctx: Ctx, lv: LevelValue) -> Optional[LevelValue]:
    """The least level strictly above ``lv``, or None when no universe contains it."""
    if isinstance(lv, LClosed):
        above = ctx.structure.above(lv.level)
        return LClosed(above) if above is not None else None
    if ctx.structure.saturating:
        return None
    return ctx.norm.lsuc(lv)


def reflect_level(ctx: Ctx, t: core.Term) -> LevelValue:
    """Read an elaborated term of type ``Lvl`` as a level; closed terms give closed levels."""
    return ctx.level(t)


def reify_level(lv: LevelValue, ctx: Ctx) -> core.Term:
    """Inverse of ``reflect_level``: the internal normal form of a level."""
    if isinstance(lv, LClosed):
        return to_internal_nf(lv.level)
    return ctx.quote_level(lv)


def _lift_term(ctx: Ctx, ty: core.Term, src: LevelValue, tgt: LevelValue) -> core.Term:
    src_c, tgt_c = ctx.quote_level(src), ctx.quote_level(tgt)
    return core.LiftTy(core.LtPrim(core.PrimId.LT_DEC, (src_c, tgt_c)), ty, src_c, tgt_c)


# Coercions

class CoercionKind(Enum):
    REFL = "REFL"
    U_LE = "U_LE"
    PI_LE = "PI_LE"


@dataclass(frozen=True)
class Coercion:
    """
    A subtyping derivation ``source ≤ target`` and its core witness.

    ``dom`` and ``cod`` are set for ``PI_LE``: the domain coercion runs from
    the target's domain to the source's, the codomain one forwards.
    """

    kind: CoercionKind
    source: Value
    target: Value
    witness: core.Coercion
    source_term: core.Term
    target_term: core.Term
    dom: Optional["Coercion"] = None
    cod: Optional["Coercion"] = None


def subtype(ctx: Ctx, a: Value, b: Value) -> Optional[Coercion]:
    """
    Derive ``a ≤ b``.

    Args:
        ctx: Context both types live in
        a: Source type
        b: Target type

    Returns:
        The derivation, or None when there is none
    """
    norm = ctx.norm
    if norm.conv_type(ctx.depth, a, b, cumulative=True):
        return Coercion(CoercionKind.REFL, a, b, core.CoRefl(), ctx.quote(a), ctx.quote(b))
    if isinstance(a, VUniv) and isinstance(b, VUniv):
        if not prove_lt(ctx, a.lo, b.lo):
            return None
        witness = core.CoULe(ctx.quote_level(a.lo), ctx.quote_level(b.lo))
        return Coercion(CoercionKind.U_LE, a, b, witness, ctx.quote(a), ctx.quote(b))
    if isinstance(a, VPi) and isinstance(b, VPi):
        dom = subtype(ctx, b.dom, a.dom)
        if dom is None:
            return None
        inner = ctx.bind(b.name, b.dom, None)
        arg = inner.env[-1]
        coerced = norm.coerce_value(dom.witness, ctx.env, arg)
        cod = subtype(inner, norm.instantiate(a.cod, coerced), norm.instantiate(b.cod, arg))
        if cod is None:
            return None
        witness = core.CoPiLe(dom.witness, cod.witness)
        return Coercion(CoercionKind.PI_LE, a, b, witness, ctx.quote(a), ctx.quote(b), dom, cod)
    return None


def apply_coercion(coercion: Coercion, t: core.Term) -> core.Term:
    """
    Transport a term along a coercion.

    ``REFL`` leaves the term alone, ``U_LE`` lifts the type code, and
    ``PI_LE`` wraps the function in a ``Coerce`` node that computes by
    coercing the argument backwards and the result forwards.
    """
    if coercion.kind is CoercionKind.REFL:
        return t
    if coercion.kind is CoercionKind.U_LE:
        witness = coercion.witness
        return core.LiftTy(core.LtPrim(core.PrimId.LT_DEC, (witness.src, witness.tgt)), t, witness.src, witness.tgt)
    return core.Coerce(coercion.witness, t, coercion.source_term, coercion.target_term)


# Elaboration

_BASE_TYPE_FORMERS = {
    "Bool": core.BoolTy(),
    "Nat": core.NatTy(),
    "Empty": core.EmptyTy(),
    "Unit": core.UnitTy(),
    "Lvl": core.LvlTy(),
}

_ELIMINATORS = {"if", "natElim", "lvlElim", "exfalso"}
_MOTIVE_LESS_ARITY = {"if": 3, "natElim": 3, "lvlElim": 3, "exfalso": 1}


def is_type_former(s: SourceTerm) -> bool:
    if isinstance(s, (SPi, SUniv, SLift)):
        return True
    return isinstance(s, SBuiltin) and (s.name in _BASE_TYPE_FORMERS or s.name == "Lt")


def _nat_literal(n: int) -> core.Term:
    term: core.Term = core.Zero()
    for _ in range(n):
        term = core.Suc(term)
    return term


def elab_type(ctx: Ctx, s: SourceTerm) -> Tuple[core.Term, LevelValue]:
    """
    Elaborate a term that must denote a type.

    Args:
        ctx: Elaboration context
        s: Surface term

    Returns:
        The core type and the level it lives at

    Raises:
        ElabError: NOT_A_TYPE, LEVEL_ORDER, LEVEL_SCOPE and anything raised below
    """
    norm = ctx.norm
    if isinstance(s, SPi):
        dom_c, dom_level = elab_type(ctx, s.dom)
        inner = ctx.bind(s.name, ctx.eval(dom_c), dom_level)
        cod_c, cod_level = elab_type(inner, s.cod)
        if norm.level_mentions(inner.depth, cod_level, ctx.depth):
            raise _fail(
                ctx,
                ErrorKind.LEVEL_SCOPE,
                f"the level of the codomain depends on '{s.name}', so no universe contains this type",
                s,
            )
        return core.Pi(s.name, dom_c, cod_c), join_levels(ctx, dom_level, cod_level)
    if isinstance(s, SUniv):
        return _elab_universe(ctx, s)
    if isinstance(s, SLift):
        proof_c, proof_t = infer(ctx, s.proof)
        prop = proof_t.type
        if not isinstance(prop, VLtTy):
            raise _fail(ctx, ErrorKind.MISMATCH, f"Lift expects a proof of Lt i j, got {ctx.show(prop)}", s.proof)
        ty_c = check_type_at(ctx, s.ty, prop.lo)
        lifted = core.LiftTy(proof_c, ty_c, ctx.quote_level(prop.lo), ctx.quote_level(prop.hi))
        return lifted, prop.hi
    if isinstance(s, SBuiltin) and s.name in _BASE_TYPE_FORMERS:
        return _BASE_TYPE_FORMERS[s.name], _zero(ctx)
    if isinstance(s, SBuiltin) and s.name == "Lt":
        lo_c = check(ctx, s.args[0], VLvlTy())
        hi_c = check(ctx, s.args[1], VLvlTy())
        return core.LtTy(lo_c, hi_c), _zero(ctx)
    term, inferred = infer(ctx, s)
    if isinstance(inferred.type, VUniv):
        return term, inferred.type.lo
    raise _fail(ctx, ErrorKind.NOT_A_TYPE, f"expected a type, got a term of type {ctx.show(inferred.type)}", s)


def _elab_universe(ctx: Ctx, s: SUniv) -> Tuple[core.Term, LevelValue]:
    lo_c = check(ctx, s.lo, VLvlTy())
    hi_c = check(ctx, s.hi, VLvlTy())
    lo, hi = ctx.level(lo_c), ctx.level(hi_c)
    if s.proof is not None:
        proof_c = check(ctx, s.proof, VLtTy(lo, hi))
    elif isinstance(lo, LClosed) and isinstance(hi, LClosed):
        if not lt(lo.level, hi.level):
            raise _fail(ctx, ErrorKind.LEVEL_ORDER, f"U {lo.level} {hi.level}: {lo.level} is not below {hi.level}", s)
        proof_c = core.LtPrim(core.PrimId.LT_DEC, (lo_c, hi_c))
    else:
        raise _fail(
            ctx,
            ErrorKind.LEVEL_ORDER,
            f"a universe over open levels needs an explicit proof of Lt {ctx.show_level(lo)} {ctx.show_level(hi)}",
            s,
        )
    return core.Univ(lo_c, hi_c, proof_c), hi


def check_type_at(ctx: Ctx, s: SourceTerm, level: LevelValue) -> core.Term:
    """
    Elaborate ``s`` as a type at ``level``, lifting it when it lives lower.

    Raises:
        ElabError: LEVEL_ORDER when the type lives at a level not below ``level``
    """
    term, got = elab_type(ctx, s)
    if _same(ctx, got, level):
        return term
    if prove_lt(ctx, got, level):
        return _lift_term(ctx, term, got, level)
    raise _fail(
        ctx,
        ErrorKind.LEVEL_ORDER,
        f"expected a type at level {ctx.show_level(level)}, got one at level {ctx.show_level(got)}",
        s,
    )


def infer(ctx: Ctx, s: SourceTerm) -> Tuple[core.Term, TypeAtLevel]:
    """
    Synthesise the type of a term.

    Args:
        ctx: Elaboration context
        s: Surface term

    Returns:
        The core term and its type with the level of that type when known

    Raises:
        ElabError: On any typing failure
    """
    if isinstance(s, SVar):
        found = ctx.lookup(s.name)
        if found is None:
            raise _fail(ctx, ErrorKind.UNBOUND, f"unbound variable '{s.name}'", s)
        ix, ty, level = found
        return core.Var(ix), TypeAtLevel(ty, level)
    if isinstance(s, SAnn):
        ty_c, level = elab_type(ctx, s.ty)
        ty = ctx.eval(ty_c)
        term = check(ctx, s.term, ty)
        return core.Let("_", ty_c, term, core.Var(0)), TypeAtLevel(ty, level)
    if isinstance(s, SApp):
        fn_c, fn_t = infer(ctx, s.fn)
        fn_ty = fn_t.type
        if not isinstance(fn_ty, VPi):
            raise _fail(ctx, ErrorKind.MISMATCH, f"expected a function, got a term of type {ctx.show(fn_ty)}", s.fn)
        arg_c = check(ctx, s.arg, fn_ty.dom)
        result = ctx.norm.instantiate(fn_ty.cod, ctx.eval(arg_c))
        return core.App(fn_c, arg_c), TypeAtLevel(result, None)
    if isinstance(s, SLam):
        raise _fail(ctx, ErrorKind.CANNOT_INFER, "cannot infer the type of a lambda; annotate it", s)
    if isinstance(s, SLet):
        return _elab_let(ctx, s, None)
    if isinstance(s, SLit):
        return _nat_literal(s.value), TypeAtLevel(VNatTy(), _zero(ctx))
    if isinstance(s, SCoerce):
        return _elab_coerce(ctx, s)
    if is_type_former(s):
        term, level = elab_type(ctx, s)
        above = level_above(ctx, level)
        if above is None:
            raise _fail(
                ctx,
                ErrorKind.LEVEL_ORDER,
                f"this type lives at level {ctx.show_level(level)}, which no universe contains",
                s,
            )
        return term, TypeAtLevel(VUniv(level, above), above)
    if isinstance(s, SBuiltin):
        return _infer_builtin(ctx, s)
    raise _fail(ctx, ErrorKind.CANNOT_INFER, "cannot infer the type of this term", s)


def check(ctx: Ctx, s: SourceTerm, expected: Value) -> core.Term:
    """
    Check a term against an expected type value.

    Lambdas and motive-less eliminators are checked structurally; anything
    else is inferred and then compared, first up to cumulativity, then by
    subtyping with an inserted coercion.

    Raises:
        ElabError: MISMATCH when neither comparison succeeds
    """
    if isinstance(s, SLam):
        if not isinstance(expected, VPi):
            raise _fail(ctx, ErrorKind.MISMATCH, f"a lambda cannot have type {ctx.show(expected)}", s)
        inner = ctx.bind(s.name, expected.dom, None)
        body = check(inner, s.body, ctx.norm.instantiate(expected.cod, inner.env[-1]))
        return core.Lam(s.name, body)
    if isinstance(s, SLet):
        return _elab_let(ctx, s, expected)[0]
    if isinstance(s, SLit) and isinstance(expected, VLvlTy):
        return to_internal_nf(ctx.structure.fin(s.value))
    if isinstance(s, SBuiltin) and s.name in _ELIMINATORS and len(s.args) == _MOTIVE_LESS_ARITY[s.name]:
        return _check_eliminator(ctx, s, expected)
    if is_type_former(s) and isinstance(expected, VUniv):
        return check_type_at(ctx, s, expected.lo)
    term, inferred = infer(ctx, s)
    return _subsume(ctx, s, term, inferred.type, expected)


def check_type(ctx: Ctx, s: SourceTerm, expected: TypeAtLevel) -> core.Term:
    return check(ctx, s, expected.type)


def infer_type(ctx: Ctx, s: SourceTerm) -> Tuple[core.Term, TypeAtLevel]:
    return infer(ctx, s)


def _subsume(ctx: Ctx, s: SourceTerm, term: core.Term, got: Value, expected: Value) -> core.Term:
    if ctx.norm.conv_type(ctx.depth, got, expected, cumulative=True):
        return term
    coercion = subtype(ctx, got, expected)
    if coercion is None:
        raise _fail(ctx, ErrorKind.MISMATCH, f"expected {ctx.show(expected)}, got {ctx.show(got)}", s)
    logger.debug("inserting %s coercion at %d-%d", coercion.kind.value, s.span.start, s.span.end)
    return apply_coercion(coercion, term)


def _elab_let(ctx: Ctx, s: SLet, expected: Optional[Value]) -> Tuple[core.Term, TypeAtLevel]:
    if s.ty is not None:
        ty_c, level = elab_type(ctx, s.ty)
        ty = ctx.eval(ty_c)
        defn = check(ctx, s.defn, ty)
    else:
        defn, inferred = infer(ctx, s.defn)
        ty, level = inferred.type, inferred.level
        ty_c = ctx.quote(ty)
    inner = ctx.define(s.name, ty, level, ctx.eval(defn))
    if expected is None:
        body, body_t = infer(inner, s.body)
    else:
        body, body_t = check(inner, s.body, expected), TypeAtLevel(expected, None)
    return core.Let(s.name, ty_c, defn, body), body_t


def _elab_coerce(ctx: Ctx, s: SCoerce) -> Tuple[core.Term, TypeAtLevel]:
    term, inferred = infer(ctx, s.term)
    target_c, level = elab_type(ctx, s.target)
    target = ctx.eval(target_c)
    coercion = subtype(ctx, inferred.type, target)
    if coercion is None:
        raise _fail(
            ctx,
            ErrorKind.NO_SUBTYPE,
            f"{ctx.show(inferred.type)} is not a subtype of {ctx.show(target)}",
            s,
        )
    return apply_coercion(coercion, term), TypeAtLevel(target, level)


# Builtins


def _require_omega(ctx: Ctx, s: SourceTerm):
    if not ctx.structure.has_omega:
        raise _fail(ctx, ErrorKind.LEVEL_ORDER, f"'{s.name}' needs ω, which the nat structure lacks", s)


def _require_nat_structure(ctx: Ctx, s: SourceTerm):
    if ctx.structure.id is not StructureId.NAT:
        raise _fail(ctx, ErrorKind.UNBOUND, "lvlElim is only available under the nat level structure", s)


def _infer_builtin(ctx: Ctx, s: SBuiltin) -> Tuple[core.Term, TypeAtLevel]:
    norm, zero = ctx.norm, _zero(ctx)
    name, args = s.name, s.args

    def at_zero(ty: Value) -> TypeAtLevel:
        return TypeAtLevel(ty, zero)

    if name == "true":
        return core.TrueTm(), at_zero(VBoolTy())
    if name == "false":
        return core.FalseTm(), at_zero(VBoolTy())
    if name == "zero":
        return core.Zero(), at_zero(VNatTy())
    if name == "suc":
        return core.Suc(check(ctx, args[0], VNatTy())), at_zero(VNatTy())
    if name == "tt":
        return core.Tt(), at_zero(VUnitTy())
    if name == "lzero":
        return core.LZero(), at_zero(VLvlTy())
    if name == "lomega":
        _require_omega(ctx, s)
        return core.LOmega(), at_zero(VLvlTy())
    if name == "lsuc":
        return core.LSuc(check(ctx, args[0], VLvlTy())), at_zero(VLvlTy())
    if name == "lsup":
        return core.LSup(check(ctx, args[0], VLvlTy()), check(ctx, args[1], VLvlTy())), at_zero(VLvlTy())
    if name in _ELIMINATORS:
        if len(args) == _MOTIVE_LESS_ARITY[name]:
            raise _fail(ctx, ErrorKind.CANNOT_INFER, f"cannot infer the motive of '{name}'; give one explicitly", s)
        if name == "exfalso":
            ty_c, level = elab_type(ctx, args[0])
            scrut = check(ctx, args[1], VEmptyTy())
            return core.Exfalso(ty_c, scrut), TypeAtLevel(ctx.eval(ty_c), level)
        if name == "lvlElim":
            _require_nat_structure(ctx, s)
        dom = VLvlTy() if name == "lvlElim" else VBoolTy() if name == "if" else VNatTy()
        motive_c, level = _elab_motive(ctx, args[0], dom)
        return _eliminate(ctx, s, motive_c, level, args[1:])
    if name == "ltDec":
        lo_c, hi_c = check(ctx, args[0], VLvlTy()), check(ctx, args[1], VLvlTy())
        lo, hi = ctx.level(lo_c), ctx.level(hi_c)
        if not prove_lt(ctx, lo, hi):
            raise _fail(ctx, ErrorKind.LEVEL_ORDER, f"cannot show {ctx.show_level(lo)} < {ctx.show_level(hi)}", s)
        return core.LtPrim(core.PrimId.LT_DEC, (lo_c, hi_c)), at_zero(VLtTy(lo, hi))
    if name == "ltFinOmega":
        _require_omega(ctx, s)
        n_c = check(ctx, args[0], VNatTy())
        prop = VLtTy(norm.fin_to_lvl(ctx.eval(n_c)), LClosed(ctx.structure.omega()))
        return core.LtPrim(core.PrimId.LT_FIN_OMEGA, (n_c,)), at_zero(prop)
    if name == "ltSucSelf":
        if ctx.structure.saturating:
            arg_c = check(ctx, args[0], VNatTy())
            lo = norm.fin_to_lvl(ctx.eval(arg_c))
        else:
            arg_c = check(ctx, args[0], VLvlTy())
            lo = ctx.level(arg_c)
        return core.LtPrim(core.PrimId.LT_SUC_SELF, (arg_c,)), at_zero(VLtTy(lo, norm.lsuc(lo)))
    if name == "ltTrans":
        i_c, j_c, k_c = (check(ctx, arg, VLvlTy()) for arg in args[:3])
        i, j, k = ctx.level(i_c), ctx.level(j_c), ctx.level(k_c)
        q_c = check(ctx, args[3], VLtTy(j, k))
        p_c = check(ctx, args[4], VLtTy(i, j))
        return core.LtPrim(core.PrimId.LT_TRANS, (i_c, j_c, k_c, q_c, p_c)), at_zero(VLtTy(i, k))
    raise KernelBug(f"builtin '{name}' reached inference")


def _elab_motive(ctx: Ctx, s: SourceTerm, dom: Value) -> Tuple[core.Term, Optional[LevelValue]]:
    """Elaborate an eliminator motive, a function from ``dom`` into some universe."""
    norm = ctx.norm
    if isinstance(s, SLam):
        inner = ctx.bind(s.name, dom, _zero(ctx))
        body_c, level = elab_type(inner, s.body)
        motive = core.Lam(s.name, body_c)
    else:
        motive, inferred = infer(ctx, s)
        fn_ty = inferred.type
        if not isinstance(fn_ty, VPi) or not norm.conv_type(ctx.depth, fn_ty.dom, dom):
            raise _fail(ctx, ErrorKind.MISMATCH, f"a motive must be a function out of {ctx.show(dom)}", s)
        inner = ctx.bind("_", fn_ty.dom, _zero(ctx))
        cod = norm.instantiate(fn_ty.cod, inner.env[-1])
        if not isinstance(cod, VUniv):
            raise _fail(ctx, ErrorKind.MISMATCH, "a motive must return a type", s)
        level = cod.lo
    if norm.level_mentions(inner.depth, level, ctx.depth):
        raise _fail(ctx, ErrorKind.LEVEL_SCOPE, "the level of a motive may not depend on the scrutinee", s)
    return motive, level


def _eliminate(
    ctx: Ctx, s: SBuiltin, motive_c: core.Term, level: Optional[LevelValue], rest: Tuple[SourceTerm, ...]
) -> Tuple[core.Term, TypeAtLevel]:
    norm = ctx.norm
    motive = ctx.eval(motive_c)

    def at(v: Value) -> Value:
        return norm.vapp(motive, v)

    if s.name == "if":
        scrut = check(ctx, rest[0], VBoolTy())
        then = check(ctx, rest[1], at(VTrue()))
        else_ = check(ctx, rest[2], at(VFalse()))
        return core.If(motive_c, scrut, then, else_), TypeAtLevel(at(ctx.eval(scrut)), level)
    if s.name == "natElim":
        zero = check(ctx, rest[0], at(VZero()))
        step_ty = VPi("k", VNatTy(), HostClosure(lambda k: VPi("r", at(k), HostClosure(lambda _r: at(VSuc(k))))))
        step = check(ctx, rest[1], step_ty)
        scrut = check(ctx, rest[2], VNatTy())
        return core.NatElim(motive_c, zero, step, scrut), TypeAtLevel(at(ctx.eval(scrut)), level)

    def succ_of(l: Value) -> Value:
        return norm.from_level(norm.lsuc(norm.as_level(l)))

    zero = check(ctx, rest[0], at(VLvl(LClosed(ctx.structure.zero()))))
    step_ty = VPi("l", VLvlTy(), HostClosure(lambda l: VPi("r", at(l), HostClosure(lambda _r: at(succ_of(l))))))
    step = check(ctx, rest[1], step_ty)
    scrut = check(ctx, rest[2], VLvlTy())
    return core.LvlElim(motive_c, zero, step, scrut), TypeAtLevel(at(ctx.eval(scrut)), level)


def _check_eliminator(ctx: Ctx, s: SBuiltin, expected: Value) -> core.Term:
    """Motive-less eliminators take the expected type as a constant motive."""
    if s.name == "exfalso":
        return core.Exfalso(ctx.quote(expected), check(ctx, s.args[0], VEmptyTy()))
    if s.name == "lvlElim":
        _require_nat_structure(ctx, s)
    motive_c = core.Lam("_", ctx.norm.quote(ctx.depth + 1, expected))
    term, _ = _eliminate(ctx, s, motive_c, None, s.args)
    return term


# Modules

@dataclass(frozen=True)
class ElaboratedDecl:
    name: str
    term: core.Term
    type: core.Term
    value: Value
    type_value: Value
    level: Optional[LevelValue]
    span: Span


@dataclass(frozen=True)
class ElaboratedModule:
    """Declarations in order; declaration ``k`` is elaborated in a context of the first ``k``."""

    structure_id: StructureId
    decls: Tuple[ElaboratedDecl, ...]
    ctx: Ctx

    @property
    def names(self) -> List[str]:
        return [decl.name for decl in self.decls]

    def find(self, name: str) -> Optional[ElaboratedDecl]:
        for decl in self.decls:
            if decl.name == name:
                return decl
        return None

    def normal_form(self, name: str) -> core.Term:
        """``quote(0, eval(globals, body))`` of a declaration."""
        decl = self.find(name)
        if decl is None:
            raise KeyError(name)
        return self.ctx.norm.quote(0, decl.value)

    def normal_type(self, name: str) -> core.Term:
        decl = self.find(name)
        if decl is None:
            raise KeyError(name)
        return self.ctx.norm.quote(0, decl.type_value)

    def to_source(self) -> Module:
        """Read every elaborated declaration back as surface syntax."""
        decls = []
        for index, decl in enumerate(self.decls):
            scope = self.names[:index]
            decls.append(Decl(decl.name, core_to_source(decl.type, scope), core_to_source(decl.term, scope)))
        return Module(tuple(decls))

    def dump(self) -> str:
        return print_module(self.to_source())


def elab_module(module: Module, structure_id: StructureId = StructureId.NAT) -> ElaboratedModule:
    """
    Elaborate declarations in order, each seeing the ones before it.

    Args:
        module: Parsed module
        structure_id: Level structure of the session

    Returns:
        The elaborated module

    Raises:
        ElabError: For the first declaration that fails
    """
    ctx = Ctx.empty(structure_id)
    decls: List[ElaboratedDecl] = []
    for decl in module.decls:
        if decl.ty is not None:
            ty_c, level = elab_type(ctx, decl.ty)
            ty = ctx.eval(ty_c)
            term = check(ctx, decl.body, ty)
        else:
            term, inferred = infer(ctx, decl.body)
            ty, level = inferred.type, inferred.level
            ty_c = ctx.quote(ty)
        value = ctx.eval(term)
        logger.debug(
            "elaborated %s at level %s", decl.name, ctx.show_level(level) if level is not None else "unknown"
        )
        decls.append(ElaboratedDecl(decl.name, term, ty_c, value, ty, level, decl.span))
        ctx = ctx.define(decl.name, ty, level, value)
    return ElaboratedModule(structure_id, tuple(decls), ctx)


def elab_source(text: str, structure_id: StructureId = StructureId.NAT) -> ElaboratedModule:
    """Parse and elaborate source text; parse failures surface as PARSE errors."""
    try:
        module = parse(text)
    except ParseError as error:
        raise ElabError.from_parse_error(error) from error
    return elab_module(module, structure_id)


def recheck(module: ElaboratedModule) -> ElaboratedModule:
    """
    Validate an elaboration by printing it and elaborating the output again.

    Every declaration must come back with a convertible type and value.

    Raises:
        KernelBug: When the printed module does not parse or disagrees
        ElabError: When the printed module no longer elaborates
    """
    text = module.dump()
    try:
        reparsed = parse(text)
    except ParseError as error:
        raise KernelBug(f"printed core does not parse: {error.message}") from error
    again = elab_module(reparsed, module.structure_id)
    norm = module.ctx.norm
    for index, (old, new) in enumerate(zip(module.decls, again.decls)):
        core.check_scope(old.term, index)
        if not norm.conv_type(0, old.type_value, new.type_value):
            raise KernelBug(f"re-elaborated type of '{old.name}' differs")
        if not norm.conv(0, old.value, new.value, old.type_value):
            raise KernelBug(f"re-elaborated value of '{old.name}' differs")
    return again
