"""Normalization by evaluation.

Core terms evaluate into a semantic domain of values: closures for binders,
canonical codes for types, neutrals for computations stuck on a variable.
``Normalizer.quote`` reads values back into beta-normal core terms, and the
``conv`` family decides definitional equality with eta for functions and
unit and with proofs of ``Lt`` never compared.

Levels evaluate to ``LevelValue``: a closed level, a neutral plus a number
of successors, or a normalised supremum of such operands.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple, Union

from kernel import core
from kernel.levels import Level, LevelStructure, StructureId, get_structure, sup, to_internal_nf


class KernelBug(RuntimeError):
    """Malformed core reached the evaluator. Never raised for elaborated terms."""


# Levels

@dataclass(frozen=True)
class LClosed:
    level: Level


@dataclass(frozen=True)
class LNeutral:
    """``base`` followed by ``succs`` applications of ``lsuc``."""

    base: "Neutral"
    succs: int = 0


@dataclass(frozen=True)
class LSupNode:
    """Deduplicated operands (at least two), none absorbed by another; order is not significant."""

    operands: Tuple[Union[LClosed, LNeutral], ...]


LevelValue = Union[LClosed, LNeutral, LSupNode]


# Values

class Value:
    __slots__ = ()


@dataclass(frozen=True)
class Closure:
    env: Tuple[Value, ...]
    body: core.Term


@dataclass(frozen=True, eq=False)
class HostClosure:
    """A binder body computed by Python code; used for eliminator types."""

    fn: Callable[[Value], Value]


@dataclass(frozen=True)
class LiftedClosure:
    """A closure whose results are lifted from ``src`` to ``tgt``."""

    inner: Union[Closure, HostClosure]
    src: LevelValue
    tgt: LevelValue


AnyClosure = Union[Closure, HostClosure, LiftedClosure]


@dataclass(frozen=True)
class VLam(Value):
    name: str
    closure: AnyClosure


@dataclass(frozen=True)
class VPi(Value):
    name: str
    dom: Value
    cod: AnyClosure


@dataclass(frozen=True)
class VBoolTy(Value):
    pass


@dataclass(frozen=True)
class VTrue(Value):
    pass


@dataclass(frozen=True)
class VFalse(Value):
    pass


@dataclass(frozen=True)
class VNatTy(Value):
    pass


@dataclass(frozen=True)
class VZero(Value):
    pass


@dataclass(frozen=True)
class VSuc(Value):
    pred: Value


@dataclass(frozen=True)
class VEmptyTy(Value):
    pass


@dataclass(frozen=True)
class VUnitTy(Value):
    pass


@dataclass(frozen=True)
class VTt(Value):
    pass


@dataclass(frozen=True)
class VUniv(Value):
    """Universe code; the proof of ``lo < hi`` is erased."""

    lo: LevelValue
    hi: LevelValue


@dataclass(frozen=True)
class VLvlTy(Value):
    pass


@dataclass(frozen=True)
class VLvl(Value):
    """A level that is not a bare neutral (those stay ``VNeutral``)."""

    level: LevelValue


@dataclass(frozen=True)
class VLtTy(Value):
    lo: LevelValue
    hi: LevelValue


@dataclass(frozen=True)
class VLtTok(Value):
    """Proof token for ``lo < hi``; every proof evaluates to one of these."""

    lo: LevelValue
    hi: LevelValue


@dataclass(frozen=True)
class VLiftStuck(Value):
    """``Lift`` blocked on a neutral type; never wraps another stuck lift."""

    src: LevelValue
    tgt: LevelValue
    neutral: "Neutral"


@dataclass(frozen=True)
class VNeutral(Value):
    neutral: "Neutral"


@dataclass(frozen=True)
class VCoercedFn(Value):
    """A function wrapped in a function coercion, still to be applied."""

    witness: core.CoPiLe
    env: Tuple[Value, ...]
    fn: Value


# Neutrals

@dataclass(frozen=True)
class NVar:
    """Variable by de Bruijn level; ``irrelevant`` marks proofs of ``Lt``."""

    level: int
    irrelevant: bool = False


@dataclass(frozen=True)
class NSup:
    sup: LSupNode


@dataclass(frozen=True)
class EApp:
    arg: Value


@dataclass(frozen=True)
class EIf:
    motive: Value
    then: Value
    else_: Value


@dataclass(frozen=True)
class ENatElim:
    motive: Value
    zero: Value
    succ: Value


@dataclass(frozen=True)
class EExfalso:
    ty: Value


@dataclass(frozen=True)
class ELvlElim:
    motive: Value
    zero: Value
    succ: Value


Frame = Union[EApp, EIf, ENatElim, EExfalso, ELvlElim]


@dataclass(frozen=True)
class Neutral:
    head: Union[NVar, NSup]
    spine: Tuple[Frame, ...] = field(default=())

    def push(self, frame: Frame) -> "Neutral":
        return Neutral(self.head, self.spine + (frame,))


Env = Tuple[Value, ...]


def fresh_var(depth: int, ty: Optional[Value] = None) -> VNeutral:
    """A new variable at de Bruijn level ``depth``, flagged irrelevant for ``Lt`` types."""
    return VNeutral(Neutral(NVar(depth, isinstance(ty, VLtTy))))


def is_irrelevant(v: Value) -> bool:
    if isinstance(v, VLtTok):
        return True
    if isinstance(v, VNeutral):
        head = v.neutral.head
        return isinstance(head, NVar) and head.irrelevant and not v.neutral.spine
    return False


def _neutral_key(n: Neutral) -> Tuple[int, int, int]:
    if isinstance(n.head, NVar):
        return (0, n.head.level, len(n.spine))
    return (1, len(n.head.sup.operands), len(n.spine))


def _operand_key(op: Union[LClosed, LNeutral]) -> tuple:
    if isinstance(op, LClosed):
        return (0, op.level.block, op.level.offset)
    return (1,) + _neutral_key(op.base) + (op.succs,)


_BASE_TYPES = (VBoolTy, VNatTy, VEmptyTy, VUnitTy, VLvlTy)

# Fresh variables for comparisons made outside any context start here.
_DETACHED_DEPTH = 1 << 30


class Normalizer:
    """Evaluation, lifting, readback and conversion for one level structure."""

    def __init__(self, structure: LevelStructure):
        """
        Initialize the normalizer.

        Args:
            structure: The active level structure; level arithmetic follows it
        """
        self.structure = structure
        self._fin_to_lvl = self.eval((), core.FIN_TO_LVL)

    # Levels

    def as_level(self, v: Value) -> LevelValue:
        """Read a value of type ``Lvl`` as a level."""
        if isinstance(v, VLvl):
            return v.level
        if isinstance(v, VNeutral):
            return LNeutral(v.neutral, 0)
        raise KernelBug(f"expected a level, got {type(v).__name__}")

    def from_level(self, lv: LevelValue) -> Value:
        if isinstance(lv, LNeutral) and lv.succs == 0:
            return VNeutral(lv.base)
        return VLvl(lv)

    def lsuc(self, lv: LevelValue) -> LevelValue:
        if isinstance(lv, LClosed):
            return LClosed(self.structure.succ(lv.level))
        if isinstance(lv, LNeutral):
            return LNeutral(lv.base, lv.succs + 1)
        result: Optional[LevelValue] = None
        for op in lv.operands:
            bumped = self.lsuc(op)
            result = bumped if result is None else self.lsup_value(result, bumped)
        return result

    def lsup_value(self, a: LevelValue, b: LevelValue) -> LevelValue:
        """
        Normalised supremum of two levels.

        Closed operands collapse to their maximum, which disappears when some
        neutral operand already has at least as many successors. Operands
        over convertible neutrals keep only the largest successor count. Operand
        order inside an ``LSupNode`` is not significant; readback sorts it.

        Args:
            a: Left operand
            b: Right operand

        Returns:
            A closed level, a single neutral, or an ``LSupNode``
        """
        operands = []
        for lv in (a, b):
            operands.extend(lv.operands if isinstance(lv, LSupNode) else (lv,))

        top: Optional[Level] = None
        neutrals: list = []
        for op in operands:
            if isinstance(op, LClosed):
                top = op.level if top is None else sup(top, op.level)
                continue
            for i, other in enumerate(neutrals):
                if other.base == op.base or self.conv_neutral(_DETACHED_DEPTH, other.base, op.base):
                    if op.succs > other.succs:
                        neutrals[i] = op
                    break
            else:
                neutrals.append(op)

        if top is not None and self.structure.saturating and not top.is_finite:
            return LClosed(top)
        merged: list = list(neutrals)
        if top is not None:
            absorbed = top.is_finite and any(n.succs >= top.offset for n in neutrals)
            if not absorbed:
                merged.append(LClosed(top))
        if len(merged) == 1:
            return merged[0]
        merged.sort(key=_operand_key)
        return LSupNode(tuple(merged))

    def level(self, env: Env, t: core.Term) -> LevelValue:
        return self.as_level(self.eval(env, t))

    def fin_to_lvl(self, n: Value) -> LevelValue:
        return self.as_level(self.vapp(self._fin_to_lvl, n))

    # Evaluation

    def eval(self, env: Env, t: core.Term) -> Value:
        """
        Evaluate a core term in an environment.

        Args:
            env: Values for the free indices of ``t``; index 0 is the last entry
            t: The term to evaluate

        Returns:
            The value of ``t``
        """
        if isinstance(t, core.Var):
            if not 0 <= t.ix < len(env):
                raise KernelBug(f"index {t.ix} escapes an environment of {len(env)}")
            return env[len(env) - 1 - t.ix]
        if isinstance(t, core.Lam):
            return VLam(t.name, Closure(env, t.body))
        if isinstance(t, core.App):
            return self.vapp(self.eval(env, t.fn), self.eval(env, t.arg))
        if isinstance(t, core.Pi):
            return VPi(t.name, self.eval(env, t.dom), Closure(env, t.cod))
        if isinstance(t, core.Let):
            return self.eval(env + (self.eval(env, t.defn),), t.body)
        if isinstance(t, core.BoolTy):
            return VBoolTy()
        if isinstance(t, core.TrueTm):
            return VTrue()
        if isinstance(t, core.FalseTm):
            return VFalse()
        if isinstance(t, core.If):
            return self.v_if(
                self.eval(env, t.motive), self.eval(env, t.scrut), self.eval(env, t.then), self.eval(env, t.else_)
            )
        if isinstance(t, core.NatTy):
            return VNatTy()
        if isinstance(t, core.Zero):
            return VZero()
        if isinstance(t, core.Suc):
            layers = 0
            while isinstance(t, core.Suc):
                t = t.pred
                layers += 1
            value = self.eval(env, t)
            for _ in range(layers):
                value = VSuc(value)
            return value
        if isinstance(t, core.NatElim):
            return self.v_nat_elim(
                self.eval(env, t.motive), self.eval(env, t.zero), self.eval(env, t.succ), self.eval(env, t.scrut)
            )
        if isinstance(t, core.EmptyTy):
            return VEmptyTy()
        if isinstance(t, core.Exfalso):
            scrut = self.eval(env, t.scrut)
            if not isinstance(scrut, VNeutral):
                raise KernelBug("exfalso on a canonical value")
            return VNeutral(scrut.neutral.push(EExfalso(self.eval(env, t.ty))))
        if isinstance(t, core.UnitTy):
            return VUnitTy()
        if isinstance(t, core.Tt):
            return VTt()
        if isinstance(t, core.Univ):
            return VUniv(self.level(env, t.lo), self.level(env, t.hi))
        if isinstance(t, core.LiftTy):
            return self.lift_value(self.level(env, t.src), self.level(env, t.tgt), self.eval(env, t.ty))
        if isinstance(t, core.LvlTy):
            return VLvlTy()
        if isinstance(t, core.LZero):
            return VLvl(LClosed(self.structure.zero()))
        if isinstance(t, core.LSuc):
            layers = 0
            while isinstance(t, core.LSuc):
                t = t.pred
                layers += 1
            lv = self.level(env, t)
            for _ in range(layers):
                lv = self.lsuc(lv)
            return self.from_level(lv)
        if isinstance(t, core.LOmega):
            if not self.structure.has_omega:
                raise KernelBug("lomega under a structure without ω")
            return VLvl(LClosed(self.structure.omega()))
        if isinstance(t, core.LSup):
            return self.from_level(self.lsup_value(self.level(env, t.left), self.level(env, t.right)))
        if isinstance(t, core.LtTy):
            return VLtTy(self.level(env, t.lo), self.level(env, t.hi))
        if isinstance(t, core.LtPrim):
            return self.eval_prim(env, t)
        if isinstance(t, core.LvlElim):
            return self.v_lvl_elim(
                self.eval(env, t.motive), self.eval(env, t.zero), self.eval(env, t.succ), self.eval(env, t.scrut)
            )
        if isinstance(t, core.Coerce):
            return self.coerce_value(t.witness, env, self.eval(env, t.term))
        raise KernelBug(f"cannot evaluate {type(t).__name__}")

    def eval_prim(self, env: Env, t: core.LtPrim) -> VLtTok:
        """Every order lemma evaluates to a token for the proposition it proves."""
        if len(t.args) != t.prim.arity:
            raise KernelBug(f"{t.prim.value} applied to {len(t.args)} arguments")
        if t.prim is core.PrimId.LT_DEC:
            return VLtTok(self.level(env, t.args[0]), self.level(env, t.args[1]))
        if t.prim is core.PrimId.LT_FIN_OMEGA:
            return VLtTok(self.fin_to_lvl(self.eval(env, t.args[0])), LClosed(self.structure.omega()))
        if t.prim is core.PrimId.LT_SUC_SELF:
            arg = self.eval(env, t.args[0])
            if self.structure.saturating:
                lo = self.fin_to_lvl(arg)
            else:
                lo = self.as_level(arg)
            return VLtTok(lo, self.lsuc(lo))
        # ltTrans i j k (q : j < k) (p : i < j) : i < k
        return VLtTok(self.level(env, t.args[0]), self.level(env, t.args[2]))

    def instantiate(self, closure: AnyClosure, arg: Value) -> Value:
        if isinstance(closure, Closure):
            return self.eval(closure.env + (arg,), closure.body)
        if isinstance(closure, HostClosure):
            return closure.fn(arg)
        return self.lift_value(closure.src, closure.tgt, self.instantiate(closure.inner, arg))

    def vapp(self, fn: Value, arg: Value) -> Value:
        if isinstance(fn, VLam):
            return self.instantiate(fn.closure, arg)
        if isinstance(fn, VNeutral):
            return VNeutral(fn.neutral.push(EApp(arg)))
        if isinstance(fn, VCoercedFn):
            inner_arg = self.coerce_value(fn.witness.dom, fn.env, arg)
            return self.coerce_value(fn.witness.cod, fn.env + (arg,), self.vapp(fn.fn, inner_arg))
        raise KernelBug(f"cannot apply {type(fn).__name__}")

    def v_if(self, motive: Value, scrut: Value, then: Value, else_: Value) -> Value:
        if isinstance(scrut, VTrue):
            return then
        if isinstance(scrut, VFalse):
            return else_
        if isinstance(scrut, VNeutral):
            return VNeutral(scrut.neutral.push(EIf(motive, then, else_)))
        raise KernelBug(f"if on {type(scrut).__name__}")

    def v_nat_elim(self, motive: Value, zero: Value, succ: Value, scrut: Value) -> Value:
        layers = 0
        base = scrut
        while isinstance(base, VSuc):
            base = base.pred
            layers += 1
        if isinstance(base, VZero):
            result = zero
        elif isinstance(base, VNeutral):
            result = VNeutral(base.neutral.push(ENatElim(motive, zero, succ)))
        else:
            raise KernelBug(f"natElim on {type(base).__name__}")
        current = base
        for _ in range(layers):
            result = self.vapp(self.vapp(succ, current), result)
            current = VSuc(current)
        return result

    def v_lvl_elim(self, motive: Value, zero: Value, succ: Value, scrut: Value) -> Value:
        lv = self.as_level(scrut)
        if isinstance(lv, LClosed):
            if not lv.level.is_finite:
                raise KernelBug("lvlElim on a transfinite level")
            result = zero
            for k in range(lv.level.offset):
                result = self.vapp(self.vapp(succ, VLvl(LClosed(self.structure.fin(k)))), result)
            return result
        if isinstance(lv, LSupNode):
            return VNeutral(Neutral(NSup(lv), (ELvlElim(motive, zero, succ),)))
        result = VNeutral(lv.base.push(ELvlElim(motive, zero, succ)))
        current: LevelValue = LNeutral(lv.base, 0)
        for _ in range(lv.succs):
            result = self.vapp(self.vapp(succ, self.from_level(current)), result)
            current = self.lsuc(current)
        return result

    # Lifting and coercion

    def lift_value(self, src: LevelValue, tgt: LevelValue, ty: Value) -> Value:
        """
        Push ``Lift`` from ``src`` to ``tgt`` through a type value.

        Universes and base types are fixed points; Π lifts componentwise;
        neutral types get stuck, and a stuck lift re-targets instead of nesting.

        Args:
            src: Level the type currently lives at
            tgt: Level to lift to
            ty: A type value

        Returns:
            The lifted type value
        """
        if isinstance(ty, (VUniv, VLtTy) + _BASE_TYPES):
            return ty
        if isinstance(ty, VPi):
            return VPi(ty.name, self.lift_value(src, tgt, ty.dom), self._lift_closure(ty.cod, src, tgt))
        if isinstance(ty, VNeutral):
            return VLiftStuck(src, tgt, ty.neutral)
        if isinstance(ty, VLiftStuck):
            return VLiftStuck(ty.src, tgt, ty.neutral)
        raise KernelBug(f"cannot lift {type(ty).__name__}")

    @staticmethod
    def _lift_closure(closure: AnyClosure, src: LevelValue, tgt: LevelValue) -> LiftedClosure:
        if isinstance(closure, LiftedClosure):
            return LiftedClosure(closure.inner, closure.src, tgt)
        return LiftedClosure(closure, src, tgt)

    def coerce_value(self, witness: core.Coercion, env: Env, v: Value) -> Value:
        if isinstance(witness, core.CoRefl):
            return v
        if isinstance(witness, core.CoULe):
            return self.lift_value(self.level(env, witness.src), self.level(env, witness.tgt), v)
        if isinstance(witness, core.CoPiLe):
            return VCoercedFn(witness, env, v)
        raise KernelBug(f"unknown coercion {type(witness).__name__}")

    # Readback

    def quote(self, depth: int, v: Value) -> core.Term:
        """
        Read a value back as a beta-normal core term.

        Args:
            depth: Number of binders in scope
            v: The value to read back

        Returns:
            A core term whose evaluation is convertible with ``v``
        """
        if isinstance(v, VLam):
            return core.Lam(v.name, self.quote(depth + 1, self.instantiate(v.closure, fresh_var(depth))))
        if isinstance(v, VCoercedFn):
            return core.Lam("x", self.quote(depth + 1, self.vapp(v, fresh_var(depth))))
        if isinstance(v, VPi):
            var = fresh_var(depth, v.dom)
            return core.Pi(v.name, self.quote(depth, v.dom), self.quote(depth + 1, self.instantiate(v.cod, var)))
        if isinstance(v, VSuc):
            layers = 0
            while isinstance(v, VSuc):
                v = v.pred
                layers += 1
            term = self.quote(depth, v)
            for _ in range(layers):
                term = core.Suc(term)
            return term
        simple = _SIMPLE_QUOTES.get(type(v))
        if simple is not None:
            return simple
        if isinstance(v, VUniv):
            lo, hi = self.quote_level(depth, v.lo), self.quote_level(depth, v.hi)
            return core.Univ(lo, hi, core.LtPrim(core.PrimId.LT_DEC, (lo, hi)))
        if isinstance(v, VLvl):
            return self.quote_level(depth, v.level)
        if isinstance(v, VLtTy):
            return core.LtTy(self.quote_level(depth, v.lo), self.quote_level(depth, v.hi))
        if isinstance(v, VLtTok):
            return core.LtPrim(core.PrimId.LT_DEC, (self.quote_level(depth, v.lo), self.quote_level(depth, v.hi)))
        if isinstance(v, VLiftStuck):
            src, tgt = self.quote_level(depth, v.src), self.quote_level(depth, v.tgt)
            proof = core.LtPrim(core.PrimId.LT_DEC, (src, tgt))
            return core.LiftTy(proof, self.quote_neutral(depth, v.neutral), src, tgt)
        if isinstance(v, VNeutral):
            return self.quote_neutral(depth, v.neutral)
        raise KernelBug(f"cannot quote {type(v).__name__}")

    def quote_level(self, depth: int, lv: LevelValue) -> core.Term:
        if isinstance(lv, LClosed):
            return to_internal_nf(lv.level)
        if isinstance(lv, LNeutral):
            term = self.quote_neutral(depth, lv.base)
            for _ in range(lv.succs):
                term = core.LSuc(term)
            return term
        terms = sorted((self.quote_level(depth, op) for op in lv.operands), key=core.sort_key)
        result = terms[0]
        for term in terms[1:]:
            result = core.LSup(result, term)
        return result

    def quote_neutral(self, depth: int, n: Neutral) -> core.Term:
        if isinstance(n.head, NVar):
            term = core.Var(depth - 1 - n.head.level)
        else:
            term = self.quote_level(depth, n.head.sup)
        for frame in n.spine:
            if isinstance(frame, EApp):
                term = core.App(term, self.quote(depth, frame.arg))
            elif isinstance(frame, EIf):
                term = core.If(
                    self.quote(depth, frame.motive), term, self.quote(depth, frame.then), self.quote(depth, frame.else_)
                )
            elif isinstance(frame, ENatElim):
                term = core.NatElim(
                    self.quote(depth, frame.motive), self.quote(depth, frame.zero), self.quote(depth, frame.succ), term
                )
            elif isinstance(frame, EExfalso):
                term = core.Exfalso(self.quote(depth, frame.ty), term)
            else:
                term = core.LvlElim(
                    self.quote(depth, frame.motive), self.quote(depth, frame.zero), self.quote(depth, frame.succ), term
                )
        return term

    def normalize(self, env: Env, t: core.Term) -> core.Term:
        return self.quote(len(env), self.eval(env, t))

    # Conversion

    def conv(self, depth: int, a: Value, b: Value, ty: Value) -> bool:
        """
        Type-directed definitional equality of two values of type ``ty``.

        Args:
            depth: Number of binders in scope
            a: Left value
            b: Right value
            ty: Their common type

        Returns:
            True when ``a`` and ``b`` are convertible
        """
        if isinstance(ty, VPi):
            var = fresh_var(depth, ty.dom)
            return self.conv(depth + 1, self.vapp(a, var), self.vapp(b, var), self.instantiate(ty.cod, var))
        if isinstance(ty, (VUnitTy, VLtTy)):
            return True
        if isinstance(ty, VLvlTy):
            return self.conv_level(depth, self.as_level(a), self.as_level(b))
        if isinstance(ty, VUniv):
            return self.conv_type(depth, a, b)
        return self.conv_untyped(depth, a, b)

    def conv_type(self, depth: int, a: Value, b: Value, cumulative: bool = False) -> bool:
        """
        Equality of type values.

        With ``cumulative`` set, stuck lifts are transparent: ``Lift p A`` and
        ``A`` have the same elements.
        """
        if cumulative:
            if isinstance(a, VLiftStuck):
                a = VNeutral(a.neutral)
            if isinstance(b, VLiftStuck):
                b = VNeutral(b.neutral)
        if isinstance(a, VPi) and isinstance(b, VPi):
            if not self.conv_type(depth, a.dom, b.dom, cumulative):
                return False
            var = fresh_var(depth, a.dom)
            return self.conv_type(
                depth + 1, self.instantiate(a.cod, var), self.instantiate(b.cod, var), cumulative
            )
        if isinstance(a, VUniv) and isinstance(b, VUniv):
            return self.conv_level(depth, a.lo, b.lo)
        if isinstance(a, VLtTy) and isinstance(b, VLtTy):
            return self.conv_level(depth, a.lo, b.lo) and self.conv_level(depth, a.hi, b.hi)
        if isinstance(a, _BASE_TYPES):
            return type(a) is type(b)
        if isinstance(a, VLiftStuck) and isinstance(b, VLiftStuck):
            return self.conv_level(depth, a.tgt, b.tgt) and self.conv_neutral(depth, a.neutral, b.neutral)
        if isinstance(a, VNeutral) and isinstance(b, VNeutral):
            return self.conv_neutral(depth, a.neutral, b.neutral)
        return False

    def conv_untyped(self, depth: int, a: Value, b: Value) -> bool:
        """Structural equality used inside neutral spines, where types are unknown."""
        if is_irrelevant(a) or is_irrelevant(b):
            return True
        if isinstance(a, (VLam, VCoercedFn)) or isinstance(b, (VLam, VCoercedFn)):
            var = fresh_var(depth)
            return self.conv_untyped(depth + 1, self.vapp(a, var), self.vapp(b, var))
        if isinstance(a, VLvl) or isinstance(b, VLvl):
            if not isinstance(a, (VLvl, VNeutral)) or not isinstance(b, (VLvl, VNeutral)):
                return False
            return self.conv_level(depth, self.as_level(a), self.as_level(b))
        if isinstance(a, VSuc) and isinstance(b, VSuc):
            while isinstance(a, VSuc) and isinstance(b, VSuc):
                a, b = a.pred, b.pred
            return self.conv_untyped(depth, a, b)
        if isinstance(a, (VTrue, VFalse, VZero, VTt)):
            return type(a) is type(b)
        if isinstance(a, VTt) or isinstance(b, VTt):
            return True
        if isinstance(a, VNeutral) and isinstance(b, VNeutral):
            return self.conv_neutral(depth, a.neutral, b.neutral)
        return self.conv_type(depth, a, b)

    def conv_neutral(self, depth: int, a: Neutral, b: Neutral) -> bool:
        if isinstance(a.head, NVar) and isinstance(b.head, NVar):
            if a.head.level != b.head.level:
                return False
        elif isinstance(a.head, NSup) and isinstance(b.head, NSup):
            if not self.conv_level(depth, a.head.sup, b.head.sup):
                return False
        else:
            return False
        if len(a.spine) != len(b.spine):
            return False
        for fa, fb in zip(a.spine, b.spine):
            if type(fa) is not type(fb):
                return False
            if isinstance(fa, EExfalso):
                if not self.conv_type(depth, fa.ty, fb.ty):
                    return False
                continue
            for name in _FRAME_FIELDS[type(fa)]:
                if not self.conv_untyped(depth, getattr(fa, name), getattr(fb, name)):
                    return False
        return True

    def conv_level(self, depth: int, a: LevelValue, b: LevelValue) -> bool:
        """Equality of normalised levels; suprema compare as operand sets."""
        if isinstance(a, LClosed) and isinstance(b, LClosed):
            return a.level == b.level
        if isinstance(a, LNeutral) and isinstance(b, LNeutral):
            return a.succs == b.succs and self.conv_neutral(depth, a.base, b.base)
        if isinstance(a, LSupNode) and isinstance(b, LSupNode):
            return self._operands_within(depth, a.operands, b.operands) and self._operands_within(
                depth, b.operands, a.operands
            )
        return False

    def _operands_within(self, depth: int, xs: Sequence[LevelValue], ys: Sequence[LevelValue]) -> bool:
        return all(any(self.conv_level(depth, x, y) for y in ys) for x in xs)

    def level_mentions(self, depth: int, lv: LevelValue, var_level: int) -> bool:
        """True when the variable at de Bruijn level ``var_level`` occurs in ``lv``."""
        if var_level >= depth:
            return False
        return core.free_in(self.quote_level(depth, lv), depth - 1 - var_level)


_SIMPLE_QUOTES = {
    VBoolTy: core.BoolTy(),
    VTrue: core.TrueTm(),
    VFalse: core.FalseTm(),
    VNatTy: core.NatTy(),
    VZero: core.Zero(),
    VEmptyTy: core.EmptyTy(),
    VUnitTy: core.UnitTy(),
    VTt: core.Tt(),
    VLvlTy: core.LvlTy(),
}

_FRAME_FIELDS = {
    EApp: ("arg",),
    EIf: ("motive", "then", "else_"),
    ENatElim: ("motive", "zero", "succ"),
    ELvlElim: ("motive", "zero", "succ"),
}


def normalizer_for(structure_id: StructureId) -> Normalizer:
    return Normalizer(get_structure(structure_id))
