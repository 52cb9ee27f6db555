"""The elaborated kernel language.

Terms are de Bruijn indexed; binders keep the surface name only as a printing
hint. There is no El/Code node and no term-level lift: a term of ``U i j p``
is used directly as a type, and a term of ``Lift p A`` is a term of ``A``.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Tuple


class Term:
    """Base class of core terms."""

    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    ix: int


@dataclass(frozen=True)
class Lam(Term):
    name: str
    body: Term


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Pi(Term):
    name: str
    dom: Term
    cod: Term


@dataclass(frozen=True)
class Let(Term):
    name: str
    ty: Term
    defn: Term
    body: Term


# Booleans

@dataclass(frozen=True)
class BoolTy(Term):
    pass


@dataclass(frozen=True)
class TrueTm(Term):
    pass


@dataclass(frozen=True)
class FalseTm(Term):
    pass


@dataclass(frozen=True)
class If(Term):
    """Dependent if; ``motive`` is a function out of Bool."""

    motive: Term
    scrut: Term
    then: Term
    else_: Term


# Naturals

@dataclass(frozen=True)
class NatTy(Term):
    pass


@dataclass(frozen=True)
class Zero(Term):
    pass


@dataclass(frozen=True)
class Suc(Term):
    pred: Term


@dataclass(frozen=True)
class NatElim(Term):
    """``succ`` takes the predecessor and the recursive result."""

    motive: Term
    zero: Term
    succ: Term
    scrut: Term


# Empty and unit

@dataclass(frozen=True)
class EmptyTy(Term):
    pass


@dataclass(frozen=True)
class Exfalso(Term):
    ty: Term
    scrut: Term


@dataclass(frozen=True)
class UnitTy(Term):
    pass


@dataclass(frozen=True)
class Tt(Term):
    pass


# Universes and lifting

@dataclass(frozen=True)
class Univ(Term):
    """``U lo hi proof``: the types at level ``lo``, itself a type at ``hi``."""

    lo: Term
    hi: Term
    proof: Term


@dataclass(frozen=True)
class LiftTy(Term):
    """
    ``Lift proof ty`` moves ``ty`` from level ``src`` to level ``tgt``.

    ``src`` and ``tgt`` restate the proposition of ``proof`` so evaluation
    never has to inspect a proof.
    """

    proof: Term
    ty: Term
    src: Term
    tgt: Term


# Levels

@dataclass(frozen=True)
class LvlTy(Term):
    pass


@dataclass(frozen=True)
class LZero(Term):
    pass


@dataclass(frozen=True)
class LSuc(Term):
    pred: Term


@dataclass(frozen=True)
class LOmega(Term):
    pass


@dataclass(frozen=True)
class LSup(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class LtTy(Term):
    lo: Term
    hi: Term


class PrimId(Enum):
    """Order lemmas shipped as constants; the value is the surface name."""

    LT_DEC = "ltDec"
    LT_FIN_OMEGA = "ltFinOmega"
    LT_SUC_SELF = "ltSucSelf"
    LT_TRANS = "ltTrans"

    @property
    def arity(self) -> int:
        return _PRIM_ARITY[self]


_PRIM_ARITY = {
    PrimId.LT_DEC: 2,
    PrimId.LT_FIN_OMEGA: 1,
    PrimId.LT_SUC_SELF: 1,
    PrimId.LT_TRANS: 5,
}


@dataclass(frozen=True)
class LtPrim(Term):
    prim: PrimId
    args: Tuple[Term, ...]


@dataclass(frozen=True)
class LvlElim(Term):
    motive: Term
    zero: Term
    succ: Term
    scrut: Term


# Coercions

class Coercion:
    """Core witness of a subtyping derivation ``A ≤ B``."""

    __slots__ = ()


@dataclass(frozen=True)
class CoRefl(Coercion):
    pass


@dataclass(frozen=True)
class CoULe(Coercion):
    """Universe inclusion from ``U src _`` to ``U tgt _``; acts on codes by lifting."""

    src: Term
    tgt: Term


@dataclass(frozen=True)
class CoPiLe(Coercion):
    """
    Function coercion.

    ``dom`` maps the target domain back to the source domain. ``cod`` lives
    under one extra binder, the argument in the target domain.
    """

    dom: Coercion
    cod: Coercion


@dataclass(frozen=True)
class Coerce(Term):
    witness: Coercion
    term: Term
    source: Term
    target: Term


# ``finToLvl``: the lsuc-iterator from Nat into Lvl.
FIN_TO_LVL: Term = Lam(
    "n",
    NatElim(
        Lam("_", LvlTy()),
        LZero(),
        Lam("_", Lam("r", LSuc(Var(0)))),
        Var(0),
    ),
)


def _coercion_terms(co: Coercion, depth: int) -> Iterator[Tuple[Term, int]]:
    if isinstance(co, CoULe):
        yield co.src, depth
        yield co.tgt, depth
    elif isinstance(co, CoPiLe):
        yield from _coercion_terms(co.dom, depth)
        yield from _coercion_terms(co.cod, depth + 1)


def children(t: Term) -> Iterator[Tuple[Term, int]]:
    """
    Immediate subterms together with the number of binders entered.

    Args:
        t: Any core term

    Returns:
        Iterator of ``(subterm, binders)`` pairs
    """
    if isinstance(t, Lam):
        yield t.body, 1
    elif isinstance(t, Pi):
        yield t.dom, 0
        yield t.cod, 1
    elif isinstance(t, Let):
        yield t.ty, 0
        yield t.defn, 0
        yield t.body, 1
    elif isinstance(t, App):
        yield t.fn, 0
        yield t.arg, 0
    elif isinstance(t, (If, NatElim, LvlElim)):
        for field in _ELIM_FIELDS[type(t)]:
            yield getattr(t, field), 0
    elif isinstance(t, Exfalso):
        yield t.ty, 0
        yield t.scrut, 0
    elif isinstance(t, (Suc, LSuc)):
        yield t.pred, 0
    elif isinstance(t, Univ):
        yield t.lo, 0
        yield t.hi, 0
        yield t.proof, 0
    elif isinstance(t, LiftTy):
        yield t.proof, 0
        yield t.ty, 0
        yield t.src, 0
        yield t.tgt, 0
    elif isinstance(t, (LSup,)):
        yield t.left, 0
        yield t.right, 0
    elif isinstance(t, LtTy):
        yield t.lo, 0
        yield t.hi, 0
    elif isinstance(t, LtPrim):
        for arg in t.args:
            yield arg, 0
    elif isinstance(t, Coerce):
        yield from _coercion_terms(t.witness, 0)
        yield t.term, 0
        yield t.source, 0
        yield t.target, 0


_ELIM_FIELDS = {
    If: ("motive", "scrut", "then", "else_"),
    NatElim: ("motive", "zero", "succ", "scrut"),
    LvlElim: ("motive", "zero", "succ", "scrut"),
}


class ScopeError(ValueError):
    """A de Bruijn index points outside its context."""


def check_scope(t: Term, depth: int) -> None:
    """
    Validate that every index of ``t`` is bound in a context of ``depth`` entries.

    Args:
        t: Term to validate
        depth: Number of entries in the ambient context

    Raises:
        ScopeError: On the first index out of range
    """
    stack = [(t, depth)]
    while stack:
        term, d = stack.pop()
        if isinstance(term, Var):
            if not 0 <= term.ix < d:
                raise ScopeError(f"index {term.ix} out of range in a context of {d}")
            continue
        if isinstance(term, LtPrim) and len(term.args) != term.prim.arity:
            raise ScopeError(f"{term.prim.value} expects {term.prim.arity} arguments")
        for child, binders in children(term):
            stack.append((child, d + binders))


def free_in(t: Term, ix: int) -> bool:
    """True when index ``ix`` (relative to the root of ``t``) occurs in ``t``."""
    stack = [(t, ix)]
    while stack:
        term, target = stack.pop()
        if isinstance(term, Var):
            if term.ix == target:
                return True
            continue
        for child, binders in children(term):
            stack.append((child, target + binders))
    return False


def is_level_literal(t: Term) -> bool:
    """``lsuc`` chains over ``lzero`` or ``lomega``."""
    while isinstance(t, LSuc):
        t = t.pred
    return isinstance(t, (LZero, LOmega))


def sort_key(t: Term) -> Tuple:
    """A total order on terms that ignores binder names."""
    key: list = []
    stack = [t]
    while stack:
        term = stack.pop()
        key.append(type(term).__name__)
        if isinstance(term, Var):
            key.append(term.ix)
        elif isinstance(term, LtPrim):
            key.append(term.prim.value)
        subterms = [child for child, _ in children(term)]
        key.append(len(subterms))
        stack.extend(reversed(subterms))
    return tuple(key)
