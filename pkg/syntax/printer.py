"""Pretty printing of surface terms, modules and core terms.

Core terms are first translated back to surface syntax, inventing binder
names where the recorded hint is missing or already taken, and then printed
by the same code as parsed terms. The output always re-parses.
"""
from typing import List, Optional, Sequence, Union

from kernel import core
from syntax.surface import (
    KEYWORDS,
    Module,
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
)

_FRESH_BASES = ("x", "y", "z", "w", "u", "v")


def fresh_name(hint: str, used: Sequence[str]) -> str:
    """
    Pick a binder name that does not capture anything in ``used``.

    Args:
        hint: Name recorded at elaboration time; ``_`` means none
        used: Names already in scope

    Returns:
        ``hint`` when it is usable, else the first free name of ``x, y, z, w, u, v, x1, ...``
    """
    taken = set(used)
    if hint and hint != "_" and hint not in KEYWORDS and hint not in taken:
        return hint
    suffix = 0
    while True:
        for base in _FRESH_BASES:
            candidate = base if suffix == 0 else f"{base}{suffix}"
            if candidate not in taken:
                return candidate
        suffix += 1


class _CoreReader:
    """Translate core terms to surface terms under a stack of names."""

    def __init__(self, names: Sequence[str]):
        self.names: List[str] = list(names)

    def var(self, ix: int) -> SourceTerm:
        if 0 <= ix < len(self.names):
            return SVar(self.names[len(self.names) - 1 - ix])
        return SVar(f"#{ix}")

    def under(self, hint: str, body: core.Term):
        name = fresh_name(hint, self.names)
        self.names.append(name)
        try:
            return name, self.read(body)
        finally:
            self.names.pop()

    def read(self, t: core.Term) -> SourceTerm:
        if isinstance(t, core.Var):
            return self.var(t.ix)
        if isinstance(t, core.Lam):
            name, body = self.under(t.name, t.body)
            return SLam(name, body)
        if isinstance(t, core.Pi):
            dom = self.read(t.dom)
            if core.free_in(t.cod, 0):
                name, cod = self.under(t.name, t.cod)
                return SPi(name, dom, cod)
            _, cod = self.under("_", t.cod)
            return SPi("_", dom, cod)
        if isinstance(t, core.App):
            return SApp(self.read(t.fn), self.read(t.arg))
        if isinstance(t, core.Let):
            ty, defn = self.read(t.ty), self.read(t.defn)
            name, body = self.under(t.name, t.body)
            return SLet(name, ty, defn, body)
        if isinstance(t, (core.Zero, core.Suc)):
            return self.read_nat(t)
        if isinstance(t, (core.LZero, core.LSuc, core.LOmega)):
            return self.read_level(t)
        nullary = _NULLARY.get(type(t))
        if nullary is not None:
            return SBuiltin(nullary)
        if isinstance(t, core.If):
            return SBuiltin("if", self.read_all(t.motive, t.scrut, t.then, t.else_))
        if isinstance(t, core.NatElim):
            return SBuiltin("natElim", self.read_all(t.motive, t.zero, t.succ, t.scrut))
        if isinstance(t, core.LvlElim):
            return SBuiltin("lvlElim", self.read_all(t.motive, t.zero, t.succ, t.scrut))
        if isinstance(t, core.Exfalso):
            return SBuiltin("exfalso", self.read_all(t.ty, t.scrut))
        if isinstance(t, core.Univ):
            lo, hi = self.read(t.lo), self.read(t.hi)
            implicit = (
                isinstance(t.proof, core.LtPrim)
                and t.proof.prim is core.PrimId.LT_DEC
                and t.proof.args == (t.lo, t.hi)
                and core.is_level_literal(t.lo)
                and core.is_level_literal(t.hi)
            )
            return SUniv(lo, hi, None if implicit else self.read(t.proof))
        if isinstance(t, core.LiftTy):
            return SLift(self.read(t.proof), self.read(t.ty))
        if isinstance(t, core.LSup):
            return SBuiltin("lsup", self.read_all(t.left, t.right))
        if isinstance(t, core.LtTy):
            return SBuiltin("Lt", self.read_all(t.lo, t.hi))
        if isinstance(t, core.LtPrim):
            return SBuiltin(t.prim.value, self.read_all(*t.args))
        if isinstance(t, core.Coerce):
            return SCoerce(self.read(t.target), SAnn(self.read(t.term), self.read(t.source)))
        raise TypeError(f"cannot print {type(t).__name__}")

    def read_all(self, *terms: core.Term):
        return tuple(self.read(term) for term in terms)

    def read_nat(self, t: core.Term) -> SourceTerm:
        layers = []
        while isinstance(t, core.Suc):
            layers.append(t)
            t = t.pred
        term = SBuiltin("zero") if isinstance(t, core.Zero) else self.read(t)
        for _ in layers:
            term = SBuiltin("suc", (term,))
        return term

    def read_level(self, t: core.Term) -> SourceTerm:
        succs = 0
        base = t
        while isinstance(base, core.LSuc):
            base = base.pred
            succs += 1
        if isinstance(base, core.LZero):
            return SLit(succs)
        term = SBuiltin("lomega") if isinstance(base, core.LOmega) else self.read(base)
        for _ in range(succs):
            term = SBuiltin("lsuc", (term,))
        return term


_NULLARY = {
    core.BoolTy: "Bool",
    core.TrueTm: "true",
    core.FalseTm: "false",
    core.NatTy: "Nat",
    core.EmptyTy: "Empty",
    core.UnitTy: "Unit",
    core.Tt: "tt",
    core.LvlTy: "Lvl",
}


def core_to_source(t: core.Term, names: Sequence[str] = ()) -> SourceTerm:
    """
    Translate a core term to surface syntax.

    Args:
        t: Core term
        names: Names of the enclosing context, outermost first

    Returns:
        A surface term that elaborates back to ``t`` in that context
    """
    return _CoreReader(names).read(t)


# Surface printing

def _term(s: SourceTerm) -> str:
    if isinstance(s, SLam):
        return f"\\{s.name}. {_term(s.body)}"
    if isinstance(s, SLet):
        annotation = f" : {_term(s.ty)}" if s.ty is not None else ""
        return f"let {s.name}{annotation} = {_term(s.defn)} in {_term(s.body)}"
    if isinstance(s, SPi):
        if s.name == "_":
            return f"{_app(s.dom)} -> {_term(s.cod)}"
        return f"({s.name} : {_term(s.dom)}) -> {_term(s.cod)}"
    return _app(s)


def _app(s: SourceTerm) -> str:
    if isinstance(s, SApp):
        return f"{_head(s.fn)} {_atom(s.arg)}"
    if isinstance(s, SBuiltin) and s.args:
        return " ".join([s.name] + [_atom(arg) for arg in s.args])
    if isinstance(s, SUniv):
        parts = ["U", _atom(s.lo), _atom(s.hi)]
        if s.proof is not None:
            parts.append(_atom(s.proof))
        return " ".join(parts)
    if isinstance(s, SLift):
        return f"Lift {_atom(s.proof)} {_atom(s.ty)}"
    if isinstance(s, SCoerce):
        return f"coerce {_atom(s.target)} {_atom(s.term)}"
    return _atom(s)


def _head(s: SourceTerm) -> str:
    # A builtin head would swallow the following arguments.
    if isinstance(s, SApp):
        return _app(s)
    return _atom(s)


def _atom(s: SourceTerm) -> str:
    if isinstance(s, SVar):
        return s.name
    if isinstance(s, SLit):
        return str(s.value)
    if isinstance(s, SBuiltin) and not s.args:
        return s.name
    if isinstance(s, SAnn):
        return f"({_term(s.term)} : {_term(s.ty)})"
    return f"({_term(s)})"


def print_module(module: Module) -> str:
    lines = []
    for decl in module.decls:
        if decl.ty is not None:
            lines.append(f"{decl.name} : {_term(decl.ty)} = {_term(decl.body)};")
        else:
            lines.append(f"{decl.name} = {_term(decl.body)};")
    return "\n".join(lines) + ("\n" if lines else "")


def pretty_print(t: Union[SourceTerm, core.Term, Module], names: Optional[Sequence[str]] = None) -> str:
    """
    Render a surface term, a core term or a module as re-parseable source.

    Args:
        t: What to print
        names: Context names for the free indices of a core term

    Returns:
        Source text
    """
    if isinstance(t, Module):
        return print_module(t)
    if isinstance(t, core.Term):
        t = core_to_source(t, names or ())
    return _term(t)
