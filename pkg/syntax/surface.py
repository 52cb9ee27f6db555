"""Surface syntax: named terms with spans, a tokenizer and a recursive-descent parser.

Grammar (whitespace-insensitive, ``--`` starts a line comment)::

    module  := (decl ";")*
    decl    := IDENT (":" term)? "=" term
    term    := "\\" IDENT+ "." term
             | "let" IDENT (":" term)? "=" term "in" term
             | ("(" IDENT+ ":" term ")")+ "->" term
             | app ("->" term)?
    app     := head atom*
    head    := BUILTIN atom{min..max} | atom
    atom    := IDENT | NUMBER | "(" term (":" term)? ")" | nullary BUILTIN

A builtin at the head of an application takes as many arguments as it can,
up to its largest arity; in argument position only nullary builtins stand
alone.
"""
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple


@dataclass(frozen=True)
class Span:
    """Character offsets ``[start, end)`` into the source text; ``byte_span`` gives UTF-8 byte offsets."""

    start: int
    end: int

    def join(self, other: "Span") -> "Span":
        return Span(min(self.start, other.start), max(self.end, other.end))


NO_SPAN = Span(0, 0)


class SourceTerm:
    """Base class of surface nodes; every node has a ``span`` ignored by equality."""

    __slots__ = ()
    kind = "term"


@dataclass(frozen=True)
class SVar(SourceTerm):
    name: str
    span: Span = field(default=NO_SPAN, compare=False)
    kind = "var"


@dataclass(frozen=True)
class SLam(SourceTerm):
    name: str
    body: SourceTerm
    span: Span = field(default=NO_SPAN, compare=False)
    kind = "lambda"


@dataclass(frozen=True)
class SApp(SourceTerm):
    fn: SourceTerm
    arg: SourceTerm
    span: Span = field(default=NO_SPAN, compare=False)
    kind = "app"


@dataclass(frozen=True)
class SPi(SourceTerm):
    """``name`` is ``_`` for the non-dependent arrow."""

    name: str
    dom: SourceTerm
    cod: SourceTerm
    span: Span = field(default=NO_SPAN, compare=False)
    kind = "pi"


@dataclass(frozen=True)
class SLet(SourceTerm):
    name: str
    ty: Optional[SourceTerm]
    defn: SourceTerm
    body: SourceTerm
    span: Span = field(default=NO_SPAN, compare=False)
    kind = "let"


@dataclass(frozen=True)
class SUniv(SourceTerm):
    lo: SourceTerm
    hi: SourceTerm
    proof: Optional[SourceTerm]
    span: Span = field(default=NO_SPAN, compare=False)
    kind = "universe"


@dataclass(frozen=True)
class SLift(SourceTerm):
    proof: SourceTerm
    ty: SourceTerm
    span: Span = field(default=NO_SPAN, compare=False)
    kind = "lift"


@dataclass(frozen=True)
class SCoerce(SourceTerm):
    target: SourceTerm
    term: SourceTerm
    span: Span = field(default=NO_SPAN, compare=False)
    kind = "coerce"


@dataclass(frozen=True)
class SLit(SourceTerm):
    value: int
    span: Span = field(default=NO_SPAN, compare=False)
    kind = "literal"


@dataclass(frozen=True)
class SBuiltin(SourceTerm):
    name: str
    args: Tuple[SourceTerm, ...] = ()
    span: Span = field(default=NO_SPAN, compare=False)
    kind = "builtin-apply"


@dataclass(frozen=True)
class SAnn(SourceTerm):
    term: SourceTerm
    ty: SourceTerm
    span: Span = field(default=NO_SPAN, compare=False)
    kind = "annotation"


@dataclass(frozen=True)
class Decl:
    name: str
    ty: Optional[SourceTerm]
    body: SourceTerm
    span: Span = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class Module:
    decls: Tuple[Decl, ...] = ()

    def names(self) -> List[str]:
        return [decl.name for decl in self.decls]


# name -> (min arity, max arity)
BUILTIN_ARITY: Dict[str, Tuple[int, int]] = {
    "U": (2, 3),
    "Lift": (2, 2),
    "coerce": (2, 2),
    "Bool": (0, 0),
    "true": (0, 0),
    "false": (0, 0),
    "if": (3, 4),
    "Nat": (0, 0),
    "zero": (0, 0),
    "suc": (1, 1),
    "natElim": (3, 4),
    "Empty": (0, 0),
    "exfalso": (1, 2),
    "Unit": (0, 0),
    "tt": (0, 0),
    "Lvl": (0, 0),
    "Lt": (2, 2),
    "lzero": (0, 0),
    "lsuc": (1, 1),
    "lomega": (0, 0),
    "ltDec": (2, 2),
    "ltFinOmega": (1, 1),
    "ltSucSelf": (1, 1),
    "ltTrans": (5, 5),
    "lsup": (2, 2),
    "lvlElim": (3, 4),
}

KEYWORDS = frozenset({"let", "in"}) | frozenset(BUILTIN_ARITY)


class ParseError(Exception):
    """
    Syntax error with the offending span and the tokens that would have fit.

    Attributes:
        span: Location of the unexpected token
        expected: Sorted descriptions of acceptable tokens
        message: Human-readable summary
    """

    def __init__(self, span: Span, expected: Tuple[str, ...], message: str):
        super().__init__(message)
        self.span = span
        self.expected = tuple(sorted(set(expected)))
        self.message = message


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "number", "eof", or the literal text of a symbol or keyword
    text: str
    span: Span


_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<comment>--[^\n]*)"
    r"|(?P<arrow>->)"
    r"|(?P<number>[0-9]+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<symbol>[\\.():;=])"
)


def tokenize(text: str) -> List[Token]:
    """
    Split source text into tokens, dropping whitespace and comments.

    Raises:
        ParseError: On a character that starts no token
    """
    tokens: List[Token] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            span = Span(pos, pos + 1)
            raise ParseError(span, ("token",), f"unexpected character {text[pos]!r}")
        group = match.lastgroup
        value = match.group()
        span = Span(pos, match.end())
        pos = match.end()
        if group in ("ws", "comment"):
            continue
        if group == "ident":
            tokens.append(Token(value if value in KEYWORDS else "ident", value, span))
        elif group == "number":
            tokens.append(Token("number", value, span))
        else:
            tokens.append(Token(value, value, span))
    tokens.append(Token("eof", "", Span(len(text), len(text))))
    return tokens


def _describe(kind: str) -> str:
    if kind in ("ident", "number"):
        return "identifier" if kind == "ident" else "number"
    if kind == "eof":
        return "end of input"
    return f"'{kind}'"


_ATOM_EXPECTED = ("identifier", "number", "'('", "builtin")


class Parser:
    """Recursive-descent parser over a token list."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0

    # Token helpers

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        index = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[index]

    def advance(self) -> Token:
        token = self.current
        if token.kind != "eof":
            self.pos += 1
        return token

    def error(self, expected: Tuple[str, ...]) -> ParseError:
        token = self.current
        found = "end of input" if token.kind == "eof" else repr(token.text)
        wanted = ", ".join(sorted(set(expected)))
        return ParseError(token.span, expected, f"expected {wanted}, found {found}")

    def expect(self, kind: str) -> Token:
        if self.current.kind != kind:
            raise self.error((_describe(kind),))
        return self.advance()

    def at_atom_start(self) -> bool:
        kind = self.current.kind
        return kind in ("ident", "number", "(") or kind in BUILTIN_ARITY

    # Grammar

    def parse_module(self) -> Module:
        decls: List[Decl] = []
        seen: Dict[str, Span] = {}
        while self.current.kind != "eof":
            decl = self.parse_decl()
            if decl.name in seen:
                raise ParseError(decl.span, ("identifier",), f"duplicate declaration '{decl.name}'")
            seen[decl.name] = decl.span
            decls.append(decl)
        return Module(tuple(decls))

    def parse_decl(self) -> Decl:
        name = self.expect("ident")
        ty = None
        if self.current.kind == ":":
            self.advance()
            ty = self.parse_term()
        self.expect("=")
        body = self.parse_term()
        end = self.expect(";")
        return Decl(name.text, ty, body, name.span.join(end.span))

    def parse_term(self) -> SourceTerm:
        start = self.current.span
        if self.current.kind == "\\":
            return self.parse_lambda()
        if self.current.kind == "let":
            return self.parse_let()
        if self.current.kind == "(" and self._binder_group_ahead():
            saved = self.pos
            groups = self.parse_binder_groups()
            if self.current.kind == "->":
                self.advance()
                cod = self.parse_term()
                for names, dom in reversed(groups):
                    for name in reversed(names):
                        cod = SPi(name, dom, cod, start.join(cod.span))
                return cod
            self.pos = saved
        lhs = self.parse_app()
        if self.current.kind == "->":
            self.advance()
            cod = self.parse_term()
            return SPi("_", lhs, cod, lhs.span.join(cod.span))
        return lhs

    def _binder_group_ahead(self) -> bool:
        offset = 1
        if self.peek(offset).kind != "ident":
            return False
        while self.peek(offset).kind == "ident":
            offset += 1
        return self.peek(offset).kind == ":"

    def parse_binder_groups(self) -> List[Tuple[List[str], SourceTerm]]:
        groups = []
        while self.current.kind == "(" and self._binder_group_ahead():
            self.advance()
            names = []
            while self.current.kind == "ident":
                names.append(self.advance().text)
            self.expect(":")
            dom = self.parse_term()
            self.expect(")")
            groups.append((names, dom))
        return groups

    def parse_lambda(self) -> SourceTerm:
        start = self.advance().span
        names = [self.expect("ident").text]
        while self.current.kind == "ident":
            names.append(self.advance().text)
        self.expect(".")
        body = self.parse_term()
        for name in reversed(names):
            body = SLam(name, body, start.join(body.span))
        return body

    def parse_let(self) -> SourceTerm:
        start = self.advance().span
        name = self.expect("ident").text
        ty = None
        if self.current.kind == ":":
            self.advance()
            ty = self.parse_term()
        self.expect("=")
        defn = self.parse_term()
        self.expect("in")
        body = self.parse_term()
        return SLet(name, ty, defn, body, start.join(body.span))

    def parse_app(self) -> SourceTerm:
        if self.current.kind in BUILTIN_ARITY:
            term = self.parse_builtin_head()
        else:
            term = self.parse_atom()
        while self.at_atom_start():
            arg = self.parse_atom()
            term = SApp(term, arg, term.span.join(arg.span))
        return term

    def parse_builtin_head(self) -> SourceTerm:
        token = self.advance()
        low, high = BUILTIN_ARITY[token.text]
        args: List[SourceTerm] = []
        while len(args) < high and self.at_atom_start():
            args.append(self.parse_atom())
        if len(args) < low:
            raise self.error(_ATOM_EXPECTED)
        span = token.span.join(args[-1].span) if args else token.span
        return _make_builtin(token.text, args, span)

    def parse_atom(self) -> SourceTerm:
        token = self.current
        if token.kind == "ident":
            self.advance()
            return SVar(token.text, token.span)
        if token.kind == "number":
            self.advance()
            return SLit(int(token.text), token.span)
        if token.kind in BUILTIN_ARITY:
            if BUILTIN_ARITY[token.kind][0] > 0:
                raise ParseError(token.span, ("'('",), f"'{token.text}' takes arguments; parenthesise it")
            self.advance()
            return SBuiltin(token.text, (), token.span)
        if token.kind == "(":
            self.advance()
            inner = self.parse_term()
            if self.current.kind == ":":
                self.advance()
                ty = self.parse_term()
                end = self.expect(")")
                return SAnn(inner, ty, token.span.join(end.span))
            self.expect(")")
            return inner
        raise self.error(_ATOM_EXPECTED)


def _make_builtin(name: str, args: List[SourceTerm], span: Span) -> SourceTerm:
    if name == "U":
        return SUniv(args[0], args[1], args[2] if len(args) > 2 else None, span)
    if name == "Lift":
        return SLift(args[0], args[1], span)
    if name == "coerce":
        return SCoerce(args[0], args[1], span)
    return SBuiltin(name, tuple(args), span)


def parse(text: str) -> Module:
    """
    Parse a whole source file.

    Args:
        text: Source text

    Returns:
        The parsed module

    Raises:
        ParseError: On the first syntax error
    """
    try:
        return Parser(text).parse_module()
    except RecursionError:
        raise ParseError(Span(0, min(len(text), 1)), (), "input nested too deeply") from None


def parse_term(text: str) -> SourceTerm:
    """Parse a single term spanning the whole input."""
    try:
        parser = Parser(text)
        term = parser.parse_term()
        parser.expect("eof")
        return term
    except RecursionError:
        raise ParseError(Span(0, min(len(text), 1)), (), "input nested too deeply") from None


def line_col(text: str, offset: int) -> Tuple[int, int]:
    """One-based line and column of a character offset."""
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def byte_span(text: str, span: Span) -> Span:
    """The same span measured in UTF-8 bytes."""
    start = len(text[: span.start].encode("utf-8"))
    return Span(start, start + len(text[span.start : span.end].encode("utf-8")))
