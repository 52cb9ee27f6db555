"""Surface syntax: parsing and printing."""
from .surface import Module, ParseError, Span, byte_span, line_col, parse, parse_term
from .printer import pretty_print

__all__ = ["Module", "ParseError", "Span", "byte_span", "line_col", "parse", "parse_term", "pretty_print"]
