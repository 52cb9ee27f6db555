"""Rendering of elaboration errors for the terminal."""
from dataclasses import dataclass
from typing import Optional, Tuple

from kernel.elab import ElabError
from syntax.surface import Span, byte_span, line_col


@dataclass(frozen=True)
class Diagnostic:
    """
    A located error ready for printing.

    Attributes:
        path: File the error belongs to
        line: 1-based line of the error start
        column: 1-based column of the error start
        kind: Error kind name, e.g. ``LEVEL_ORDER``
        message: Human-readable description
        excerpt: The source line the error starts on
        width: Number of caret characters under the excerpt
        context: Local context lines, innermost binder last
        offsets: UTF-8 byte offsets of the offending span
    """

    path: str
    line: int
    column: int
    kind: str
    message: str
    excerpt: str = ""
    width: int = 1
    context: Tuple[str, ...] = ()
    offsets: Tuple[int, int] = (0, 0)

    @property
    def headline(self) -> str:
        return f"{self.path}:{self.line}:{self.column}: {self.kind}: {self.message}"

    def render(self) -> str:
        """Headline, source excerpt with a caret marker, then the local context."""
        lines = [self.headline]
        if self.excerpt:
            lines.append(f"    {self.excerpt}")
            lines.append("    " + " " * (self.column - 1) + "^" * max(1, self.width))
        if self.context:
            lines.append("  in context:")
            lines.extend(f"    {entry}" for entry in self.context)
        return "\n".join(lines)


def from_error(path: str, text: str, error: ElabError) -> Diagnostic:
    """
    Locate an elaboration error in its source text.

    Args:
        path: Display name of the source file
        text: Full source text
        error: The error to locate

    Returns:
        Diagnostic with line, column and excerpt filled in
    """
    start = min(error.span.start, len(text))
    line, column = line_col(text, start)
    source_lines = text.splitlines()
    excerpt = source_lines[line - 1] if 0 < line <= len(source_lines) else ""
    room = max(1, len(excerpt) - (column - 1))
    width = min(max(1, error.span.end - error.span.start), room)
    span = byte_span(text, Span(start, min(error.span.end, len(text))))
    return Diagnostic(
        path, line, column, error.kind.value, error.message, excerpt, width, error.context, (span.start, span.end)
    )


def internal_error(path: str, message: str, kind: Optional[str] = None) -> Diagnostic:
    """Diagnostic for failures without a source location (I/O, kernel bugs)."""
    return Diagnostic(path, 1, 1, kind or "INTERNAL", message)
