"""Services package."""
from .checker import CheckerService, CheckResult, CorpusEntry, CorpusReport, SourceError, read_header
from .diagnostics import Diagnostic, from_error

__all__ = [
    "CheckerService",
    "CheckResult",
    "CorpusEntry",
    "CorpusReport",
    "SourceError",
    "read_header",
    "Diagnostic",
    "from_error",
]
