"""Checker service: load source files, elaborate them and inspect the results."""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from config.settings import (
    CORPUS_ACCEPT_DIR,
    CORPUS_REJECT_DIR,
    DEFAULT_WORKERS,
    EXPECT_PREFIX,
    LEVELS_PREFIX,
    MAX_SOURCE_BYTES,
    SOURCE_EXTENSION,
)
from kernel import core
from kernel.elab import ElabError, ElaboratedModule, ErrorKind, elab_module, recheck
from kernel.levels import StructureId
from kernel.nbe import KernelBug, VBoolTy, VNatTy
from services.diagnostics import Diagnostic, from_error, internal_error
from syntax.printer import pretty_print
from syntax.surface import ParseError, parse
from utils.performance import PerformanceMonitor, perf_monitor

logger = logging.getLogger("ttfl.checker")


class SourceError(Exception):
    """A source file could not be read; the CLI maps this to a usage exit code."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


@dataclass
class CheckResult:
    """Outcome of checking one source text."""

    path: str
    text: str
    module: Optional[ElaboratedModule] = None
    diagnostic: Optional[Diagnostic] = None

    @property
    def ok(self) -> bool:
        return self.module is not None

    @property
    def kind(self) -> Optional[str]:
        return self.diagnostic.kind if self.diagnostic else None


@dataclass(frozen=True)
class SourceHeader:
    """Directives read from the leading comment lines of a file."""

    expect: Optional[str] = None
    levels: Optional[StructureId] = None


@dataclass
class CorpusEntry:
    path: str
    expectation: str
    structure: StructureId
    outcome: str
    passed: bool


@dataclass
class CorpusReport:
    entries: List[CorpusEntry] = field(default_factory=list)
    canonicity_checked: int = 0
    non_canonical: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.entries) and all(entry.passed for entry in self.entries) and not self.non_canonical


def read_header(text: str) -> SourceHeader:
    """
    Scan the leading comment lines for ``-- expect:`` and ``-- levels:``.

    Raises:
        ValueError: When ``-- levels:`` names an unknown structure
    """
    expect, levels = None, None
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped.startswith("--"):
            break
        if stripped.startswith(EXPECT_PREFIX):
            expect = stripped[len(EXPECT_PREFIX):].strip()
        elif stripped.startswith(LEVELS_PREFIX):
            levels = StructureId.from_flag(stripped[len(LEVELS_PREFIX):].strip())
    return SourceHeader(expect, levels)


def is_canonical(term: core.Term) -> bool:
    """Closed normal forms of Bool and Nat must be literals."""
    if isinstance(term, (core.TrueTm, core.FalseTm)):
        return True
    while isinstance(term, core.Suc):
        term = term.pred
    return isinstance(term, core.Zero)


class CheckerService:
    """Elaborates TTFL source under one level structure."""

    def __init__(
        self,
        structure_id: StructureId = StructureId.NAT,
        workers: int = DEFAULT_WORKERS,
        monitor: Optional[PerformanceMonitor] = None,
    ):
        """
        Initialize the checker.

        Args:
            structure_id: Level structure used unless a file header overrides it
            workers: Threads used when checking several files
            monitor: Where phase timings go (default: the global monitor)
        """
        self.structure_id = structure_id
        self.workers = max(1, workers)
        self.monitor = monitor or perf_monitor

    def load(self, path: str) -> str:
        """
        Read a source file.

        Raises:
            SourceError: Missing, oversized or undecodable file
        """
        file = Path(path)
        if not file.is_file():
            raise SourceError(path, "no such file")
        try:
            if file.stat().st_size > MAX_SOURCE_BYTES:
                raise SourceError(path, f"file exceeds {MAX_SOURCE_BYTES} bytes")
            return file.read_text(encoding="utf-8")
        except UnicodeDecodeError:
            raise SourceError(path, "file is not valid UTF-8") from None
        except OSError as error:
            raise SourceError(path, error.strerror or str(error)) from None

    def check_text(self, text: str, path: str = "<input>", structure_id: Optional[StructureId] = None) -> CheckResult:
        """
        Parse and elaborate source text.

        Args:
            text: Source text
            path: Name used in diagnostics
            structure_id: Override of the service's level structure

        Returns:
            Result carrying either the elaborated module or a diagnostic
        """
        structure_id = structure_id or self.structure_id
        started = time.perf_counter()
        try:
            with self.monitor.measure("parse"):
                module = parse(text)
            with self.monitor.measure("elaborate"):
                elaborated = elab_module(module, structure_id)
        except ParseError as error:
            return CheckResult(path, text, diagnostic=from_error(path, text, ElabError.from_parse_error(error)))
        except ElabError as error:
            logger.debug("%s: %s", path, error)
            return CheckResult(path, text, diagnostic=from_error(path, text, error))
        except KernelBug as error:
            logger.error("internal error in %s: %s", path, error)
            return CheckResult(path, text, diagnostic=internal_error(path, str(error)))
        except RecursionError:
            return CheckResult(path, text, diagnostic=internal_error(path, "term nested too deeply"))
        logger.debug(
            "%s: %d declarations under %s in %.4fs",
            path,
            len(elaborated.decls),
            structure_id.value,
            time.perf_counter() - started,
        )
        return CheckResult(path, text, module=elaborated)

    def check_file(self, path: str, structure_id: Optional[StructureId] = None) -> CheckResult:
        return self.check_text(self.load(path), path, structure_id)

    def check_files(self, paths: Sequence[str]) -> List[CheckResult]:
        """
        Check several files concurrently; results come back in input order.

        Raises:
            SourceError: For the first unreadable file, before any checking starts
        """
        texts = [self.load(path) for path in paths]
        if len(paths) == 1 or self.workers == 1:
            return [self.check_text(text, path) for path, text in zip(paths, texts)]
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(self.check_text, texts, paths))

    def normal_form(self, result: CheckResult, name: str) -> Tuple[str, str]:
        """
        Normal form of a declaration and its type, both printed.

        Raises:
            KeyError: When the module has no such declaration
        """
        module = result.module
        with self.monitor.measure("normalise"):
            value = module.normal_form(name)
            ty = module.normal_type(name)
        scope = module.names[: module.names.index(name)]
        return pretty_print(value, scope), pretty_print(ty, scope)

    def dump_core(self, result: CheckResult) -> str:
        return result.module.dump()

    def canonicity(self, module: ElaboratedModule) -> Tuple[int, List[str]]:
        """Normalise every Bool and Nat declaration; return the count and the names that are not literals."""
        checked, failures = 0, []
        for decl in module.decls:
            if not isinstance(decl.type_value, (VBoolTy, VNatTy)):
                continue
            checked += 1
            with self.monitor.measure("normalise"):
                normal = module.normal_form(decl.name)
            if not is_canonical(normal):
                failures.append(decl.name)
        return checked, failures

    def run_corpus(self, directory: str) -> CorpusReport:
        """
        Check a corpus laid out as ``accept/`` and ``reject/`` subdirectories.

        Accept files must elaborate, survive a print-and-recheck round and
        have canonical Bool/Nat declarations. Reject files must fail with
        the kind named by their ``-- expect:`` header.

        Raises:
            SourceError: When the directory does not exist or a file is unreadable
        """
        root = Path(directory)
        if not root.is_dir():
            raise SourceError(directory, "no such directory")

        jobs: List[Tuple[str, str, bool]] = []
        for sub, accepting in ((CORPUS_ACCEPT_DIR, True), (CORPUS_REJECT_DIR, False)):
            for file in sorted((root / sub).glob(f"*{SOURCE_EXTENSION}")):
                jobs.append((str(file), self.load(str(file)), accepting))

        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            outcomes = list(pool.map(lambda job: self._corpus_entry(*job), jobs))

        report = CorpusReport()
        for entry, checked, failures in outcomes:
            report.entries.append(entry)
            report.canonicity_checked += checked
            report.non_canonical.extend(f"{entry.path}:{name}" for name in failures)
        return report

    def _corpus_entry(self, path: str, text: str, accepting: bool) -> Tuple[CorpusEntry, int, List[str]]:
        try:
            header = read_header(text)
        except ValueError as error:
            return CorpusEntry(path, "?", self.structure_id, f"bad header: {error}", False), 0, []
        structure = header.levels or self.structure_id
        result = self.check_text(text, path, structure)

        if not accepting:
            expected = header.expect or "?"
            if expected not in ErrorKind.__members__:
                return CorpusEntry(path, expected, structure, "no valid expectation", False), 0, []
            outcome = result.kind or "accepted"
            return CorpusEntry(path, expected, structure, outcome, result.kind == expected), 0, []

        if not result.ok:
            return CorpusEntry(path, "accept", structure, result.diagnostic.headline, False), 0, []
        try:
            recheck(result.module)
        except (KernelBug, ElabError) as error:
            return CorpusEntry(path, "accept", structure, f"recheck failed: {error}", False), 0, []
        checked, failures = self.canonicity(result.module)
        return CorpusEntry(path, "accept", structure, "accepted", not failures), checked, failures


def group_by_outcome(report: CorpusReport) -> Dict[bool, List[CorpusEntry]]:
    grouped: Dict[bool, List[CorpusEntry]] = {True: [], False: []}
    for entry in report.entries:
        grouped[entry.passed].append(entry)
    return grouped
