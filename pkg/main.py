"""Command-line entry point for the TTFL checker."""
import argparse
import sys
from typing import List, Optional

from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from config.settings import (
    DEFAULT_LEVELS,
    DEFAULT_WORKERS,
    EXIT_ERROR,
    EXIT_OK,
    EXIT_USAGE,
    LOG_LEVEL,
    get_color_setting,
)
from kernel.levels import StructureId
from services import CheckerService, SourceError
from services.checker import group_by_outcome
from utils import perf_monitor, setup_logging

LEVEL_CHOICES = [structure.value for structure in StructureId]


def create_error_panel(message: str):
    """Create a Rich panel for error messages."""
    return Panel(Text(message), title="[bold red]Error[/bold red]", border_style="red")


def create_consoles(color: Optional[bool]):
    """Output console on stdout and diagnostics console on stderr, both without wrapping."""
    options = dict(soft_wrap=True, highlight=False, force_terminal=color, no_color=color is False)
    return Console(**options), Console(stderr=True, **options)


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command-line arguments."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--levels",
        choices=LEVEL_CHOICES,
        default=None,
        help=f"Level structure: nat, omega1 or omega-omega (default: TTFL_LEVELS or {DEFAULT_LEVELS})",
    )
    common.add_argument(
        "--color",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="Force coloured output on or off (default: TTFL_COLOR, else detect the terminal)",
    )
    common.add_argument("--verbose", "-v", action="store_true", help="Log elaboration steps to stderr")
    common.add_argument("--timings", action="store_true", help="Print parse/elaborate/normalise timings")
    common.add_argument(
        "--workers", type=int, default=DEFAULT_WORKERS, help=f"Threads for multi-file runs (default: {DEFAULT_WORKERS})"
    )

    parser = argparse.ArgumentParser(
        prog="ttfl",
        description="Type checker for a dependent type theory with first-class universe levels",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  ttfl check corpus/accept/bounded_poly.ttfl                  # Elaborate a file
  ttfl check corpus/accept/transfinite.ttfl --levels omega1   # Use levels up to ω
  ttfl nf corpus/accept/canonicity.ttfl --name two_plus_two   # Print a normal form
  ttfl dump-core corpus/accept/large_elim.ttfl                # Print elaborated core
  ttfl corpus corpus                                          # Run the accept/reject corpus
        """,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", parents=[common], help="Elaborate source files")
    check.add_argument("paths", nargs="+", help="Source files")

    nf = commands.add_parser("nf", parents=[common], help="Print the normal form of a declaration")
    nf.add_argument("path", help="Source file")
    nf.add_argument("--name", required=True, help="Declaration to normalise")

    dump = commands.add_parser("dump-core", parents=[common], help="Print the elaborated core of a file")
    dump.add_argument("path", help="Source file")

    corpus = commands.add_parser("corpus", parents=[common], help="Run a corpus of accept/ and reject/ files")
    corpus.add_argument("directory", help="Corpus root")

    return parser.parse_args(argv)


def run_check(service: CheckerService, paths: List[str], out: Console, err: Console) -> int:
    results = service.check_files(paths)
    status = EXIT_OK
    for result in results:
        if result.ok:
            out.print(f"{result.path}: ok ({len(result.module.decls)} declarations)", markup=False)
        else:
            err.print(result.diagnostic.render(), markup=False)
            status = EXIT_ERROR
    return status


def run_nf(service: CheckerService, path: str, name: str, out: Console, err: Console) -> int:
    result = service.check_file(path)
    if not result.ok:
        err.print(result.diagnostic.render(), markup=False)
        return EXIT_ERROR
    if result.module.find(name) is None:
        err.print(f"{path}: no declaration named '{name}'", markup=False)
        return EXIT_ERROR
    value, ty = service.normal_form(result, name)
    out.print(value, markup=False)
    out.print(f"  : {ty}", markup=False)
    return EXIT_OK


def run_dump_core(service: CheckerService, path: str, out: Console, err: Console) -> int:
    result = service.check_file(path)
    if not result.ok:
        err.print(result.diagnostic.render(), markup=False)
        return EXIT_ERROR
    out.print(service.dump_core(result), markup=False, end="")
    return EXIT_OK


def run_corpus(service: CheckerService, directory: str, out: Console) -> int:
    report = service.run_corpus(directory)

    table = Table(title="Corpus", show_header=True)
    table.add_column("File", style="cyan")
    table.add_column("Levels", style="white")
    table.add_column("Expect", style="yellow")
    table.add_column("Outcome", style="white")
    table.add_column("", justify="center")
    for entry in report.entries:
        mark = "[green]pass[/green]" if entry.passed else "[red]FAIL[/red]"
        table.add_row(entry.path, entry.structure.value, entry.expectation, entry.outcome, mark)
    out.print(table)

    grouped = group_by_outcome(report)
    out.print(
        f"{len(grouped[True])} passed, {len(grouped[False])} failed; "
        f"{report.canonicity_checked} closed Bool/Nat declarations normalised",
        markup=False,
    )
    for name in report.non_canonical:
        out.print(f"not canonical: {name}", markup=False)
    return EXIT_OK if report.passed else EXIT_ERROR


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    try:
        args = parse_arguments(argv)
    except SystemExit as exit_request:
        return exit_request.code if isinstance(exit_request.code, int) else EXIT_USAGE

    color = get_color_setting(args.color)
    out, err = create_consoles(color)
    setup_logging("DEBUG" if args.verbose else LOG_LEVEL, color)

    try:
        structure_id = StructureId.from_flag(args.levels or DEFAULT_LEVELS)
    except ValueError as error:
        err.print(create_error_panel(str(error)))
        return EXIT_USAGE

    perf_monitor.reset()
    service = CheckerService(structure_id, workers=args.workers)
    try:
        if args.command == "check":
            status = run_check(service, args.paths, out, err)
        elif args.command == "nf":
            status = run_nf(service, args.path, args.name, out, err)
        elif args.command == "dump-core":
            status = run_dump_core(service, args.path, out, err)
        else:
            status = run_corpus(service, args.directory, out)
    except SourceError as error:
        err.print(create_error_panel(str(error)))
        return EXIT_USAGE

    if args.timings:
        perf_monitor.print_report(err)
    return status


if __name__ == "__main__":
    sys.exit(main())
