"""The shipped corpus: accept files elaborate and recheck, reject files fail with their stated kind."""
import pytest

from kernel.elab import Ctx, ElabError, ErrorKind, check, elab_source, level_above, recheck
from kernel.levels import StructureId
from services import CheckerService, read_header
from services.checker import is_canonical
from syntax.surface import parse
from tests.conftest import ACCEPT_FILES, CORPUS, REJECT_FILES
from utils import PerformanceMonitor


def structure_of(path):
    return read_header(path.read_text(encoding="utf-8")).levels or StructureId.NAT


@pytest.fixture
def service():
    return CheckerService(workers=2, monitor=PerformanceMonitor())


class TestAccept:
    @pytest.mark.parametrize("path", ACCEPT_FILES, ids=lambda p: p.stem)
    def test_elaborates_and_rechecks(self, path):
        module = elab_source(path.read_text(encoding="utf-8"), structure_of(path))
        again = recheck(module)
        assert again.names == module.names

    @pytest.mark.parametrize("path", ACCEPT_FILES, ids=lambda p: p.stem)
    def test_bool_and_nat_declarations_are_canonical(self, path, service):
        module = elab_source(path.read_text(encoding="utf-8"), structure_of(path))
        _, failures = service.canonicity(module)
        assert failures == []

    def test_transfinite_file_needs_omega(self):
        path = CORPUS / "accept" / "transfinite.ttfl"
        with pytest.raises(ElabError) as info:
            elab_source(path.read_text(encoding="utf-8"), StructureId.NAT)
        assert info.value.kind is ErrorKind.LEVEL_ORDER

    def test_enough_closed_declarations(self, service):
        total = 0
        for path in ACCEPT_FILES:
            module = elab_source(path.read_text(encoding="utf-8"), structure_of(path))
            total += service.canonicity(module)[0]
        assert total >= 20

    @pytest.mark.parametrize("path", ACCEPT_FILES, ids=lambda p: p.stem)
    def test_normal_forms_are_stable(self, path):
        module = elab_source(path.read_text(encoding="utf-8"), structure_of(path))
        norm = module.ctx.norm
        for decl in module.decls:
            normal = module.normal_form(decl.name)
            again = norm.eval((), normal)
            assert norm.conv(0, again, decl.value, decl.type_value), decl.name
            assert norm.quote(0, again) == normal, decl.name

    @pytest.mark.parametrize("path", ACCEPT_FILES, ids=lambda p: p.stem)
    def test_checking_against_lifted_type_inserts_nothing(self, path):
        structure_id = structure_of(path)
        text = path.read_text(encoding="utf-8")
        module = elab_source(text, structure_id)
        ctx = Ctx.empty(structure_id)
        for source, decl in zip(parse(text).decls, module.decls):
            target = level_above(ctx, decl.level) if decl.level is not None else None
            if source.ty is not None and target is not None:
                lifted = ctx.norm.lift_value(decl.level, target, decl.type_value)
                assert check(ctx, source.body, lifted) == decl.term, decl.name
            ctx = ctx.define(decl.name, decl.type_value, decl.level, decl.value)

    def test_selected_normal_forms(self):
        module = elab_source((CORPUS / "accept" / "canonicity.ttfl").read_text(encoding="utf-8"))
        for name in ("two_plus_two", "lifted_bool", "coerced_true"):
            assert is_canonical(module.normal_form(name))


class TestReject:
    @pytest.mark.parametrize("path", REJECT_FILES, ids=lambda p: p.stem)
    def test_fails_with_expected_kind(self, path):
        text = path.read_text(encoding="utf-8")
        header = read_header(text)
        with pytest.raises(ElabError) as info:
            elab_source(text, header.levels or StructureId.NAT)
        assert info.value.kind.value == header.expect


class TestRunner:
    def test_whole_corpus_passes(self, service):
        report = service.run_corpus(str(CORPUS))
        assert [entry.path for entry in report.entries if not entry.passed] == []
        assert report.passed
        assert report.canonicity_checked >= 20
        assert len(report.entries) == len(ACCEPT_FILES) + len(REJECT_FILES)

    def test_timings_are_recorded(self, service):
        service.run_corpus(str(CORPUS))
        stats = service.monitor.get_all_stats()
        assert stats["parse"]["count"] == len(ACCEPT_FILES) + len(REJECT_FILES)
        assert stats["normalise"]["count"] >= 20

    def test_wrong_expectation_fails(self, service, tmp_path):
        (tmp_path / "reject").mkdir()
        (tmp_path / "reject" / "wrong.ttfl").write_text("-- expect: MISMATCH\nbad = U 0 0;\n", encoding="utf-8")
        report = service.run_corpus(str(tmp_path))
        assert not report.passed
        assert report.entries[0].outcome == "LEVEL_ORDER"

    def test_rejected_accept_file_fails(self, service, tmp_path):
        (tmp_path / "accept").mkdir()
        (tmp_path / "accept" / "broken.ttfl").write_text("bad : Bool = zero;\n", encoding="utf-8")
        report = service.run_corpus(str(tmp_path))
        assert not report.passed
        assert "MISMATCH" in report.entries[0].outcome

    def test_empty_directory_does_not_pass(self, service, tmp_path):
        assert not service.run_corpus(str(tmp_path)).passed

    def test_unknown_levels_header(self, service, tmp_path):
        (tmp_path / "accept").mkdir()
        (tmp_path / "accept" / "odd.ttfl").write_text("-- levels: omega2\nt : Bool = true;\n", encoding="utf-8")
        report = service.run_corpus(str(tmp_path))
        assert report.entries[0].outcome.startswith("bad header")
