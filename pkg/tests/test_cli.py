"""Command-line behaviour: exit codes, listings and reports."""
import json

import pytest

from rank2geo.catalog import load_catalog
from rank2geo.cli import (
    EXIT_FAIL,
    EXIT_PASS,
    EXIT_SKIPPED,
    EXIT_USAGE,
    REPORT_DIR_ENV,
    UsageError,
    dumps_report,
    list_rows,
    main,
    reevaluate,
    search_report,
    select_instances,
)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestExitCodes:
    def test_pass(self, capsys):
        code, out, _ = run(capsys, "verify", "--entry", "g2r:3/item6")
        assert code == EXIT_PASS and "pass" in out

    def test_skipped(self, capsys):
        assert run(capsys, "verify", "--entry", "eiii/item1")[0] == EXIT_SKIPPED

    def test_fail(self, capsys):
        code, out, _ = run(capsys, "verify", "--entry", "grp-sp2/item3")
        assert code == EXIT_FAIL and "fail" in out

    def test_search_too_large(self, capsys):
        code, _, err = run(capsys, "search", "--space", "gi", "--k", "7")
        assert code == EXIT_USAGE and "k <= 6" in err

    @pytest.mark.parametrize("argv", [["verify", "--bogus"], ["frobnicate"], ["verify"],
                                      ["verify", "--entry", "nothing"], ["search", "--space", "g2r:99", "--k", "2"],
                                      ["verify", "--entry", "g2r:3/item6", "--convention", "srr1"]])
    def test_usage_errors(self, capsys, argv):
        assert run(capsys, *argv)[0] == EXIT_USAGE

    def test_positional_target(self, capsys):
        assert run(capsys, "verify", "ai/item2")[0] == EXIT_PASS


class TestListing:
    def test_family_filter(self, capsys):
        code, out, _ = run(capsys, "list", "ai")
        assert code == EXIT_PASS
        assert len(out.strip().splitlines()) == 2

    def test_space_filter(self):
        rows = list_rows(load_catalog(), "g2h:2")
        assert rows and all(r["entry"].startswith("g2h/") for r in rows)
        assert all(any(i.startswith("g2h:2/") for i in r["instances"]) for r in rows)

    def test_unfiltered_includes_out_of_scope(self):
        rows = list_rows(load_catalog())
        assert len(rows) == len(load_catalog().entries)
        assert any(r["status"] == "out-of-scope" for r in rows)

    def test_records_format(self, capsys):
        _, out, _ = run(capsys, "list", "gi", "--format", "records")
        assert len(json.loads(out)) == 4

    def test_spaces(self, capsys):
        _, out, _ = run(capsys, "spaces")
        assert "gi" in out.split() and "g2h:2" in out.split()


class TestSelection:
    def test_part_and_l(self):
        cat = load_catalog()
        pairs = select_instances(cat, entry="g2r:4/item3@l=1")
        assert [p[1] for p in pairs] == [{"n": 4, "l": 1}]

    def test_malformed(self):
        with pytest.raises(UsageError):
            select_instances(load_catalog(), entry="g2r item3")


class TestReports:
    def test_search_report_byte_identical(self):
        a = dumps_report(search_report("ai", 2, 10, 1))
        b = dumps_report(search_report("ai", 2, 10, 1))
        assert a == b
        assert json.loads(a)["unexpected"] == 0

    def test_search_cli_writes_report(self, capsys, tmp_path):
        path = tmp_path / "s.json"
        code, _, _ = run(capsys, "search", "ai", "--k", "2", "--restarts", "10", "--seed", "1",
                         "--report-out", str(path))
        assert code == EXIT_PASS
        assert path.read_text() == dumps_report(search_report("ai", 2, 10, 1))

    def test_verify_report_reevaluates(self, capsys, tmp_path):
        path = tmp_path / "v.json"
        run(capsys, "verify", "--space", "ai", "--format", "records", "--report-out", str(path))
        report = json.loads(path.read_text())
        assert reevaluate(report) == [r["outcome"] for r in report["records"]]
        assert report["unverified_claims"]

    def test_report_dir_from_environment(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv(REPORT_DIR_ENV, str(tmp_path))
        run(capsys, "verify", "--entry", "ai/item2")
        assert (tmp_path / "verify-ai-item2.json").exists()

    def test_timings_only_on_request(self, capsys):
        _, out, _ = run(capsys, "verify", "ai/item2", "--format", "records")
        assert "seconds" not in json.loads(out)["records"][0]
        _, out, _ = run(capsys, "verify", "ai/item2", "--format", "records", "--timings")
        assert "seconds" in json.loads(out)["records"][0]
