import json
import subprocess
import sys

import pytest

from adlog.cli import main

from conftest import FIXTURES


def fx(name: str) -> str:
    return str(FIXTURES / name)


def invoke(capsys, *argv) -> tuple[int, str]:
    code = main(list(argv))
    return code, capsys.readouterr().out


class TestExitCodes:
    def test_apply_applied_exits_zero(self, capsys):
        code, _ = invoke(capsys, "apply", "-p", fx("new_hire_unique.adl"),
                         "-u", fx("new_hire_unique.adu"), "--semantics", "uts")
        assert code == 0

    def test_apply_rejected_exits_two(self, capsys):
        code, _ = invoke(capsys, "apply", "-p", fx("new_hire_mixed.adl"),
                         "-u", fx("new_hire_mixed.adu"), "--semantics", "twfs")
        assert code == 2

    def test_parse_error_exits_one(self, tmp_path, capsys):
        bad = tmp_path / "bad.adl"
        bad.write_text("p(a)")
        code = main(["rewrite", "-p", str(bad)])
        assert code == 1

    def test_validation_error_exits_one(self, tmp_path, capsys):
        bad = tmp_path / "bad.adl"
        bad.write_text("p(X) :- not q(X).")
        code = main(["rewrite", "-p", str(bad)])
        assert code == 1

    def test_partial_db_precondition_exits_three(self, tmp_path, capsys):
        db = tmp_path / "partial.adb"
        db.write_text("emp(b)?")
        code = main(["apply", "-p", fx("new_hire_worker.adl"),
                     "-u", fx("new_hire_worker.adu"), "-d", str(db),
                     "--semantics", "ms"])
        assert code == 3

    def test_enumeration_cap_exits_three(self, tmp_path, capsys):
        prog = tmp_path / "wide.adl"
        prog.write_text("\n".join(f"p{i} :- not q{i}.\nq{i} :- not p{i}."
                                  for i in range(4)))
        code = main(["models", "-p", str(prog), "--cap", "3"])
        assert code == 3


class TestOutputs:
    def test_apply_text_report(self, capsys):
        code, out = invoke(capsys, "apply", "-p", fx("confirm_manager.adl"),
                           "-u", fx("confirm_manager.adu"), "--semantics", "ws")
        assert code == 0
        assert "status: applied" in out
        assert "mgr(x,d)." in out

    def test_apply_json_report(self, capsys):
        code, out = invoke(capsys, "apply", "-p", fx("confirm_manager.adl"),
                           "-u", fx("confirm_manager.adu"), "--semantics", "ws-bm",
                           "--json")
        assert code == 0
        doc = json.loads(out)
        assert doc["semantics"] == "ws-bm"
        assert doc["output"]["unknown"] == ["mgr(x,d)"]

    def test_models_listing(self, capsys):
        code, out = invoke(capsys, "models", "-p", fx("zoo_join.adl"))
        assert code == 0
        assert out.startswith("4 stable models")
        assert "max-deterministic" in out

    def test_wf_command(self, capsys):
        code, out = invoke(capsys, "wf", "-p", fx("zoo_choice.adl"))
        assert code == 0
        assert out.strip().startswith("a.")

    def test_compare_lists_all_semantics(self, capsys):
        code, out = invoke(capsys, "compare", "-p", fx("new_hire_worker.adl"),
                           "-u", fx("new_hire_worker.adu"))
        assert code == 0
        for sem in ("ws", "md", "twfs", "tmds", "uts", "ts", "ms", "mstt", "ws-bm"):
            assert f"{sem} " in out

    def test_ground_emits_reparseable_rules(self, capsys):
        from adlog import parse_program
        code, out = invoke(capsys, "ground", "-p", fx("zoo_join.adl"))
        assert code == 0
        parse_program(out)


class TestByteStability:
    """The same invocation must print identical bytes across processes."""

    @pytest.mark.parametrize("argv", [
        ("rewrite", "-p", fx("project_cascade.adl"), "-u", fx("project_cascade.adu")),
        ("models", "-p", fx("zoo_choice.adl")),
        ("compare", "-p", fx("new_hire_roles.adl"), "-u", fx("new_hire_roles.adu")),
    ])
    def test_two_process_runs_agree(self, argv):
        def run_once():
            return subprocess.run(
                [sys.executable, "-m", "adlog.cli", *argv],
                capture_output=True, text=True, check=True).stdout
        assert run_once() == run_once()


class TestSelftestCommand:
    def test_reduced_counts_pass(self, capsys):
        code, out = invoke(capsys, "selftest", "--ordering-count", "5",
                           "--oracle-count", "5", "--genericity-count", "2")
        assert code == 0
        assert "fixtures:" in out and "ok" in out
