"""Command-line surface: exit codes, formats, env overrides, determinism."""

import json

import pytest

from gapforge.cli import (EXIT_ERROR, EXIT_INCONSISTENT, EXIT_OK,
                          EXIT_VIOLATIONS, main)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


COMMON = ["--ceiling", "2000000"]


class TestScanCommand:
    def test_violations_exit_code_and_json(self, capsys):
        code, out, _ = run_cli(capsys, "scan", "--bound", "bhp",
                               "--from", "2", "--to", "2000",
                               "--format", "json", *COMMON)
        assert code == EXIT_VIOLATIONS
        body = json.loads(out)
        assert body["verdict"] == "Violations"
        assert [(v["p_prev"], v["p_next"]) for v in body["violations"]] == \
            [(7, 11), (23, 29), (113, 127)]
        assert body["schema_version"] == 1

    def test_all_hold_exit_zero(self, capsys):
        code, out, _ = run_cli(capsys, "scan", "--bound", "exp:3",
                               "--from", "2", "--to", "2000", *COMMON)
        assert code == EXIT_OK
        assert "AllHold" in out

    def test_csv_output(self, capsys):
        code, out, _ = run_cli(capsys, "scan", "--bound", "bhp",
                               "--from", "2", "--to", "200",
                               "--format", "csv", *COMMON)
        assert code == EXIT_VIOLATIONS
        lines = out.splitlines()
        assert lines[0] == "p_prev,p_next,gap,bound_lo,bound_hi,ratio"
        assert len(lines) == 4   # header + (7,11), (23,29), (113,127)

    def test_bad_bound_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "scan", "--bound", "nope",
                               "--from", "2", "--to", "100", *COMMON)
        assert code == EXIT_ERROR
        assert "cannot parse bound" in err

    def test_missing_required_flag(self, capsys):
        code, _, _ = run_cli(capsys, "scan", "--bound", "bhp", "--from", "2")
        assert code == EXIT_ERROR

    def test_custom_bound(self, capsys):
        code, out, _ = run_cli(capsys, "scan", "--bound", "custom:1,21/40,next",
                               "--from", "2", "--to", "200",
                               "--format", "json", *COMMON)
        assert code == EXIT_VIOLATIONS   # same shape as bhp
        assert json.loads(out)["bound"]["variant"] == "custom"

    def test_global_flags_before_subcommand_rejected_cleanly(self, capsys):
        # global options belong after the subcommand; before it they are
        # unknown to the root parser and must exit with a usage error
        code, _, _ = run_cli(capsys, "--format", "json", "scan",
                             "--bound", "bhp", "--from", "2", "--to", "200")
        assert code == EXIT_ERROR


class TestTheoremCommand:
    def test_preset_holds(self, capsys):
        code, out, _ = run_cli(capsys, "theorem", "--case", "ingham-cube-2",
                               "--from", "2", "--to", "100",
                               "--format", "json", *COMMON)
        assert code == EXIT_OK
        body = json.loads(out)
        assert body["outcome"] == "HoldsForAll" and body["required_count"] == 2

    def test_inline_k(self, capsys):
        code, out, _ = run_cli(capsys, "theorem", "--case", "fractional:2",
                               "--from", "2", "--to", "1000", *COMMON)
        assert code == EXIT_OK
        assert "HoldsForAll" in out

    def test_sqrt5(self, capsys):
        code, _, _ = run_cli(capsys, "theorem", "--case", "sqrt5",
                             "--from", "2", "--to", "50", *COMMON)
        assert code == EXIT_OK

    def test_unknown_case(self, capsys):
        code, _, err = run_cli(capsys, "theorem", "--case", "bogus",
                               "--from", "2", "--to", "50", *COMMON)
        assert code == EXIT_ERROR and "unknown case" in err

    def test_missing_inline_parameter(self, capsys):
        code, _, err = run_cli(capsys, "theorem", "--case", "exp",
                               "--from", "2", "--to", "50", *COMMON)
        assert code == EXIT_ERROR and "inline parameter" in err

    def test_ceiling_exceeded(self, capsys):
        code, _, err = run_cli(capsys, "theorem", "--case", "ingham-cube",
                               "--from", "2", "--to", "500",
                               "--ceiling", "2000000")
        assert code == EXIT_ERROR and "ceiling" in err


class TestConstCommand:
    @pytest.mark.parametrize("which,expect", [
        ("cg:100", "20000"),
        ("min-k:21/40", "40/19"),
        ("sandwich:21", "1"),
        ("prop5:2", "3299"),
    ])
    def test_text_values(self, capsys, which, expect):
        code, out, _ = run_cli(capsys, "const", "--which", which, *COMMON)
        assert code == EXIT_OK
        assert expect in out

    def test_json_value(self, capsys):
        code, out, _ = run_cli(capsys, "const", "--which", "n0:21",
                               "--format", "json", *COMMON)
        assert code == EXIT_OK
        body = json.loads(out)
        assert body["value"]["exact"] == str(round((21 * 20) ** 1.5))

    def test_kg_enclosure(self, capsys):
        code, out, _ = run_cli(capsys, "const", "--which", "kg:3",
                               "--format", "json", *COMMON)
        assert code == EXIT_OK
        body = json.loads(out)
        assert abs(body["value"]["approx"] - 2.1946) < 1e-3

    def test_bad_selector(self, capsys):
        code, _, err = run_cli(capsys, "const", "--which", "nope:1", *COMMON)
        assert code == EXIT_ERROR and "unknown const selector" in err


class TestEquivCommand:
    def test_consistent(self, capsys):
        code, out, _ = run_cli(capsys, "equiv", "--lemma", "7", "--k", "2",
                               "--from", "3", "--to", "5000",
                               "--format", "json", *COMMON)
        assert code == EXIT_OK
        assert json.loads(out)["consistent"] is True

    def test_domain_error(self, capsys):
        code, _, err = run_cli(capsys, "equiv", "--lemma", "5", "--k", "3/2",
                               "--from", "3", "--to", "100", *COMMON)
        assert code == EXIT_ERROR and "requires k >=" in err


class TestEnvironment:
    def test_env_ceiling_respected(self, capsys, monkeypatch):
        monkeypatch.setenv("GAPFORGE_CEILING", "10000")
        code, _, err = run_cli(capsys, "scan", "--bound", "bhp",
                               "--from", "2", "--to", "20000")
        assert code == EXIT_ERROR and "ceiling" in err

    def test_flag_overrides_env(self, capsys, monkeypatch):
        monkeypatch.setenv("GAPFORGE_CEILING", "10000")
        code, _, _ = run_cli(capsys, "scan", "--bound", "bhp",
                             "--from", "2", "--to", "20000",
                             "--ceiling", "2000000")
        assert code == EXIT_VIOLATIONS

    def test_cache_dir_flag(self, capsys, tmp_path):
        code, _, _ = run_cli(capsys, "scan", "--bound", "exp:3",
                             "--from", "2", "--to", "2000",
                             "--cache-dir", str(tmp_path), *COMMON)
        assert code == EXIT_OK
        assert any(tmp_path.iterdir())


class TestDeterminism:
    def test_byte_identical_across_workers(self, capsys):
        outputs = set()
        for w in ("1", "4", "8"):
            code, out, _ = run_cli(capsys, "scan", "--bound", "bhp",
                                   "--from", "2", "--to", "100000",
                                   "--format", "json", "--workers", w, *COMMON)
            assert code == EXIT_VIOLATIONS
            outputs.add(out)
        assert len(outputs) == 1
