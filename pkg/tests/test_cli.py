"""CLI contract: exit codes, stable JSON, schema validation, corpus runs."""

import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

PKG_ROOT = Path(__file__).resolve().parents[1]
CORPUS = PKG_ROOT / "src" / "conslaw_kit" / "corpus"
SCHEMA = json.loads(
    (PKG_ROOT / "src" / "conslaw_kit" / "schema" / "report-v1.json").read_text())

WAVE = str(CORPUS / "wave.cl")
THOMAS = str(CORPUS / "thomas.cl")
KG = str(CORPUS / "klein-gordon.cl")


def run_cli(*args, timeout=180):
    return subprocess.run(
        [sys.executable, "-m", "conslaw_kit", *args],
        capture_output=True, text=True, timeout=timeout,
        env={"CONSLAW_COLOR": "0", "PATH": "/usr/bin:/bin"},
    )


def validate(doc):
    jsonschema.validate(doc, SCHEMA)
    return doc


class TestExitCodes:
    def test_multiplier_check_failure_exits_1(self):
        r = run_cli("multiplier-check", "scaleChar", "--session", WAVE)
        assert r.returncode == 1
        assert "not a multiplier" in r.stdout

    def test_conslaw_success_exits_0(self):
        r = run_cli("conslaw", "eta=-D[u,t]", "phi=u-x*D[u,x]",
                    "--session", WAVE)
        assert r.returncode == 0
        assert "C[t]" in r.stdout and "C[x]" in r.stdout
        assert "identity" in r.stdout

    def test_variational_check_thomas_exits_1_with_witness(self):
        r = run_cli("variational-check", "--session", THOMAS, "--format", "json")
        assert r.returncode == 1
        doc = validate(json.loads(r.stdout))
        assert doc["status"] == "nonzero"
        assert "witness" in doc["extra"]

    def test_parse_error_exits_2(self):
        r = run_cli("symmetry-check", "char=D[u,]", "--session", WAVE)
        assert r.returncode == 2

    def test_unknown_command_exits_2(self):
        r = run_cli("frobnicate", "--session", WAVE)
        assert r.returncode == 2

    def test_missing_session_exits_2(self):
        r = run_cli("variational-check")
        assert r.returncode == 2

    def test_unknown_name_exits_2(self):
        r = run_cli("symmetry-check", "nosuch", "--session", WAVE)
        assert r.returncode == 2

    def test_wrong_substitution_class_exits_2(self):
        r = run_cli("selfadjoint-check", "sub1", "--session", THOMAS)
        assert r.returncode == 2
        assert "requires differential substitution" in r.stdout


class TestCorpusRuns:
    @pytest.mark.parametrize("session", [WAVE, THOMAS, KG])
    def test_full_session_exits_0(self, session):
        r = run_cli("run", "--session", session)
        assert r.returncode == 0, r.stdout + r.stderr

    def test_verify_failure_serializes_residual(self, tmp_path):
        bad = tmp_path / "bad_vec.cl"
        bad.write_text(
            "indep t x;\ndep u;\n"
            "eq wave: D[u,t,t] - u^2*D[u,x,x] - u*D[u,x]^2 = 0 "
            "leading D[u,t,t];\n"
            "vector wrong = (D[u,t], D[u,x]);\n")
        r = run_cli("verify", "wrong", "--session", str(bad),
                    "--format", "json")
        assert r.returncode == 1
        doc = validate(json.loads(r.stdout))
        assert doc["status"] == "nonzero"
        assert doc["residuals"][0]["expr"] != "0"

    def test_expectation_mismatch_exits_1(self, tmp_path):
        bad = tmp_path / "bad.cl"
        bad.write_text(
            "indep t x;\ndep u;\n"
            "eq wave: D[u,t,t] - u^2*D[u,x,x] - u*D[u,x]^2 = 0 "
            "leading D[u,t,t];\n"
            "char scaleChar = u - x*D[u,x];\n"
            "cmd multiplier-check scaleChar;\n")   # expects zero, gets nonzero
        r = run_cli("run", "--session", str(bad))
        assert r.returncode == 1


class TestJson:
    def test_deterministic_byte_for_byte(self):
        a = run_cli("adjoint-check", "sub1", "--session", THOMAS,
                    "--format", "json")
        b = run_cli("adjoint-check", "sub1", "--session", THOMAS,
                    "--format", "json")
        assert a.stdout == b.stdout
        validate(json.loads(a.stdout))

    @pytest.mark.parametrize("args", [
        ("variational-check", "--session", WAVE),
        ("symmetry-check", "scaleChar", "--session", WAVE),
        ("multiplier-check", "scaleChar", "--session", WAVE),
        ("conslaw", "timeTrans", "scaleChar", "--session", WAVE),
        ("selfadjoint-check", "subB", "--session", THOMAS),
        ("ansatz", "adjoint-symmetry", "b1", "b2", "b3", "b4", "b5", "b6",
         "b7", "b8", "--session", THOMAS),
    ])
    def test_reports_validate_against_schema(self, args):
        r = run_cli(*args, "--format", "json")
        assert r.returncode in (0, 1)
        doc = validate(json.loads(r.stdout))
        assert doc["schema_version"] == 1

    def test_status_vocabulary(self):
        r = run_cli("symmetry-check", "timeChar", "--session", WAVE,
                    "--format", "json")
        assert json.loads(r.stdout)["status"] == "zero"
        r = run_cli("symmetry-check", "char=x*u", "--session", WAVE,
                    "--format", "json")
        doc = json.loads(r.stdout)
        assert doc["status"] == "nonzero"
        assert doc["residuals"][0]["expr"] != "0"


class TestLatexOutput:
    def test_thomas_example1_contains_paper_exponent(self):
        r = run_cli("conslaw", "spaceTrans", "sub1", "--session", THOMAS,
                    "--format", "latex")
        assert r.returncode == 0
        assert "e^{2(\\gamma u+\\alpha t+\\beta x)}" in r.stdout

    def test_latex_renders_components(self):
        r = run_cli("conslaw", "timeTrans", "scaleChar", "--session", WAVE,
                    "--format", "latex")
        assert "C^{t} =" in r.stdout and "C^{x} =" in r.stdout


class TestColorControl:
    def test_color_forced_on(self):
        r = subprocess.run(
            [sys.executable, "-m", "conslaw_kit", "variational-check",
             "--session", WAVE],
            capture_output=True, text=True,
            env={"CONSLAW_COLOR": "1", "PATH": "/usr/bin:/bin"})
        assert "\x1b[32m" in r.stdout

    def test_color_off_by_default_when_piped(self):
        r = run_cli("variational-check", "--session", WAVE)
        assert "\x1b[" not in r.stdout


class TestTimeout:
    def test_timeout_exits_2(self):
        r = run_cli("conslaw", "timeTrans", "sub3", "--session", THOMAS,
                    "--timeout", "0.000001")
        assert r.returncode == 2
        assert "timeout" in r.stdout
