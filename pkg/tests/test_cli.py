"""Command-line behaviour: exit codes, report schema, round-trips and golden files."""

from __future__ import annotations

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from artifact.cli import cli, main

GOLDEN = Path(__file__).parent / "golden"


def invoke(*args):
    return CliRunner().invoke(cli, [str(a) for a in args])


def report(result):
    return json.loads(result.stdout)


class TestLatticeAndPseudo:
    def test_lattice_info(self):
        res = invoke("lattice", "info", "--name", "H+E8+E8")
        assert res.exit_code == 0
        out = report(res)
        assert out["schema"] == 1
        assert out["command"] == "lattice info"
        r = out["result"]
        assert (r["rank"], r["signature"], r["even"], r["unimodular"]) == (18, [1, 17, 0], True, True)

    def test_unknown_lattice_is_usage_error(self):
        assert invoke("lattice", "info", "--name", "Q(7)").exit_code == 64

    def test_classify_p2(self):
        res = invoke("pseudo", "classify", "--file", GOLDEN / "p2.json")
        assert res.exit_code == 0
        r = report(res)["result"]
        assert {k: r[k] for k in ("model", "n", "degree")} == {"model": "Chain", "n": 3, "degree": 9}

    def test_classify_rejects_non_qdp(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"ns": "I(1,3)", "K": [-2, 0, 0, 0]}))
        res = invoke("pseudo", "classify", "--file", p)
        assert res.exit_code == 1
        assert report(res)["status"] == "refuted"

    def test_text_format(self):
        res = invoke("--format", "text", "lattice", "info", "--name", "E8")
        assert res.exit_code == 0
        assert "result.rank: 8" in res.stdout


class TestMalformedInput:
    def test_json_error_location(self, tmp_path):
        p = tmp_path / "broken.json"
        p.write_text('{"ns": "I(1,0)",\n "K": [-3,]}')
        res = invoke("pseudo", "classify", "--file", p)
        assert res.exit_code == 64
        assert "line 2" in res.stderr and "column" in res.stderr

    def test_missing_key(self, tmp_path):
        p = tmp_path / "partial.json"
        p.write_text(json.dumps({"side1": []}))
        assert invoke("fibration", "check-allowable", "--config", p).exit_code == 64

    def test_bad_euler_total(self, tmp_path):
        p = tmp_path / "split.json"
        p.write_text(json.dumps({"side1": [{"type": "I1"}], "side2": [{"type": "I18"}]}))
        res = invoke("fibration", "check-allowable", "--config", p)
        assert res.exit_code == 64
        assert "24" in res.stderr

    def test_main_returns_codes(self):
        assert main(["lattice", "info", "--name", "E8"]) == 0
        assert main(["no-such-command"]) == 64
        assert main(["lattice", "info"]) == 64


class TestTyurinCommands:
    def test_build_and_reuse(self, tmp_path):
        out = tmp_path / "model.json"
        res = invoke("--out", out, "tyurin", "build", "--pair1", GOLDEN / "p2.json", "--pair2", GOLDEN / "bl18.json")
        assert res.exit_code == 0
        model = json.loads(out.read_text())
        assert model["result"]["degree"] == 9
        assert set(model["input_digests"]) == {str(GOLDEN / "p2.json"), str(GOLDEN / "bl18.json")}

        lhat = tmp_path / "lhat.json"
        lhat.write_text(json.dumps({"L": [[1, 1] + [0] * 16]}))
        res = invoke("tyurin", "check-polarisation", "--model", out, "--lhat", lhat)
        assert res.exit_code == 0
        assert report(res)["result"]["clauses"]["contains_zeta"] is True

    def test_degree_mismatch_refuted(self, tmp_path):
        p = tmp_path / "bl9.json"
        p.write_text(json.dumps({"surface": "Bl9"}))
        res = invoke("tyurin", "build", "--pair1", GOLDEN / "p2.json", "--pair2", p)
        assert res.exit_code == 1

    def test_non_primitive_polarisation(self, tmp_path):
        model = tmp_path / "m.json"
        model.write_text(json.dumps({"pair1": "P2", "pair2": "Bl18"}))
        lhat = tmp_path / "l.json"
        lhat.write_text(json.dumps({"L": [[2] + [0] * 17]}))
        assert invoke("tyurin", "check-polarisation", "--model", model, "--lhat", lhat).exit_code == 1


class TestFibrationCommands:
    def test_build_output_is_reusable(self, tmp_path):
        out = tmp_path / "split_model.json"
        res = invoke("--out", out, "fibration", "build", "--config", GOLDEN / "fib_a17.json")
        assert res.exit_code == 0
        again = invoke("fibration", "check-allowable", "--config", out)
        assert again.exit_code == 0
        assert report(again)["result"]["basis"] == {"a": [-1, 0], "b": [0, -1]}

    def test_polarisation_default_components(self):
        res = invoke("fibration", "check-polarisation", "--config", GOLDEN / "disc_8prime.json")
        assert res.exit_code == 0

    def test_polarisation_euler_gate(self):
        res = invoke("fibration", "check-polarisation", "--config", GOLDEN / "fib_a17.json", "--side", "2")
        assert res.exit_code == 64


class TestMirrorCommands:
    def test_auto_and_witness_round_trip(self, tmp_path):
        out = tmp_path / "report.json"
        res = invoke("--out", out, "mirror", "check", "--degeneration", GOLDEN / "deg_a17.json", "--fibration", GOLDEN / "fib_a17.json")
        assert res.exit_code == 0
        res = invoke(
            "mirror", "check", "--degeneration", GOLDEN / "deg_a17.json", "--fibration", GOLDEN / "fib_a17.json", "--witness", out
        )
        assert res.exit_code == 0
        assert report(res)["result"]["clauses"]["4_splitting"] is True

    def test_needs_witness(self):
        res = invoke("mirror", "check", "--no-auto", "--degeneration", GOLDEN / "deg_a17.json", "--fibration", GOLDEN / "fib_a17.json")
        assert res.exit_code == 2
        assert report(res)["status"] == "needs_witness"

    def test_incomplete_witness_is_unknown(self, tmp_path):
        out = tmp_path / "report.json"
        invoke("--out", out, "mirror", "check", "--degeneration", GOLDEN / "deg_a17.json", "--fibration", GOLDEN / "fib_a17.json")
        data = json.loads(out.read_text())["result"]["witness"]
        w = tmp_path / "w.json"
        w.write_text(json.dumps({"psi1": data["psi1"], "psi2": data["psi2"]}))
        res = invoke("mirror", "check", "--degeneration", GOLDEN / "deg_a17.json", "--fibration", GOLDEN / "fib_a17.json", "--witness", w)
        assert res.exit_code == 2

    def test_refuted_on_degree_mismatch(self):
        res = invoke("mirror", "check", "--degeneration", GOLDEN / "deg_a17.json", "--fibration", GOLDEN / "fib_mismatch.json")
        assert res.exit_code == 1

    def test_instance_shorthand(self, tmp_path):
        d, f = tmp_path / "d.json", tmp_path / "f.json"
        d.write_text(json.dumps({"instance": "E7D10"}))
        f.write_text(json.dumps({"instance": "E7D10"}))
        assert invoke("mirror", "check", "--degeneration", d, "--fibration", f).exit_code == 0

    def test_dht_suite_table(self):
        res = invoke("--format", "text", "mirror", "dht-suite")
        assert res.exit_code == 0
        assert "4/4 instances verified" in res.stdout


class TestDeterminismAndGolden:
    def test_reports_are_deterministic(self):
        args = ("fibration", "check-allowable", "--config", GOLDEN / "config_a17.json")
        assert invoke(*args).stdout == invoke(*args).stdout

    def test_timing_is_opt_in(self):
        assert "timing_s" not in report(invoke("lattice", "info", "--name", "E8"))
        assert "timing_s" in report(invoke("--timing", "lattice", "info", "--name", "E8"))

    def test_selftest_seeded(self):
        a = report(invoke("--seed", "11", "selftest", "--cases", "25"))
        assert a["status"] == "verified"
        assert a["result"]["seed"] == 11

    def test_golden_cases(self):
        res = invoke("golden", "--dir", GOLDEN)
        out = report(res)
        assert res.exit_code == 0, out["result"]["failed"]
        assert len(out["result"]["cases"]) >= 8

    @pytest.mark.parametrize("case", sorted(p.name for p in GOLDEN.glob("*.case.json")))
    def test_golden_exit_codes_cover_verdicts(self, case):
        data = json.loads((GOLDEN / case).read_text())
        assert data["exit_code"] in (0, 1, 2, 64)
        assert data["report"]["schema"] == 1
