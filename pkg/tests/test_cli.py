import json
import subprocess
import sys

import pytest

from systemg.cli import run
from systemg.semantics import Model
from systemg.syntax import ShapeFailure, parse, udnf_shape
from systemg.testkit import count_models

MODEL = {"worlds": ["w1", "w2"], "rank": {"w1": 0, "w2": 1},
         "valuation": {"p": ["w2"], "q": ["w1", "w2"]}}


@pytest.fixture
def model_file(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps(MODEL))
    return str(path)


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestExamples:
    def test_normalize_box(self, capsys):
        code, out, _ = invoke(capsys, "normalize", "[]p")
        assert (code, out) == (0, "O(false | ~p)\n")

    def test_equiv_pull(self, capsys):
        code, out, _ = invoke(capsys, "equiv", "O(p | q \\/ (r /\\ O(s|t)))",
                              "(O(s|t) /\\ O(p|q\\/r)) \\/ (~O(s|t) /\\ O(p|q))",
                              "--max-worlds", "3")
        assert code == 0
        assert out.startswith("no counterexample up to 3 world(s)")

    def test_eval_everywhere(self, capsys, model_file):
        code, out, _ = invoke(capsys, "eval", "O(p|q)", "--model", model_file)
        assert (code, out) == (0, "everywhere\n")


class TestSubcommands:
    def test_parse_echoes_core(self, capsys):
        code, out, _ = invoke(capsys, "parse", "P(p|q)")
        assert (code, out) == (0, "~O(~p | q)\n")

    def test_parse_udnf_failure(self, capsys):
        code, out, _ = invoke(capsys, "parse", "O(O(p|q)|r)", "--udnf")
        assert code == 1
        assert "not in UDNF" in out

    def test_depth(self, capsys):
        assert invoke(capsys, "depth", "O([]p | q)") == (0, "2\n", "")

    def test_depth_json(self, capsys):
        code, out, _ = invoke(capsys, "depth", "[]p", "--json")
        assert json.loads(out)["modal_depth"] == 1

    def test_eval_mixed_and_world(self, capsys, model_file):
        assert invoke(capsys, "eval", "p", "--model", model_file)[1] == "mixed: w2\n"
        assert invoke(capsys, "eval", "p", "--model", model_file, "--world", "w1")[1] == "false\n"
        assert invoke(capsys, "eval", "[]p", "--model", model_file)[1] == "nowhere\n"

    def test_eval_json(self, capsys, model_file):
        code, out, _ = invoke(capsys, "eval", "p", "--model", model_file, "--json")
        assert json.loads(out) == {"status": "mixed", "truth_set": ["w2"]}

    def test_eval_bad_model(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"worlds": ["w1", "w2"], "rank": {"w1": 0}, "valuation": {}}))
        code, _, err = invoke(capsys, "eval", "p", "--model", str(bad))
        assert code == 2
        assert "not total" in err

    def test_equiv_counterexample(self, capsys):
        code, out, _ = invoke(capsys, "equiv", "O(p|q)", "O(q|p)", "--max-worlds", "2")
        assert code == 1
        model = Model.from_json(out.splitlines()[1])
        assert model.report.ok

    def test_normalize_trace_and_output_reparse(self, capsys):
        code, out, _ = invoke(capsys, "normalize", "O(p | O(s|t))", "--trace")
        lines = out.splitlines()
        assert code == 0
        assert lines[0].startswith("PrenexExtract | Lemma 1 | ")
        assert not isinstance(udnf_shape(parse(lines[-1])), ShapeFailure)

    def test_normalize_no_simplify(self, capsys):
        _, out, _ = invoke(capsys, "normalize", "O(p | O(s|t))", "--no-simplify")
        assert "false \\/ true" in out

    def test_normalize_node_limit(self, capsys):
        code, _, err = invoke(capsys, "normalize", "O(O(p|q) \\/ O(q|r) | O(r|s))",
                              "--node-limit", "10")
        assert code == 3
        assert "limit of 10" in err

    def test_normalize_file(self, capsys, tmp_path):
        src = tmp_path / "f.txt"
        src.write_text("[]p\n")
        assert invoke(capsys, "normalize", "--file", str(src))[:2] == (0, "O(false | ~p)\n")

    def test_models_stream(self, capsys):
        code, out, _ = invoke(capsys, "models", "--worlds", "2", "--atoms", "p")
        lines = out.splitlines()
        assert code == 0
        assert len(lines) == count_models(2, ["p"])
        assert all(Model.from_json(line).report.ok for line in lines)

    def test_schemas(self, capsys):
        code, out, _ = invoke(capsys, "schemas", "--max-worlds", "2")
        assert code == 0
        assert out.splitlines()[-1] == "no counterexample up to 2 world(s)"

    def test_schemas_json(self, capsys):
        code, out, _ = invoke(capsys, "schemas", "--max-worlds", "1", "--json")
        assert code == 0
        assert json.loads(out)["max_worlds"] == 1


class TestErrors:
    def test_parse_error(self, capsys):
        code, _, err = invoke(capsys, "parse", "p /\\")
        assert code == 2
        assert "position 4" in err

    def test_unknown_subcommand(self, capsys):
        assert invoke(capsys, "frobnicate")[0] == 2

    def test_missing_formula(self, capsys):
        assert invoke(capsys, "depth")[0] == 2

    def test_world_bound(self, capsys):
        assert invoke(capsys, "equiv", "p", "p", "--max-worlds", "9")[0] == 2

    def test_unknown_world(self, capsys, model_file):
        assert invoke(capsys, "eval", "p", "--model", model_file, "--world", "w5")[0] == 2


def test_deterministic_output(capsys):
    a = invoke(capsys, "normalize", "~O([]p | O(q|r)) \\/ O(p|q)", "--trace")
    b = invoke(capsys, "normalize", "~O([]p | O(q|r)) \\/ O(p|q)", "--trace")
    assert a == b


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "systemg", "depth", "[][]p"],
                          capture_output=True, text=True, check=False)
    assert (proc.returncode, proc.stdout) == (0, "2\n")
