import json
import subprocess
import sys

import pytest

from stonezr.cli import main

V_JSON = {"points": [{"id": "x"}, {"id": "y"}, {"id": "g"}], "specializes": [["x", "g"], ["y", "g"]]}
CHAIN = {"points": [{"id": "c"}, {"id": "g"}], "specializes": [["c", "g"]]}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def report(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


@pytest.fixture
def v_file(tmp_path):
    path = tmp_path / "v.json"
    path.write_text(json.dumps(V_JSON))
    return str(path)


class TestSpecExamples:
    def test_proper_projective_line(self, capsys):
        code, rep = report(capsys, "zr", "proper", "--model", "p1fq", "--base", "specfq-point")
        assert code == 0 and rep["verdict"] is True and rep["method"] == "exact"

    def test_duality_certificate(self, capsys, v_file):
        code, rep = report(capsys, "lattice", "duality", "--poset", v_file)
        assert code == 0 and rep["verdict"] is True
        assert sorted(rep["certificate"]) == ["g", "x", "y"]

    def test_prec_false(self, capsys):
        code, rep = report(capsys, "zr", "prec", "--base", "specz", "--a", '[[empty,["2"]]]', "--b", '[[empty,["1/2"]]]')
        assert code == 1 and rep["verdict"] is False

    @pytest.mark.parametrize("name", ["duality", "episurj", "zr-laws"])
    def test_suites(self, capsys, name):
        code, rep = report(capsys, "suite", name)
        assert code == 0
        (crit,) = rep["criteria"]
        assert crit["verdict"] == "pass" and crit["failures"] == []


class TestCommands:
    def test_lattice_spec_and_homs(self, capsys, v_file):
        code, rep = report(capsys, "lattice", "spec", "--poset", v_file)
        assert code == 0 and len(rep["spectrum"]["points"]) == 3
        code, rep = report(capsys, "lattice", "homs", "--poset", json.dumps(CHAIN), "--target", json.dumps(CHAIN))
        assert code == 0 and rep["count"] == 3

    def test_space(self, capsys, v_file):
        fold = {
            "source": {"points": [{"id": "a"}, {"id": "b"}], "specializes": []},
            "target": {"points": [{"id": "p"}], "specializes": []},
            "map": {"a": "p", "b": "p"},
        }
        code, rep = report(capsys, "space", "epi", "--map", json.dumps(fold))
        assert code == 0 and rep["surjective"] is True
        code, rep = report(capsys, "space", "closure", "--poset", v_file, "--subset", "g")
        assert rep["closure"] == ["g", "x", "y"]
        code, rep = report(capsys, "space", "ultrafilters", "--set", "a,b,c")
        assert code == 0 and rep["count"] == 3

    def test_field(self, capsys):
        code, rep = report(capsys, "field", "val", "--field", "Q", "--elem", "3/4", "--place", "2")
        assert rep["value"] == -2
        code, rep = report(capsys, "field", "poles", "--field", "F2", "--elem", "1/(t^2+t)")
        assert rep["poles"] == ["t", "t+1"]
        code, rep = report(capsys, "field", "places", "--field", "F2", "--bound", "2")
        assert rep["places"] == ["t", "t+1", "inf", "t^2+t+1", "trivial"]

    def test_model(self, capsys):
        code, rep = report(capsys, "model", "check", "--model", "specz")
        assert code == 0 and rep["method"] == "bounded"
        code, rep = report(capsys, "model", "pq", "--model", "doubled-line")
        assert code == 0
        code, rep = report(capsys, "model", "lift", "--model", "a1fq", "--bound", "2")
        assert code == 1 and rep["separated"] is True and rep["universally_closed"] is False

    def test_zr(self, capsys):
        code, rep = report(capsys, "zr", "separated", "--model", "doubled-line")
        assert code == 1
        code, rep = report(capsys, "zr", "profinite", "--model", "a1fq")
        assert code == 0 and rep["strongly"] is True and rep["certificate"] == "U({}, {t})"
        code, rep = report(capsys, "zr", "compactify", "--model", "a1fq")
        assert code == 0 and rep["embedding_is_Q"] is True
        code, rep = report(capsys, "zr", "section", "--base", "specfq-point", "--elem", "1/t", "--a", '[[empty,["t"]]]')
        assert code == 1
        code, rep = report(capsys, "zr", "points", "--model", "specz", "--bound", "5")
        assert rep["method"] == "bounded" and rep["bound"] == 5

    def test_bound_from_environment(self, capsys, monkeypatch):
        monkeypatch.setenv("STONEZR_BOUND", "3")
        _, rep = report(capsys, "field", "places", "--field", "Q")
        assert rep["places"] == ["2", "3", "trivial"]


class TestFormats:
    def test_dot(self, capsys):
        code, out, _ = run(capsys, "zr", "points", "--model", "specfq-point", "--bound", "2", "--format", "dot")
        assert code == 0 and out.startswith("digraph")
        assert out.count(": ") == 5

    def test_dot_without_object(self, capsys):
        code, _, err = run(capsys, "field", "places", "--field", "Q", "--format", "dot")
        assert code == 2 and "DOT" in err

    def test_text(self, capsys):
        code, out, _ = run(capsys, "zr", "proper", "--model", "p1fq", "--format", "text")
        assert code == 0 and out.startswith("proper: True (exact)")


class TestErrors:
    @pytest.mark.parametrize(
        "argv",
        [
            ["lattice", "spec", "--poset", "{not json"],
            ["lattice", "spec", "--poset", "missing.json"],
            ["zr", "prec", "--base", "specz", "--a", '[[["4"],["2"]]]', "--b", "[]"],
            ["field", "val", "--field", "F4", "--elem", "t", "--place", "t"],
            ["field", "val", "--field", "Q", "--elem", "0", "--place", "2"],
            ["zr", "proper"],
            ["nonsense"],
            ["zr", "proper", "--bound", "many"],
        ],
    )
    def test_input_errors_exit_two(self, capsys, argv):
        code, _, _ = run(capsys, *argv)
        assert code == 2

    def test_malformed_json_names_the_location(self, capsys):
        _, _, err = run(capsys, "lattice", "spec", "--poset", '{"points": [}')
        assert "--poset" in err and "line 1" in err

    def test_bad_point_names_the_path(self, capsys):
        _, _, err = run(capsys, "zr", "prec", "--base", "specz", "--a", '[[["4"],["2"]]]', "--b", "[]")
        assert "--a" in err

    def test_size_limit(self, capsys):
        big = {"points": [{"id": f"p{i}"} for i in range(12)], "specializes": []}
        code, _, _ = run(capsys, "lattice", "homs", "--poset", json.dumps(big), "--target", json.dumps(big))
        assert code == 2


def strip_runtimes(text):
    rep = json.loads(text)
    for crit in rep.get("criteria", []):
        crit.pop("runtime_s")
    return rep


class TestDeterminism:
    @pytest.mark.parametrize(
        "argv",
        [
            ["zr", "compactify", "--model", "doubled-line"],
            ["model", "check", "--model", "semilocal", "--seed", "3"],
            ["zr", "points", "--model", "p1fq", "--format", "dot"],
        ],
    )
    def test_byte_identical(self, capsys, argv):
        first = run(capsys, *argv)[1]
        assert first == run(capsys, *argv)[1]

    def test_suite_modulo_runtime(self, capsys):
        first = run(capsys, "suite", "pq")[1]
        assert strip_runtimes(first) == strip_runtimes(run(capsys, "suite", "pq")[1])


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "stonezr", "zr", "proper", "--model", "p1fq", "--base", "specfq-point"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] is True
