from __future__ import annotations

import json

import pytest

from gsptorsion import cli, suites
from gsptorsion.padic import PrecisionContext
from gsptorsion.torsion import TorsionSubgroup


def run(capsys, *argv):
    code = cli.run_command(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def _numbers_are_strings(obj, structural=("ell", "precision", "rows", "cols", "ambient_rank", "rank", "g", "k", "a")):
    if isinstance(obj, dict):
        return all(
            (k in structural and isinstance(v, int)) or _numbers_are_strings(v) for k, v in obj.items()
        )
    if isinstance(obj, list):
        return all(_numbers_are_strings(v) for v in obj)
    return not isinstance(obj, float) and (isinstance(obj, bool) or not isinstance(obj, int))


def test_spec_examples(capsys):
    assert run(capsys, "gamma", "simple", "--g", "2") == (0, {"value": "4/11"})
    assert run(capsys, "group", "order", "--family", "sp", "--g", "1", "--ell", "3",
               "--level", "2", "--method", "formula") == (0, {"order": "648"})
    assert run(capsys, "exceptional", "--g", "10") == (
        0, {"exceptional": True, "witness": {"kind": "binomial", "k": 3}})


@pytest.mark.parametrize("method", ["formula", "hensel", "enumerate"])
def test_order_methods_agree(capsys, method):
    code, out = run(capsys, "group", "order", "--family", "gsp", "--g", "1", "--ell", "3",
                    "--level", "2", "--method", method)
    assert code == 0 and out == {"order": "3888"}


def test_group_commands(capsys):
    code, out = run(capsys, "group", "enumerate", "--family", "prs", "--g", "1", "--r", "1",
                    "--ell", "3", "--list")
    assert code == 0 and out["order"] == "3" and len(out["elements"]) == 3
    assert run(capsys, "group", "codim", "--g", "2", "--r", "2", "--s", "1")[1]["codim"] == "9"
    code, out = run(capsys, "group", "index", "--g", "1", "--ell", "3", "--chain", "1,1", "1,0",
                    "--levels", "1", "2")
    assert out["exponent"] == "5"
    el = {"ell": 5, "precision": 1, "rows": 2, "cols": 2, "entries": ["2", "0", "0", "1"]}
    code, out = run(capsys, "group", "factorize", "--element", json.dumps(el))
    assert code == 0 and out["sp_part"]["matrix"]["entries"] == ["2", "0", "0", "3"]


def test_gamma_commands(capsys):
    code, out = run(capsys, "gamma", "product", "--factor", "g=1,n=2", "--factor", "g=2,n=3")
    assert code == 0 and out["value"] == "8/7" and out["maximizers"] == [["1", "2"]]
    assert out["rho_bound_holds"] is True
    code, out = run(capsys, "gamma", "search", "--g", "2", "--max-t", "1", "--max-level", "2")
    assert out["value"] == "4/11" and out["witness"] is not None


def test_lattice_and_torsion_commands(capsys, tmp_path):
    lat = {"ell": 3, "precision": 2, "ambient_rank": 2, "rank": 1,
           "generators": {"ell": 3, "precision": 2, "rows": 2, "cols": 1, "entries": ["1", "3"]}}
    path = tmp_path / "lat.json"
    path.write_text(json.dumps(lat))
    code, out = run(capsys, "lattice", "complete", "--input", str(path))
    assert code == 0 and out["vectors"]["entries"] == ["1", "0", "3", "1"]
    code, out = run(capsys, "lattice", "lift", "--precision", "3", "--input", json.dumps(lat))
    assert code == 0 and out["precision"] == 3

    ctx = PrecisionContext(3, 2)
    h = TorsionSubgroup.from_vectors(ctx, 1, [((1, 0), 2), ((0, 1), 1)]).to_json()
    text = json.dumps(h)
    assert run(capsys, "torsion", "type", "--input", text)[1]["exponents"] == ["2", "1"]
    assert run(capsys, "torsion", "m1", "--input", text)[1] == {"m1": "1", "m": "1"}
    assert run(capsys, "torsion", "chain", "--input", text)[1]["deltas"] == ["1", "0"]
    assert run(capsys, "torsion", "stabilizer", "--input", text)[1] == {"order": "3", "index": "216"}
    assert run(capsys, "torsion", "delta", "--input", text)[1]["delta"] == "2"
    assert run(capsys, "torsion", "predict-degree", "--input", text)[1]["exponent"] == "6"
    code, out = run(capsys, "torsion", "pairing", "--ell", "3", "--precision", "2", "--p", "1,0", "--q", "0,1")
    assert out == {"n": "2", "k": "2"}


def test_stdin_input(capsys, monkeypatch):
    import io

    lat = {"ell": 3, "precision": 1, "ambient_rank": 2, "rank": 1,
           "generators": {"ell": 3, "precision": 1, "rows": 2, "cols": 1, "entries": ["3", "0"]}}
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(lat)))
    code, out = run(capsys, "lattice", "saturate", "--input", "-")
    assert code == 0 and out["rank"] == 0


@pytest.mark.parametrize("argv", [
    ["torsion", "type", "--input", "{broken"],
    ["torsion", "type", "--input", "/nonexistent/file.json"],
    ["group", "order", "--family", "sp", "--g", "1", "--ell", "4"],
    ["group", "order", "--family", "xx", "--g", "1", "--ell", "3"],
    ["gamma", "simple", "--g", "0"],
    ["nonsense"],
    ["gamma", "simple"],
])
def test_invalid_input_exit_2(capsys, argv):
    assert cli.run_command(argv) == 2
    capsys.readouterr()


def test_budget_exit_4(capsys):
    code, out = run(capsys, "--budget-log2", "6", "group", "enumerate", "--family", "sp",
                    "--g", "2", "--ell", "3")
    assert code == 4 and out["error"] == "budget exceeded"
    code, _ = run(capsys, "group", "order", "--family", "sp", "--g", "2", "--ell", "3",
                  "--method", "enumerate", "--budget-log2", "6")
    assert code == 4


def test_suite_failure_exit_3(capsys, monkeypatch):
    def broken(cfg, c):
        c.add("forced", {}, 1, 2, False)

    monkeypatch.setitem(suites.SUITES, "orders", broken)
    code, out = run(capsys, "verify", "orders")
    assert code == 3 and out["summary"]["failed"] == "1"


def test_verify_flags_and_json_file(capsys, tmp_path):
    target = tmp_path / "rep.json"
    code = cli.run_command(["--seed", "7", "verify", "abel", "--trials", "40", "--bound", "6",
                            "--json", str(target)])
    assert code == 0 and capsys.readouterr().out == ""
    rep = json.loads(target.read_text())
    assert rep["config"] == {"seed": "7", "trials": "40", "budget_log2": "34", "bound": "6"}
    assert rep["summary"]["failed"] == "0"


def test_reports_deterministic_and_float_free(capsys):
    _, a = run(capsys, "verify", "prop63", "--trials", "30", "--seed", "1")
    _, b = run(capsys, "verify", "prop63", "--trials", "30", "--seed", "1")
    a.pop("header"), b.pop("header")
    assert a == b
    assert [c["id"] for c in a["checks"]] == sorted(c["id"] for c in a["checks"])
    assert all(c["anchor"] for c in a["checks"])
    assert _numbers_are_strings(a)
    _, c = run(capsys, "verify", "prop63", "--trials", "30", "--seed", "2")
    assert c["checks"] != a["checks"]


def test_all_outputs_float_free(capsys):
    for argv in (["gamma", "product", "--factor", "g=2,n=1"], ["group", "enumerate", "--family", "gsp",
                 "--g", "1", "--ell", "2", "--level", "2"], ["exceptional", "--g", "4"]):
        _, out = run(capsys, *argv)
        assert _numbers_are_strings(out), argv
