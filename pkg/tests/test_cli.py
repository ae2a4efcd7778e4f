import json
import subprocess
import sys

import pytest

from graphcx.cli import run


def _json(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_enumerate_theta(capsys):
    code, doc = _json(capsys, ["enumerate", "--vertices", "2", "--edges", "3", "--contractible", "3"])
    assert code == 0
    assert doc["result"]["count"] == 1
    assert doc["result"]["classes"][0]["aut_order"] == 12
    assert doc["version"] and doc["command"] == "enumerate"


def test_enumerate_trees(capsys):
    code, doc = _json(capsys, ["enumerate", "--kind", "trees", "--n", "4", "--flavor", "ribbon"])
    assert code == 0 and doc["result"]["count"] == 11


def test_tree_homology(capsys):
    code, doc = _json(capsys, ["tree-homology", "--operad", "comm", "--n", "4"])
    assert code == 0 and doc["result"]["concentrated"]
    assert [r["dim_H"] for r in doc["result"]["homology"]] == [0, 0, 6]


def test_graph_homology_outputs(tmp_path, capsys):
    code, doc = _json(capsys, ["graph-homology", "--operad", "comm", "--b1", "2", "--out", str(tmp_path)])
    assert code == 0
    for ext in ("json", "tsv", "png"):
        assert (tmp_path / f"graph-homology.{ext}").stat().st_size > 0
    tsv = (tmp_path / "graph-homology.tsv").read_text().splitlines()
    assert tsv[0].split("\t") == ["degree", "dim_C", "dim_H", "rank_d"]
    assert json.loads((tmp_path / "graph-homology.json").read_text()) == doc


def test_output_is_deterministic(capsys):
    argv = ["quotient-operad", "--operad", "ass", "--max-arity", "4"]
    run(argv)
    first = capsys.readouterr().out
    run(argv)
    assert capsys.readouterr().out == first
    assert [r["quotient"] for r in json.loads(first)["result"]["dims"]] == [1, 2, 6]


def test_statesum_and_prime_guard(capsys):
    code, doc = _json(capsys, ["statesum", "--operad", "ass", "--algebra", "m2", "--b1", "2"])
    assert code == 0 and doc["result"]["all_cycles"]
    assert run(["statesum", "--b1", "2", "--field", "3"]) == 1
    assert "divides" in capsys.readouterr().err


def test_statesum_comm_uses_commutator(capsys):
    code, doc = _json(capsys, ["statesum", "--operad", "comm", "--algebra", "kz2", "--b1", "2"])
    assert code == 0 and doc["result"]["algebra"] == "[kz2]"


def test_deform(capsys):
    code, doc = _json(capsys, ["deform", "--algebra", "kz2", "--b1", "1", "--legs", "3"])
    assert code == 0 and doc["result"]["kernel_dim"] == 1 and doc["result"]["all_cycles_mod_t2"]
    code, doc = _json(capsys, ["deform", "--algebra", "kz2", "--b1", "1", "--legs", "3", "--perturb"])
    assert code == 3 and not doc["result"]["all_cycles_mod_t2"]


def test_cache_roundtrip_and_corruption(tmp_path, capsys):
    cache = tmp_path / "cache"
    argv = ["graph-homology", "--operad", "ass", "--b1", "2", "--cache", str(cache)]
    run(argv)
    first = capsys.readouterr().out
    files = list(cache.glob("*.json"))
    assert len(files) == 1
    run(argv)
    assert capsys.readouterr().out == first
    files[0].write_text(files[0].read_text().replace('"dim_H": 2', '"dim_H": 3'))
    assert run(argv) == 1
    assert "hash mismatch" in capsys.readouterr().err


def test_cache_from_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("GRAPHCX_CACHE", str(tmp_path))
    run(["tree-homology", "--n", "3"])
    capsys.readouterr()
    assert list(tmp_path.glob("*.json"))


def test_check_command(capsys):
    code, doc = _json(capsys, ["check", "--max-n", "3", "--max-b1", "1"])
    assert code == 0 and doc["result"]["all_ok"]


def test_table_format(capsys):
    run(["tree-homology", "--n", "3", "--format", "table"])
    assert capsys.readouterr().out.splitlines()[0].split() == ["degree", "dim_C", "dim_H", "rank_d"]


def test_truncation_error(capsys):
    assert run(["graph-homology", "--operad", "lie", "--b1", "3"]) == 1
    assert "truncated" in capsys.readouterr().err


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "graphcx.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and "graphcx" in r.stdout
