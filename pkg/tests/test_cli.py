import json
import subprocess
import sys

import networkx as nx
import pytest

from qgraphs import __version__, cli
from qgraphs.errors import InvariantViolation


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_construct_polar(capsys):
    code, out, _ = run(capsys, "construct", "polar", "--q", "2", "--n", "4")
    doc = json.loads(out)
    assert code == 0
    assert doc["num_edges"] == 15 and doc["regularity"]["k"] == 2
    assert doc["tool_version"] == __version__
    assert doc["graph"]["field"] == {"p": 2, "t": 1, "modulus": [1, 1]}


def test_construct_hexagon_graph6(capsys):
    code, out, _ = run(capsys, "construct", "hexagon", "--b", "1", "--export", "graph6")
    g = nx.from_graph6_bytes(out.strip().encode())
    assert code == 0
    assert g.number_of_nodes() == 63 and g.number_of_edges() == 189


def test_construct_empty(capsys):
    code, out, _ = run(capsys, "construct", "empty", "--q", "3", "--n", "5")
    assert code == 0 and json.loads(out)["num_edges"] == 0


def test_construct_edgelist_and_table(capsys):
    _, out, _ = run(capsys, "construct", "complete", "--q", "2", "--n", "3", "--format", "edgelist")
    assert out.count("\n") == 21
    _, out, _ = run(capsys, "construct", "complete", "--q", "2", "--n", "3", "--format", "table")
    assert "7 edges" in out and "k=2" in out


def test_construct_reduced(capsys):
    code, out, _ = run(capsys, "construct", "polar", "--q", "4", "--n", "4", "--reduce-to", "2")
    doc = json.loads(out)
    assert code == 0 and doc["num_edges"] == 2635 and doc["regularity"]["k"] == 5


def test_verify_polar(capsys):
    code, out, _ = run(capsys, "verify", "polar", "--q", "2", "--n", "4", "--group", "sp")
    doc = json.loads(out)
    assert code == 0
    assert doc["regular"] == 2
    assert all(doc[k] for k in ("vertex", "edge", "flag", "symmetric"))
    assert doc["certificates"]["flag"]["orbit_size"] == 45


def test_verify_complete_gamma_l1(capsys):
    _, out, _ = run(capsys, "verify", "complete", "--q", "2", "--n", "5", "--group", "gammal1")
    doc = json.loads(out)
    assert doc["edge"] and not doc["flag"]


def test_verify_interior_spread(capsys):
    argv = ["verify", "spread-interior", "--q", "2", "--n", "6", "--t", "3", "--group", "gammal1",
            "--d", "1", "--e", "0", "--s", "1"]
    _, out, _ = run(capsys, *argv)
    assert json.loads(out)["flag"]


def test_verify_rejects_non_automorphisms(capsys):
    code, _, err = run(capsys, "verify", "polar", "--q", "2", "--n", "4", "--group", "gammal1")
    assert code == 2 and "[0]" in err


def test_scan_sp4(capsys):
    _, out, _ = run(capsys, "scan", "--group", "sp", "--q", "2", "--n", "4")
    doc = json.loads(out)
    assert len(doc["orbits"]) == 2
    assert [o["label"] for o in doc["orbits"]].count("polar") == 1


def test_scan_gamma_l1(capsys):
    _, out, _ = run(capsys, "scan", "--group", "gammal1", "--q", "2", "--n", "6", "--d", "1", "--e", "0", "--s", "1")
    rows = json.loads(out)["orbits"]
    assert any(o["size"] == 63 and o["label"] == "spread-interior" for o in rows)


def test_scan_sp6_heavy(capsys):
    _, out, _ = run(capsys, "scan", "--group", "sp", "--q", "2", "--n", "6", "--heavy")
    rows = json.loads(out)["orbits"]
    polar = [o for o in rows if o["label"] == "polar"]
    assert len(polar) == 1 and polar[0]["k"] == 4


def test_budget_exit_code(capsys):
    code, _, err = run(capsys, "scan", "--group", "sp", "--q", "2", "--n", "14")
    assert code == 3 and "--heavy" in err


def test_validation_exit_code(capsys):
    code, _, _ = run(capsys, "scan", "--group", "gammal1", "--q", "2", "--n", "6", "--d", "2")
    assert code == 2
    code, _, _ = run(capsys, "construct", "polar", "--q", "6", "--n", "4")
    assert code == 2


def test_invariant_exit_code(capsys, monkeypatch):
    def boom(*a, **k):
        raise InvariantViolation("broken")

    monkeypatch.setattr(cli, "single_orbit_scan", boom)
    code, _, _ = run(capsys, "scan", "--group", "sp", "--q", "2", "--n", "4")
    assert code == 4


def test_output_is_byte_identical(capsys):
    argv = ["scan", "--group", "gammal-reduced", "--q", "2", "--n", "6", "--ext", "3"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b


def test_config_file_is_applied_and_echoed(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"q": 3, "n": 4, "group": "sp"}))
    _, out, _ = run(capsys, "scan", "--config", str(cfg))
    doc = json.loads(out)
    assert doc["q"] == 3 and doc["config"]["group"] == "sp" and doc["config"]["q"] == 3


def test_config_file_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"colour": "red"}))
    code, _, err = run(capsys, "scan", "--config", str(cfg))
    assert code == 2 and "colour" in err


def test_output_file(capsys, tmp_path):
    path = tmp_path / "g.json"
    code, out, _ = run(capsys, "construct", "polar", "--q", "3", "--n", "4", "-o", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["num_edges"] == 40


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qgraphs", "construct", "empty", "--q", "2", "--n", "3", "--format", "table"],
        capture_output=True, text=True, check=True,
    )
    assert "0 edges" in proc.stdout
