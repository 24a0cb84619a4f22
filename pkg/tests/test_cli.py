from __future__ import annotations

import json

import pytest

from detour.cli import main
from detour.graph import is_path, parse_graph


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def doc(out):
    return json.loads(out)


@pytest.fixture
def c6(tmp_path, capsys):
    f = tmp_path / "c6.txt"
    assert run(capsys, "gen", "cycle", "--n", 6, "-o", f)[0] == 0
    return f


def test_gen_round_trip(tmp_path, capsys):
    f = tmp_path / "k4.txt"
    assert run(capsys, "gen", "k4", "--counts", "1,1,1,1,1,1", "-o", f)[0] == 0
    g = parse_graph(f.read_text())
    assert (g.n, g.m) == (10, 12)
    code, out, _ = run(capsys, "gen", "k4", "--counts", "1,1,1,1,1,1")
    assert code == 0 and parse_graph(out) == g


def test_longest_detour(c6, capsys):
    code, out, _ = run(capsys, "longest-detour", c6, "--s", 0, "--t", 1, "--k", 4)
    d = doc(out)
    assert code == 0 and d["answer"] == "yes" and d["schema"] == 1 and len(d["witness"]) == 6
    code, out, _ = run(capsys, "longest-detour", c6, "--s", 0, "--t", 1, "--k", 5)
    assert code == 1 and doc(out)["answer"] == "no"


def test_exact_detour_and_path(c6, capsys):
    code, out, _ = run(capsys, "exact-detour", c6, "--s", 0, "--t", 1, "--k", 4)
    assert code == 0 and doc(out)["stats"]["max_query_len"] <= 9
    assert run(capsys, "exact-detour", c6, "--s", 0, "--t", 1, "--k", 2)[0] == 1
    code, out, _ = run(capsys, "exact-path", c6, "--s", 0, "--t", 1, "--len", 5)
    g = parse_graph(c6.read_text())
    assert code == 0 and is_path(g, tuple(doc(out)["witness"]), 0, 1)
    assert run(capsys, "exact-path", c6, "--s", 0, "--t", 1, "--len", 3)[0] == 1


def test_output_is_reproducible(c6, capsys):
    outs = []
    for _ in range(2):
        _, out, _ = run(capsys, "exact-detour", c6, "--s", 0, "--t", 3, "--k", 2, "--fallback-threshold", 0, "--seed", 5)
        d = doc(out)
        d["stats"].pop("elapsed_ms")
        outs.append(json.dumps(d, sort_keys=True))
    assert outs[0] == outs[1]


def test_find_path_and_oracle(c6, capsys):
    code, out, _ = run(capsys, "find-path", c6, "--s", 0, "--t", 1, "--k", 4)
    d = doc(out)
    assert code == 0 and d["witness"] == [0, 5, 4, 3, 2, 1] and d["stats"]["decision_calls"] <= 7
    code, out, _ = run(capsys, "oracle", c6, "--s", 0, "--t", 1)
    assert code == 0 and doc(out)["lengths"] == [1, 5]


def test_gate_override_label(c6, capsys):
    code, out, _ = run(capsys, "longest-detour", c6, "--s", 0, "--t", 1, "--k", 1, "--gate-override", 0)
    d = doc(out)
    assert code == 0 and d["gate_override"] is True and d["label"] == "unsound_gate"


def test_treewidth_and_relevant_part(c6, tmp_path, capsys):
    td = tmp_path / "c6.td"
    code, out, _ = run(capsys, "treewidth", c6, "--td-out", td)
    assert code == 0 and doc(out)["width"] == 2
    assert run(capsys, "treewidth", c6, "--validate", td)[0] == 0
    code, out, _ = run(capsys, "relevant-part", c6, "--s", 0, "--t", 1)
    assert code == 0 and doc(out)["n"] == 6


@pytest.mark.parametrize("case", ["a", "b", "c"])
def test_verify_cert(case, capsys):
    code, out, _ = run(capsys, "verify-cert", "--case", case)
    assert code == 0 and doc(out)["objective"] == "-2" and doc(out)["valid"]


def test_deterministic_refuses_large_graphs(tmp_path, capsys):
    f = tmp_path / "big.txt"
    run(capsys, "gen", "cycle", "--n", 21, "-o", f)
    code, _, err = run(capsys, "exact-detour", f, "--s", 0, "--t", 1, "--k", 1, "--deterministic")
    assert code == 2 and err


def test_input_errors(tmp_path, capsys):
    f = tmp_path / "bad.txt"
    f.write_text("3 2 undirected\n0 1\n1 7\n")
    code, out, err = run(capsys, "longest-detour", f, "--s", 0, "--t", 1, "--k", 1)
    assert code == 2 and not out and "error" in err
    assert run(capsys, "longest-detour", tmp_path / "missing.txt", "--s", 0, "--t", 1, "--k", 1)[0] == 2
    assert run(capsys, "longest-detour", f, "--s", 0, "--t", 1, "--k", -1)[0] == 2
    assert run(capsys, "bogus")[0] == 2
