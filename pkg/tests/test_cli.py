import json
import subprocess
import sys

import pytest

from letq.cli import DEFAULT_SEED, main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_gen_edge_list(capsys):
    code, out, _ = run(capsys, "gen", "--family", "letq", "-s", 1, "-t", 1, "--format", "edge-list")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 8 and lines == sorted(lines)
    assert lines[0] == "000 001"


def test_gen_ltq_json(capsys):
    code, doc = run_json(capsys, "gen", "--family", "ltq", "-n", 3, "--format", "json")
    assert code == 0
    assert len(doc["vertices"]) == 8 and len(doc["edges"]) == 12


def test_gen_dot_parses(capsys):
    pydot = pytest.importorskip("pydot")
    code, out, _ = run(capsys, "gen", "-s", 1, "-t", 2, "--format", "dot", "--clusters")
    assert code == 0
    (graph,) = pydot.graph_from_dot_data(out)
    assert len(graph.get_edges()) == 20
    assert len(graph.get_subgraphs()) == 4 + 2


def test_gen_output_file_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(capsys, "gen", "-s", 2, "-t", 2, "--format", "json", "--output", path)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_props_pass(capsys):
    code, out, _ = run(capsys, "props", "-s", 2, "-t", 2)
    assert code == 0 and "all checks passed" in out


def test_props_reports_cycle(capsys):
    code, out, _ = run(capsys, "props", "-s", 1, "-t", 1)
    assert code == 0 and "8-cycle" in out


def test_props_negative_control(tmp_path, capsys):
    _, edges, _ = run(capsys, "gen", "-s", 1, "-t", 2)
    lines = edges.splitlines()
    # drop one edge and rewire it to a non-neighbour
    lines[0] = "0000 0110"
    bad = tmp_path / "bad.txt"
    bad.write_text("\n".join(lines) + "\n")
    code, doc = run_json(capsys, "props", "-s", 1, "-t", 2, "--edge-list", bad, "--format", "json")
    assert code == 1 and not doc["passed"]
    failed = {c["name"] for c in doc["checks"] if not c["passed"]}
    assert "degree-law" in failed or "cross-matching" in failed


def test_props_interior_coordinate_named(capsys):
    code, out, _ = run(capsys, "props", "-s", 1, "-t", 3)
    assert code == 1
    assert "FAIL  decomposition[b1]" in out


@pytest.mark.parametrize("s,t,g,want", [(1, 2, 1, 2), (2, 2, 0, 3)])
def test_kappa(capsys, s, t, g, want):
    code, doc = run_json(capsys, "kappa", "-s", s, "-t", t, "-g", g)
    assert code == 0
    assert doc["formula"] == doc["certified"] == want


def test_kappa_budget_partial(capsys):
    code, doc = run_json(capsys, "kappa", "-s", 2, "-t", 3, "-g", 2, "--budget", 500)
    assert code == 3 and doc["partial"] and doc["certified"] is None


def test_kappa_budget_from_env(capsys, monkeypatch):
    monkeypatch.setenv("LETQ_BUDGET", "500")
    code, doc = run_json(capsys, "kappa", "-s", 2, "-t", 3, "-g", 2)
    assert code == 3 and doc["partial"]


def test_kappa_swapped_input(capsys):
    code, doc = run_json(capsys, "kappa", "-s", 2, "-t", 1, "-g", 1)
    assert code == 0
    assert doc["normalized_from"] == [2, 1] and (doc["s"], doc["t"]) == (1, 2)
    assert len(doc["relabeling"]) == 16


def test_faultset(capsys):
    code, doc = run_json(capsys, "faultset", "-s", 2, "-t", 3, "-g", 1)
    assert code == 0
    assert doc["sizes"] == {"A": 2, "F1": 4, "F2": 6}
    assert doc["measured_levels"]["F2"] >= doc["claimed_levels"]["F2"]


def test_faultset_text(capsys):
    code, out, _ = run(capsys, "faultset", "-s", 1, "-t", 1, "-g", 0, "--format", "text", "--which", "F2")
    assert code == 0 and out.split() == ["000", "001", "100"]


def test_faultset_level_shortfall_exits_1(capsys):
    code, doc = run_json(capsys, "faultset", "-s", 3, "-t", 3, "-g", 1)
    assert code == 1 and doc["measured_levels"]["F2"] == 1


def test_distinguish(capsys, tmp_path):
    f = tmp_path / "f1.txt"
    f.write_text("000\n110\n")
    code, doc = run_json(capsys, "distinguish", "-s", 1, "-t", 1, "--model", "mm", "--f1", f"@{f}", "--f2", "101,011")
    assert code == 0 and doc["verdict"] == "indistinguishable"
    code, doc = run_json(capsys, "distinguish", "-s", 1, "-t", 1, "--f1", "000", "--f2", "001")
    assert doc["verdict"] == "distinguishable" and doc["condition"] == 1


@pytest.mark.parametrize("args,t", [
    (["-s", 1, "-t", 1, "-g", 1, "--model", "pmc"], 3),
    (["-s", 1, "-t", 1, "-g", 0, "--model", "mm"], 1),
])
def test_verify_tg_exhaustive(capsys, args, t):
    code, doc = run_json(capsys, "verify-tg", *args, "--mode", "exhaustive")
    assert code == 0 and doc["verdict"] == "pass" and doc["claimed_tg"] == t


def test_verify_tg_sampled(capsys):
    code, doc = run_json(capsys, "verify-tg", "-s", 2, "-t", 2, "-g", 1, "--model", "mm",
                         "--mode", "sampled", "--n", 5000, "--seed", 7)
    assert code == 0 and doc["verdict"] == "pass" and doc["witness_indistinguishable"]
    assert len(doc["witness_pair"]["F2"]) == 5 and doc["seed"] == 7


def test_verify_tg_exhaustive_too_large(capsys):
    code, doc = run_json(capsys, "verify-tg", "-s", 2, "-t", 2, "-g", 1)
    assert code == 3 and doc["partial"]


def test_simulate_unique(capsys):
    code, doc = run_json(capsys, "simulate", "-s", 1, "-t", 1, "--model", "pmc", "--fault", "000,001", "-g", 1, "-T", 3)
    assert code == 0 and doc["status"] == "unique" and doc["correct"]
    assert doc["policy"] == f"random:{DEFAULT_SEED}"


def test_simulate_empty(capsys):
    code, doc = run_json(capsys, "simulate", "-s", 1, "-t", 1, "-g", 1)
    assert code == 0 and doc["candidates"] == [[]]


def test_simulate_ambiguous(capsys):
    code, doc = run_json(capsys, "simulate", "-s", 1, "-t", 1, "--model", "mm", "--fault", "000,110",
                         "-g", 1, "-T", 2, "--policy", "zeros")
    assert code == 1 and doc["status"] == "ambiguous" and len(doc["candidates"]) == 2


def test_simulate_random_fault(capsys):
    code, doc = run_json(capsys, "simulate", "-s", 1, "-t", 2, "--random-fault", 2, "-g", 1, "--seed", 3)
    assert code == 0 and len(doc["injected"]) == 2 and doc["injected_is_good_neighbor"]


def test_simulate_fault_file(capsys, tmp_path):
    f = tmp_path / "faults.txt"
    f.write_text("# injected\n000\n001\n")
    code, doc = run_json(capsys, "simulate", "-s", 1, "-t", 1, "--fault-file", f, "-g", 1, "-T", 3)
    assert code == 0 and doc["injected"] == ["000", "001"]


@pytest.mark.parametrize("argv", [
    ["simulate", "-s", 1, "-t", 1, "--fault", "999"],
    ["simulate", "-s", 1, "-t", 1, "--fault-file", "/nonexistent/file"],
    ["kappa", "-s", 0, "-t", 1],
    ["faultset", "-s", 1, "-t", 2, "-g", 2],
    ["gen", "--family", "ltq"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify-tg", "-s", "1"])
    assert exc.value.code == 2


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "letq.cli", "gen", "-s", "1", "-t", "1"],
                          capture_output=True, text=True, check=True)
    assert len(proc.stdout.splitlines()) == 8
