import json
import re
import subprocess
import sys


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "clupart", *args],
                          capture_output=True, text=True)


def gen(tmp_path, name, *args):
    path = tmp_path / name
    r = run_cli("generate", "--output", str(path), *args)
    assert r.returncode == 0, r.stderr
    return path


def test_generate_partition_evaluate_pipeline(tmp_path):
    graph = gen(tmp_path, "cliques.graph", "--model", "disjoint_cliques",
                "--cliques", "12", "--size", "5")
    r = run_cli("partition", str(graph), "--k", "4", "--seed", "1")
    assert r.returncode == 0, r.stderr
    assert f"partition written to {graph}.part.4" in r.stdout
    best = int(re.search(r"best cut (\d+)", r.stdout).group(1))

    e = run_cli("evaluate", str(graph), f"{graph}.part.4")
    assert e.returncode == 0, e.stderr
    assert f"cut {best}" in e.stdout
    assert "feasible yes" in e.stdout


def test_partition_small_path_exact_cut(tmp_path):
    graph = gen(tmp_path, "p4.graph", "--model", "path", "--n", "4")
    r = run_cli("partition", str(graph), "--k", "2", "--imbalance", "0")
    assert r.returncode == 0, r.stderr
    assert "best cut 1" in r.stdout
    labels = (tmp_path / "p4.graph.part.2").read_text().split()
    assert len(labels) == 4
    assert set(labels) <= {"0", "1"}


def test_partition_repeat_reports_each_run(tmp_path):
    graph = gen(tmp_path, "pa.graph", "--model", "pa", "--n", "400",
                "--deg", "3", "--seed", "5")
    out = tmp_path / "pa.part"
    payload_path = tmp_path / "report.json"
    r = run_cli("partition", str(graph), "--k", "4", "--repeat", "3",
                "--output", str(out), "--json-out", str(payload_path))
    assert r.returncode == 0, r.stderr
    cuts = [int(m) for m in re.findall(r"run \d+: cut=(\d+)", r.stdout)]
    assert len(cuts) == 3
    best = int(re.search(r"best cut (\d+)", r.stdout).group(1))
    assert best == min(cuts)
    assert out.exists()

    payload = json.loads(payload_path.read_text())
    assert payload["best_cut"] == best
    assert payload["output"] == str(out)
    assert len(payload["runs"]) == 3
    assert payload["average_cut"] == sum(cuts) / 3


def test_evaluate_rejects_length_mismatch(tmp_path):
    graph = gen(tmp_path, "p4.graph", "--model", "path", "--n", "4")
    part = tmp_path / "short.part"
    part.write_text("0\n1\n0\n")
    r = run_cli("evaluate", str(graph), str(part))
    assert r.returncode == 1
    assert r.stderr.startswith("error:")
    assert "entries" in r.stderr


def test_evaluate_rejects_block_id_out_of_range(tmp_path):
    graph = gen(tmp_path, "p4.graph", "--model", "path", "--n", "4")
    part = tmp_path / "wild.part"
    part.write_text("0\n5\n0\n1\n")
    r = run_cli("evaluate", str(graph), str(part), "--k", "2")
    assert r.returncode == 1
    assert "outside" in r.stderr


def test_generate_is_byte_deterministic(tmp_path):
    a = gen(tmp_path, "a.graph", "--model", "pa", "--n", "300",
            "--deg", "3", "--seed", "9")
    b = gen(tmp_path, "b.graph", "--model", "pa", "--n", "300",
            "--deg", "3", "--seed", "9")
    assert a.read_bytes() == b.read_bytes()


def test_unknown_preset_fails_cleanly(tmp_path):
    graph = gen(tmp_path, "p4.graph", "--model", "path", "--n", "4")
    r = run_cli("partition", str(graph), "--k", "2", "--preset", "turbo")
    assert r.returncode == 1
    assert "unknown preset" in r.stderr


def test_malformed_graph_fails_cleanly(tmp_path):
    bad = tmp_path / "bad.graph"
    bad.write_text("not a header\n")
    r = run_cli("partition", str(bad), "--k", "2")
    assert r.returncode == 1
    assert r.stderr.startswith("error:")
