import io
import json
import subprocess
import sys

import pytest

from qpatterns.cli import EXIT_FLAGGED, EXIT_INVALID, EXIT_OK, execute

BELL = '{"num_qubits":2,"ops":[{"kind":"H","target":0},{"kind":"X","target":1,"controls":[0]}]}'
QUBO = '{"linear":[12,1,-15],"quadratic":[[0,1,3],[1,2,-9]]}'


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = execute(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_simulate_exact_text():
    code, out, _ = call("simulate", "--circuit", BELL)
    assert code == EXIT_OK
    assert "# exact" in out
    rows = [line.split() for line in out.splitlines() if line.startswith(("00", "11"))]
    assert [r[0] for r in rows] == ["00", "11"]
    assert all(float(r[1]) == pytest.approx(0.5) for r in rows)


def test_simulate_shots_csv():
    code, out, _ = call("simulate", "--circuit", BELL, "--shots", "1000", "--seed", "1", "--format", "csv")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "label,probability,count"
    counts = {r.split(",")[0]: int(r.split(",")[2]) for r in lines[1:]}
    assert set(counts) == {"00", "11"} and sum(counts.values()) == 1000


def test_same_seed_same_bytes():
    args = ("simulate", "--circuit", BELL, "--shots", "200", "--seed", "9", "--format", "json")
    assert call(*args)[1] == call(*args)[1]


def test_seed_from_environment(monkeypatch):
    args = ("simulate", "--circuit", BELL, "--shots", "50", "--format", "csv")
    monkeypatch.setenv("QDICT_SEED", "4")
    env_out = call(*args)[1]
    assert env_out == call(*args, "--seed", "4")[1]
    monkeypatch.delenv("QDICT_SEED")
    code, _, err = call(*args)
    assert code == EXIT_INVALID and "seed" in err
    monkeypatch.setenv("QDICT_SEED", "abc")
    code, _, err = call(*args)
    assert code == EXIT_INVALID and "QDICT_SEED" in err


def test_pe_json():
    code, out, _ = call("pe", "--p", "5.7", "--control", "3", "--format", "json")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["command"] == "pe"
    probs = {e["label"]: e["probability"] for e in doc["histogram"]["entries"]}
    assert max(probs, key=probs.get) == "110"


def test_grover_default_iterations():
    code, out, _ = call("grover", "--width", "3", "--marked", "101", "--format", "json")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["summary"]["iterations"] == 2
    probs = {e["label"]: e["probability"] for e in doc["histogram"]["entries"]}
    assert probs["101"] == pytest.approx(0.9453125)


def test_count_resolved_and_unresolved():
    code, out, _ = call("count", "--width", "3", "--control", "4", "--format", "json")
    assert code == EXIT_OK and json.loads(out)["summary"]["estimated_count"] == 4
    code, out, _ = call("count", "--width", "3", "--control", "2", "--oracle", "set", "--labels", "1")
    assert code == EXIT_FLAGGED and "resolved: false" in out


def test_qdict_encode_annotates_values():
    code, out, _ = call("qdict-encode", "--poly", QUBO, "--value-width", "6")
    assert code == EXIT_OK
    assert "key=1 value=49 signed=-15" in out


def test_qdict_lookup():
    code, out, _ = call("qdict-lookup", "--inputs", "12,3,-1", "--value-width", "5", "--key", "111",
                        "--format", "json")
    doc = json.loads(out)
    top = max(doc["histogram"]["entries"], key=lambda e: e["probability"])
    assert code == EXIT_OK and top["label"] == "111|01110"


def test_qdict_counts():
    code, out, _ = call("qdict-count-eq", "--inputs", "1,0,2,-1", "--value-width", "5", "--target", "0",
                        "--control", "5", "--format", "json")
    assert code == EXIT_OK and json.loads(out)["summary"]["estimated_count"] == 4
    code, out, _ = call("qdict-count-lt", "--poly", QUBO, "--value-width", "6", "--threshold", "-15",
                        "--control", "4", "--format", "json")
    assert code == EXIT_OK and json.loads(out)["summary"]["estimated_count"] == 1


def test_qubo_min():
    code, out, _ = call("qubo-min", "--poly", QUBO, "--value-width", "6", "--control", "4", "--seed", "7",
                        "--format", "json")
    s = json.loads(out)["summary"]
    assert code == EXIT_OK and s["minimum"] == -23 and s["key"] == "011"
    code, out, _ = call("qubo-min", "--poly", QUBO, "--value-width", "6", "--control", "4", "--seed", "7",
                        "--max-attempts", "0")
    assert code == EXIT_FLAGGED and "capped: true" in out
    code, _, err = call("qubo-min", "--poly", QUBO, "--value-width", "6", "--control", "4")
    assert code == EXIT_INVALID and "seed" in err


def test_subset_sum_and_fibonacci():
    code, out, _ = call("subset-sum", "--set", "1,0,2,-1", "--value-width", "5", "--control", "5",
                        "--format", "json")
    assert code == EXIT_OK and json.loads(out)["summary"]["estimated_count"] == 4
    code, out, _ = call("subset-sum", "--set", "1,0,2,-1", "--value-width", "5", "--control", "5",
                        "--mode", "negative", "--format", "json")
    assert json.loads(out)["summary"]["estimated_count"] == 2
    code, out, _ = call("fibonacci", "--n", "3", "--control", "5", "--format", "json")
    assert code == EXIT_OK and json.loads(out)["summary"]["estimated_count"] == 5


def test_dist():
    code, out, _ = call("dist", "--kind", "binomial", "--key-width", "2", "--value-width", "2",
                        "--format", "json")
    probs = {e["label"]: e["probability"] for e in json.loads(out)["histogram"]["entries"]}
    assert code == EXIT_OK and probs == pytest.approx({"00": 0.25, "01": 0.5, "10": 0.25})
    code, _, err = call("dist", "--kind", "poisson", "--key-width", "3", "--value-width", "3")
    assert code == EXIT_INVALID and "lam" in err


@pytest.mark.parametrize("argv,field", [
    (["simulate", "--circuit", '{"ops":[]}'], "num_qubits"),
    (["simulate", "--circuit", "{"], "circuit"),
    (["simulate", "--circuit", "/no/such/file.json"], "circuit"),
    (["pe", "--p", "1", "--control", "0"], "control"),
    (["grover", "--width", "2", "--marked", "111"], "marked"),
    (["qdict-encode", "--table", "1,2,3", "--value-width", "3"], "table"),
    (["qdict-encode", "--table", "1,2", "--value-width", "3", "--inputs", "1"], "source"),
    (["qdict-encode", "--table", "1,2"], "value_width"),
    (["qdict-encode", "--dict", '{"key_width":1,"value_width":3,"source":{"type":"cubic"}}'], "source.type"),
    (["simulate", "--circuit", BELL, "--shots", "0", "--seed", "1"], "shots"),
    (["nosuch"], "nosuch"),
    ([], "command"),
])
def test_invalid_input_names_field(argv, field):
    code, out, err = call(*argv)
    assert code == EXIT_INVALID and out == ""
    assert err.startswith("error:") and field in err
    assert len(err.strip().splitlines()) == 1


def test_output_file(tmp_path):
    target = tmp_path / "bell.svg"
    code, out, _ = call("simulate", "--circuit", BELL, "--format", "svg", "--output", str(target))
    assert code == EXIT_OK and out == ""
    assert target.read_text().startswith("<svg")


def test_circuit_from_file(tmp_path):
    path = tmp_path / "bell.json"
    path.write_text(BELL)
    assert call("simulate", "--circuit", str(path))[1] == call("simulate", "--circuit", BELL)[1]


def test_complex_view():
    code, out, _ = call("simulate", "--circuit", BELL, "--complex")
    assert code == EXIT_OK and "→" in out


def test_counting_svg_draws_control_histogram():
    code, out, _ = call("fibonacci", "--n", "2", "--control", "4", "--format", "svg")
    assert code == EXIT_OK and out.startswith("<svg") and out.rstrip().endswith("</svg>")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qpatterns", "pe", "--p", "5", "--control", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "101" in proc.stdout
