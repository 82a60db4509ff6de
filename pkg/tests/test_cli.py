import json
import math
import subprocess
import sys

import numpy as np
import pytest

from conftest import FIXTURES
from hitwalk import __version__
from hitwalk import graphs as G
from hitwalk.cli import main
from hitwalk.errors import NoConvergence
from hitwalk.numerics import perron
from hitwalk.partitions import hit_quotient
from hitwalk.schemes import hamming_scheme, hit_t_distance_regular
from hitwalk.walks import hit_full, hit_monte_carlo


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, json.loads(out)


@pytest.fixture
def files(tmp_path, capsys):
    paths = {name: tmp_path / name for name in ("c5.json", "q3.txt", "q3.json", "wheel6.json", "k4.json",
                                                  "star.json", "cone4.json")}
    assert run(capsys, "gen", "cycle", 5, "-o", paths["c5.json"])[0] == 0
    assert run(capsys, "gen", "hypercube", 3, "-o", paths["q3.txt"])[0] == 0
    assert run(capsys, "gen", "hypercube", 3, "-o", paths["q3.json"])[0] == 0
    assert run(capsys, "gen", "cone", "--base", paths["c5.json"], "-o", paths["wheel6.json"])[0] == 0
    assert run(capsys, "gen", "complete", 4, "-o", paths["k4.json"])[0] == 0
    assert run(capsys, "gen", "star", 3, "-o", paths["star.json"])[0] == 0
    G.write_graph(G.cone(G.cycle(4)), paths["cone4.json"])
    return paths


def test_gen(files):
    assert G.read_graph(files["c5.json"]) == G.cycle(5)
    assert G.read_graph(files["q3.txt"]) == G.hypercube(3)
    assert files["q3.txt"].read_text().startswith("n 8")
    assert G.read_graph(files["wheel6.json"]) == G.wheel(5)


def test_gen_stdout_and_random(capsys):
    code, out = run(capsys, "gen", "random", 10, 0.3, "--seed", 4)
    assert code == 0 and out["run"]["seed"] == 4
    assert G.from_dict(out["result"]["graph"]) == G.random_connected(10, 0.3, 4)


def test_hit_quotient_q3(files, capsys):
    code, out = run(capsys, "hit", files["q3.json"], "--target", 0, "--method", "quotient")
    assert code == 0
    res = out["result"]
    assert res["times"][7] == pytest.approx(10, abs=1e-12)
    assert res["partition"]["blocks"] == [[0], [1, 2, 4], [3, 5, 6], [7]]
    assert "column-stochastic" in res["convention"]
    assert res["times"] == hit_quotient(G.hypercube(3), 0).times.tolist()


def test_hit_wheel_merw(files, capsys):
    code, out = run(capsys, "hit", files["wheel6.json"], "--target", 5, "--walk", "merw")
    lam = 1 + math.sqrt(6)
    assert out["result"]["times"][0] == pytest.approx(lam**2 / 5, abs=1e-12)
    g = G.wheel(5)
    assert out["result"]["times"] == hit_full(g, 5, "merw", perron(g)).times.tolist()


def test_hit_mc(files, capsys):
    code, out = run(capsys, "hit", files["c5.json"], "--target", 0, "--source", 1, "--method", "mc",
                    "--samples", 100000, "--seed", 7)
    res = out["result"]
    assert abs(res["value"] - 4) <= 4 * res["stderr"]
    lib = hit_monte_carlo(G.cycle(5), 0, 1, samples=100000, seed=7)
    assert res["value"] == lib.value and res["stderr"] == lib.stderr
    assert out["run"]["seed"] == 7


def test_methods_agree(files, capsys):
    for walk in ("simple", "merw"):
        full = run(capsys, "hit", files["wheel6.json"], "--target", 0, "--walk", walk)[1]["result"]["times"]
        quot = run(capsys, "hit", files["wheel6.json"], "--target", 0, "--walk", walk,
                   "--method", "quotient")[1]["result"]["times"]
        assert np.abs(np.array(full) - quot).max() <= 1e-8


def test_deterministic_payloads(files, capsys):
    a = run(capsys, "hit", files["q3.json"], "--target", 3, "--walk", "merw")[1]
    b = run(capsys, "hit", files["q3.json"], "--target", 3, "--walk", "merw")[1]
    assert a["result"] == b["result"]
    assert a["run"]["inputs"] == b["run"]["inputs"] and a["run"]["version"] == __version__


def test_verify_suite(capsys):
    code, out = run(capsys, "verify", "--suite", "families", "--checks", "dbrgHT")
    assert code == 0 and out["result"]["status"] == "pass"
    assert out["result"]["summary"][0]["max_residual"] < 1e-8


def test_verify_k4(files, capsys):
    code, out = run(capsys, "verify", files["k4.json"], "--checks", "genR")
    assert code == 0
    assert out["result"]["results"][0]["value"] == 3


def test_verify_broken(capsys):
    code, out = run(capsys, "verify", FIXTURES / "broken.json", "--checks", "stabHt")
    assert code == 3
    assert out["result"]["status"] == "fail"
    assert "witness" in out["result"]["results"][0]


def test_partition_command(files, capsys):
    code, out = run(capsys, "partition", files["q3.json"], "--center", 0)
    assert out["result"]["quotient"]["matrix"] == [[0, 1, 0, 0], [3, 0, 2, 0], [0, 2, 0, 3], [0, 0, 1, 0]]
    code, out = run(capsys, "partition", files["star.json"], "--center", 0)
    assert len(out["result"]["partition"]["blocks"]) == 2
    code, out = run(capsys, "partition", files["cone4.json"], "--center", 4, "--kind", "weight")
    assert np.allclose(out["result"]["column_sums"], 1 + math.sqrt(5), atol=1e-12)


def test_scheme_command(tmp_path, capsys):
    code, out = run(capsys, "scheme", "--catalog", "trivial", 7, "--relation", 1, "--start", 1)
    assert out["result"]["value"] == pytest.approx(6) and out["result"]["adjacent"] == 6
    path = tmp_path / "q3s.json"
    path.write_text(json.dumps(hamming_scheme(3).to_dict()))
    code, out = run(capsys, "scheme", path, "--relation", 1, "--start", 3)
    assert out["result"]["value"] == pytest.approx(10, abs=1e-12)
    code, out = run(capsys, "scheme", path, "--union", "1,2", "--start", 3)
    assert out["result"]["value"] == hit_t_distance_regular(hamming_scheme(3), [1, 2], 3)


def test_invalid_scheme_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"relations": [np.eye(5, dtype=int).tolist(), G.cycle(5).adj.astype(int).tolist()]}))
    code, out = run(capsys, "scheme", path, "--relation", 1, "--start", 1)
    assert code == 3 and out["result"]["witness"]["axiom"] == "partition"


@pytest.mark.parametrize("argv, code", [
    (["hit", "missing.json", "--target", 0], 2),
    (["gen", "cycle", 2], 2),
    (["gen", "nope", 2], 2),
    (["scheme", "--catalog", "hamming", 2, "--relation", 2, "--start", 2], 2),
    (["verify", "--checks", "genR"], 2),
])
def test_error_exit_codes(capsys, argv, code):
    rc, out = run(capsys, *argv)
    assert rc == code
    assert out["error"]["exit_code"] == code


def test_numerical_failure_exit_code(files, capsys, monkeypatch):
    import hitwalk.cli

    def fail(_):
        raise NoConvergence("forced")

    monkeypatch.setattr(hitwalk.cli, "perron", fail)
    rc, out = run(capsys, "hit", files["c5.json"], "--target", 0, "--walk", "merw")
    assert rc == 4 and out["error"]["type"] == "NoConvergence"


def test_subprocess_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "hitwalk", "hit", str(files["c5.json"]), "--target", "9"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert json.loads(proc.stdout)["error"]["type"] == "IndexOutOfRange"
    assert "hitwalk:" in proc.stderr
