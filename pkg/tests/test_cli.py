import csv
import io
import json
import math
import subprocess
import sys

import pytest

from hyperlab.cli import main


def table(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))


def call(capsys, *argv) -> tuple[int, list[dict], str]:
    code = main(list(argv))
    out = capsys.readouterr()
    return code, table(out.out), out.err


def test_gromov(capsys):
    code, rows, _ = call(capsys, "gromov", "+ab", "+aB")
    assert code == 0 and rows[0]["lower"] == rows[0]["upper"] == "1"


def test_busemann_tree_and_matrix(capsys):
    code, rows, _ = call(capsys, "busemann", "--gamma", "a", "--x", "+a", "--convention", "direct")
    assert code == 0 and rows[0]["oracle"] == "1" and rows[0]["lower"] == "1"
    code, rows, _ = call(capsys, "busemann", "--model", "schottky", "--gamma", "[[2,0],[0,0.5]]",
                         "--x", "ray:inf", "--convention", "direct")
    assert code == 0 and float(rows[0]["lower"]) == pytest.approx(math.log(4))


def test_length_and_spectrum(capsys):
    code, rows, _ = call(capsys, "length", "--gamma", "a(ab)^5")
    assert code == 0 and rows[0]["upper"] == "11"
    code, rows, _ = call(capsys, "spectrum", "--radius", "2")
    assert code == 0 and len(rows) == 17


def test_compare_word_metrics(capsys):
    code, rows, _ = call(capsys, "compare", "--words", "a,b")
    assert code == 0
    b = next(r for r in rows if r["word"] == "b")
    assert (b["value_a"], b["value_b"]) == ("1", "2")


def test_rigid_set_writes_sidecar(capsys, tmp_path):
    code, rows, _ = call(capsys, "rigid-set", "--gamma", "ab", "--out", str(tmp_path))
    assert code == 0 and rows[0]["word"] == "BA"
    side = json.loads((tmp_path / "rigid-set.json").read_text())
    assert side["sparsity_passed"] is True and side["gamma"] == "ab"


def test_filling_distance(capsys):
    code, rows, _ = call(capsys, "filling-distance", "--p", "e", "--q", "abab")
    assert code == 0 and rows[0]["distance"] == rows[0]["rho"] == "4"


def test_descent_trace(capsys, tmp_path):
    code, rows, _ = call(capsys, "--seed", "3", "descent", "--distance", "150000", "--out", str(tmp_path))
    rhos = [float(r["rho"]) for r in rows]
    assert code == 0 and all(b < a for a, b in zip(rhos, rhos[1:])) and rhos[-1] <= 101000


def test_compare_boundary_and_coset(capsys):
    code, rows, _ = call(capsys, "compare-boundary", "--sample", "5", "--cobound-radius", "2")
    assert code == 0 and {r["statistic"] for r in rows} == {"L", "cobound"}
    code, rows, _ = call(capsys, "coset-defect", "--h", "b", "--gamma", "a", "--n", "4")
    assert code == 0 and rows[0]["quantity"] == "defect" and rows[0]["upper"] == "0"


def test_delta_estimate(capsys):
    code, rows, _ = call(capsys, "delta-estimate", "--model", "schottky", "--samples", "5000")
    assert code == 0 and 0 < float(rows[0]["delta"]) <= 2


def test_unknown_preset_is_config_error(capsys):
    code, _, err = call(capsys, "length", "--model", "nowhere", "--gamma", "a")
    assert code == 2 and "config error" in err


def test_run_exit_codes(capsys, tmp_path):
    bad = tmp_path / "bad.scenario"
    bad.write_text("models:\n  m: {kind: banana}\nexperiments: []\n")
    code, _, err = call(capsys, "run", str(bad))
    assert code == 2 and "banana" in err


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "hyperlab", "gromov", "+a", "+b"], capture_output=True, text=True)
    assert done.returncode == 0 and done.stdout.splitlines()[1].startswith("+(a),+(b),0,0")
