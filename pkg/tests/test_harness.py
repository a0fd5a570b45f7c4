from pathlib import Path

import numpy as np
import pytest
import yaml
from hypothesis import given, strategies as st

from hyperlab.errors import ConfigError
from hyperlab.experiments import RELATIONS, Row, margin, verdict
from hyperlab.harness import (COLUMNS, EXIT_CONFIG, EXIT_FAIL, EXIT_PASS, Report, emit_report, experiment_rng,
                              load_scenario, parse_scenario, recheck_csv, report_csv, report_from_json, report_json,
                              run, run_scenario, verify_scenario)

ROOT = Path(__file__).resolve().parent.parent
HEADER = ",".join(COLUMNS) + "\n"


def write(tmp_path, doc, name="s.scenario") -> Path:
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else yaml.safe_dump(doc))
    return p


def small_scenario(seed=0):
    return {"seed": seed, "models": {"t": "tree2"},
            "experiments": [{"name": "coc", "op": "cocycle_exactness", "model": "t", "trials": 40},
                            {"name": "rel", "op": "main_relation", "model": "t", "trials": 20}]}


def test_empty_scenario(tmp_path):
    report, code = run(write(tmp_path, {"models": {}, "experiments": []}), out=tmp_path / "o")
    assert code == EXIT_PASS and report.rows == []
    assert (tmp_path / "o" / "report.csv").read_text() == HEADER


def test_bundled_tree_scenario(tmp_path):
    report, code = run(ROOT / "scenarios" / "tree-exactness.scenario")
    assert code == EXIT_PASS and report.passed and len(report.rows) >= 20


@pytest.mark.parametrize("doc", [
    "models:\n  m: {kind: banana}\nexperiments: []\n",
    "models: {}\nexperiments:\n  - {name: x, op: no_such_op}\n",
    "models: {}\nexperiments:\n  - {name: x, op: cocycle_exactness, model: missing}\n",
    "models: {t: tree2}\nexperiments:\n  - {name: x, op: cocycle_exactness, model: t}\n"
    "  - {name: x, op: cocycle_exactness, model: t}\n",
    "models: [unbalanced\n",
])
def test_config_errors_exit_2(tmp_path, doc):
    report, code = run(write(tmp_path, doc))
    assert code == EXIT_CONFIG and report.errors


def test_literal_convention_fails_deliberately(tmp_path):
    doc = {"models": {"t": "tree2"},
           "experiments": [{"name": "lit", "op": "main_relation", "model": "t", "trials": 50,
                            "expect_literal": "within"}]}
    report, code = run(write(tmp_path, doc))
    assert code == EXIT_FAIL
    failed = [r for r in report.rows if not r.passed]
    assert [r.check for r in failed] == ["literal_exceeds_count"]


def test_same_seed_same_bytes(tmp_path):
    p = write(tmp_path, small_scenario())
    a, _ = run(p, out=tmp_path / "a")
    b, _ = run(p, out=tmp_path / "b")
    assert (tmp_path / "a" / "report.csv").read_bytes() == (tmp_path / "b" / "report.csv").read_bytes()


def test_reordering_keeps_streams(tmp_path):
    doc = small_scenario()
    a = run_scenario(parse_scenario(doc))
    doc["experiments"].reverse()
    b = run_scenario(parse_scenario(doc))
    key = lambda rows: sorted((r.experiment, r.check, r.value) for r in rows)  # noqa: E731
    assert key(a.rows) == key(b.rows)


def test_rng_keyed_by_name():
    a = experiment_rng(3, "x").integers(0, 2 ** 32, 4)
    assert np.array_equal(a, experiment_rng(3, "x").integers(0, 2 ** 32, 4))
    assert not np.array_equal(a, experiment_rng(3, "y").integers(0, 2 ** 32, 4))


def test_verdicts_recheck_from_csv():
    report = run_scenario(parse_scenario(small_scenario()))
    text = report_csv(report)
    assert text.splitlines()[0] == ",".join(COLUMNS)
    assert recheck_csv(text) == [r.passed for r in report.rows]


def test_empty_report_header_only(tmp_path):
    assert report_csv(Report()) == HEADER
    assert emit_report(Report(), tmp_path, "csv").read_text() == HEADER


rows = st.builds(Row, st.text(min_size=1, max_size=8), st.text(min_size=1, max_size=8), st.text(max_size=12),
                 st.floats(allow_nan=False), st.floats(allow_nan=False),
                 st.floats(allow_nan=False, allow_infinity=False), st.sampled_from(RELATIONS),
                 st.floats(allow_nan=False, allow_infinity=False))


@given(rows)
def test_json_round_trip(row):
    back = report_from_json(report_json(Report([row], seed=5, scenario="s")))
    assert back.rows == [row] and back.seed == 5
    assert report_csv(back) == report_csv(Report([row]))


@given(st.floats(-1e6, 1e6), st.sampled_from(RELATIONS), st.floats(-1e6, 1e6))
def test_margin_sign_matches_verdict(value, relation, bound):
    ok = verdict(value, relation, bound)
    m = margin(value, relation, bound)
    if relation in ("<=", ">=", "=="):
        assert ok == (m >= 0)
    else:
        assert (m > 0) == ok


def test_csv_float_format():
    r = Row("e", "c", "", 1 / 3, 2.0, 1 / 3, "<=", 1.0)
    line = report_csv(Report([r])).splitlines()[1]
    assert "0.333333333333" in line and "0.3333333333333" not in line


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(ConfigError):
        emit_report(Report(), blocker / "sub", "csv")


def test_load_scenario_presets_and_errors(tmp_path):
    sc = load_scenario(write(tmp_path, small_scenario(seed=4)))
    assert sc.seed == 4 and sc.models["t"]["kind"] == "free_tree"
    with pytest.raises(ConfigError):
        load_scenario(tmp_path / "absent.scenario")


def test_verify_profiles():
    quick, full = verify_scenario("quick"), verify_scenario("full")
    crits = {e.criterion for e in full.experiments}
    assert crits == set(range(1, 12))
    assert len(full.experiments) >= 10 and len(quick.experiments) == len(full.experiments)
    with pytest.raises(ConfigError):
        verify_scenario("medium")
