"""Scenario ingestion, deterministic orchestration, report emission, verify suite."""
from __future__ import annotations

import csv
import io
import json
import logging
import time
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .errors import BudgetExceeded, ConfigError, HyperlabError
from .experiments import OPS, Context, Row, verdict
from .presets import PRESETS
from .spaces import ActionModel, model_from_config

log = logging.getLogger(__name__)

COLUMNS = ("experiment", "check", "inputs", "lower", "upper", "value", "relation", "bound", "margin", "passed")
EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


@dataclass
class Experiment:
    name: str
    op: str
    params: dict = field(default_factory=dict)
    criterion: int | None = None


@dataclass
class Scenario:
    models: dict[str, dict]
    experiments: list[Experiment]
    seed: int = 0
    delta_margin: float = 0.0
    float_tol: float = 1e-9
    out: str | None = None
    name: str = "scenario"

    def validate(self) -> None:
        seen = set()
        for e in self.experiments:
            if e.op not in OPS:
                raise ConfigError(f"experiment {e.name!r}: unknown op {e.op!r}")
            if e.name in seen:
                raise ConfigError(f"duplicate experiment name {e.name!r}")
            seen.add(e.name)
            for key, val in e.params.items():
                if _is_model_key(key) and str(val) not in self.models:
                    raise ConfigError(f"experiment {e.name!r}: model {val!r} is not declared")


def _is_model_key(key: str) -> bool:
    return key in ("model", "model_a", "model_b", "tree", "tree_a", "tree_b", "h2", "h2_a", "h2_b")


def parse_scenario(data: Any, name: str = "scenario") -> Scenario:
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("scenario must be a mapping")
    models = data.get("models") or {}
    if not isinstance(models, dict):
        raise ConfigError("'models' must map names to declarations")
    for key, cfg in models.items():
        if isinstance(cfg, str):
            if cfg not in PRESETS:
                raise ConfigError(f"model {key!r}: unknown preset {cfg!r}")
            models[key] = dict(PRESETS[cfg])
        elif not isinstance(cfg, dict):
            raise ConfigError(f"model {key!r}: declaration must be a mapping or preset name")
    exps = []
    for i, e in enumerate(data.get("experiments") or []):
        if not isinstance(e, dict) or "op" not in e:
            raise ConfigError(f"experiment #{i}: needs an 'op'")
        params = {k: v for k, v in e.items() if k not in ("name", "op", "criterion")}
        exps.append(Experiment(str(e.get("name", f"{e['op']}-{i}")), str(e["op"]), params, e.get("criterion")))
    tol = data.get("tolerances") or {}
    try:
        sc = Scenario(models, exps, int(data.get("seed", 0)), float(tol.get("delta_margin", 0.0)),
                      float(tol.get("float_tol", 1e-9)), data.get("out"), str(data.get("name", name)))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"malformed scenario header: {exc}") from exc
    sc.validate()
    return sc


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"scenario {path} is not valid YAML: {exc}") from exc
    return parse_scenario(data, path.stem)


def experiment_rng(seed: int, name: str) -> np.random.Generator:
    """Stream keyed by (seed, experiment name): reordering experiments changes nothing."""
    return np.random.default_rng(np.random.SeedSequence([seed, zlib.crc32(name.encode())]))


def build_models(sc: Scenario) -> dict[str, ActionModel]:
    models = {}
    for key, cfg in sc.models.items():
        cfg = dict(cfg)
        cfg.setdefault("delta_margin", sc.delta_margin)
        models[key] = model_from_config(key, cfg)
    return models


@dataclass
class Report:
    rows: list[Row] = field(default_factory=list)
    criteria: dict[str, int | None] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)
    errors: list[str] = field(default_factory=list)
    scenario: str = ""
    seed: int = 0

    @property
    def passed(self) -> bool:
        return not self.errors and all(r.passed for r in self.rows)

    def summary(self) -> dict:
        n_pass = sum(r.passed for r in self.rows)
        return {"rows": len(self.rows), "passed": n_pass, "failed": len(self.rows) - n_pass,
                "errors": len(self.errors)}

    def by_experiment(self) -> dict[str, bool]:
        out: dict[str, bool] = {}
        for r in self.rows:
            out[r.experiment] = out.get(r.experiment, True) and r.passed
        return out

    @property
    def exit_code(self) -> int:
        if self.errors:
            return EXIT_CONFIG
        return EXIT_PASS if self.passed else EXIT_FAIL


def run_scenario(sc: Scenario) -> Report:
    """Execute experiments in declared order.  Config errors abort the run."""
    report = Report(scenario=sc.name, seed=sc.seed)
    ctx = Context(build_models(sc), sc.float_tol)
    for e in sc.experiments:
        rng = experiment_rng(sc.seed, e.name)
        t0 = time.perf_counter()
        log.info("running %s (%s)", e.name, e.op)
        try:
            rows = OPS[e.op](ctx, e.params, rng, e.name)
        except BudgetExceeded as exc:
            raise ConfigError(f"experiment {e.name!r}: {exc}") from exc
        except ConfigError:
            raise
        except HyperlabError as exc:
            # a failed precondition inside a check is a failed check, not a config problem
            rows = [Row(e.name, f"error:{type(exc).__name__}", str(exc), 0.0, 0.0, 1.0, "==", 0.0)]
        report.rows.extend(rows)
        report.criteria[e.name] = e.criterion
        report.timings[e.name] = time.perf_counter() - t0
    return report


def run(path: str | Path, out: str | Path | None = None, seed: int | None = None) -> tuple[Report, int]:
    """Load, run and emit; returns (report, exit code).  Config errors give exit 2."""
    try:
        sc = load_scenario(path)
        if seed is not None:
            sc.seed = seed
        report = run_scenario(sc)
    except ConfigError as exc:
        report = Report(errors=[str(exc)])
        return report, EXIT_CONFIG
    target = out or sc.out
    if target is not None:
        emit_report(report, target, "csv")
        emit_report(report, target, "json")
    return report, report.exit_code


# -- emission -------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return "%.12g" % x
    return str(x)


def row_record(r: Row) -> dict:
    return {"experiment": r.experiment, "check": r.check, "inputs": r.inputs, "lower": r.lower,
            "upper": r.upper, "value": r.value, "relation": r.relation, "bound": r.bound,
            "margin": r.margin, "passed": r.passed}


def report_csv(report: Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in report.rows:
        rec = row_record(r)
        w.writerow([_fmt(rec[c]) for c in COLUMNS])
    return buf.getvalue()


def report_json(report: Report) -> str:
    # timings are provenance only; they stay out of the CSV so reruns are byte-identical there
    doc = {"scenario": report.scenario, "seed": report.seed, "columns": list(COLUMNS),
           "rows": [{c: row_record(r)[c] for c in COLUMNS} for r in report.rows],
           "criteria": report.criteria, "summary": report.summary(), "errors": report.errors,
           "timings": {k: round(v, 3) for k, v in report.timings.items()}}
    return json.dumps(doc, indent=2, sort_keys=False)


def report_from_json(text: str) -> Report:
    doc = json.loads(text)
    rows = [Row(d["experiment"], d["check"], d["inputs"], d["lower"], d["upper"], d["value"], d["relation"],
                d["bound"]) for d in doc["rows"]]
    return Report(rows, doc.get("criteria", {}), doc.get("timings", {}), doc.get("errors", []),
                  doc.get("scenario", ""), doc.get("seed", 0))


def emit_report(report: Report, out: str | Path, fmt: str = "csv", stem: str = "report") -> Path:
    out = Path(out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if fmt == "csv":
            path = out / f"{stem}.csv"
            path.write_text(report_csv(report))
        elif fmt == "json":
            path = out / f"{stem}.json"
            path.write_text(report_json(report))
        else:
            raise ConfigError(f"unknown report format {fmt!r}")
    except OSError as exc:
        raise ConfigError(f"cannot write report to {out}: {exc}") from exc
    return path


def recheck_csv(text: str) -> list[bool]:
    """Verdicts recomputed from the emitted numbers alone."""
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        out.append(verdict(float(rec["value"]), rec["relation"], float(rec["bound"])))
    return out


# -- verification suite ---------------------------------------------------------

SUITE_MODELS = ("tree2", "tree2-s2", "schottky", "schottky-conj")

# (criterion, name, op, full params, quick overrides)
SUITE: list[tuple[int, str, str, dict, dict]] = [
    (1, "c1-cocycle-tree", "cocycle_exactness", {"model": "tree2", "trials": 1000}, {"trials": 200}),
    (2, "c2-stable-tree", "stable_length", {"model": "tree2", "trials": 200}, {"trials": 50}),
    (2, "c2-stable-h2", "stable_length", {"model": "schottky", "trials": 20, "max_len": 4}, {"trials": 5}),
    (3, "c3-main-relation-tree", "main_relation", {"model": "tree2", "trials": 200}, {"trials": 60}),
    (4, "c4-oracles-h2", "oracle_agreement", {"model": "schottky", "trials": 50}, {"trials": 15}),
    (5, "c5-delta", "delta_bounds", {"tree": "tree2", "h2": "schottky", "samples": 100_000}, {}),
    (6, "c6-cross-ratio-tree", "cross_ratio_invariance", {"model": "tree2", "trials": 1000}, {"trials": 200}),
    (6, "c6-cross-ratio-h2", "cross_ratio_invariance", {"model": "schottky", "trials": 10}, {"trials": 3}),
    (7, "c7-embedding-tree", "embedding_bounds", {"model": "tree2", "trials": 100}, {"trials": 30}),
    (7, "c7-embedding-h2", "embedding_bounds", {"model": "schottky", "trials": 20}, {"trials": 5}),
    (8, "c8-descent-tree", "barycenter_descent", {"model": "tree2", "distance": 100_000}, {}),
    # at 10⁵ the start already lies inside the stopping radius; this one takes real steps
    (8, "c8-descent-tree-long", "barycenter_descent", {"model": "tree2", "distance": 300_000}, {}),
    (9, "c9-sparsity-tree", "rigid_sparsity", {"model": "tree2", "T_max": 1e4}, {}),
    (10, "c10-probe", "rigidity_probe",
     {"tree_a": "tree2", "tree_b": "tree2-s2", "h2_a": "schottky", "h2_b": "schottky-conj", "tree": "tree2",
      "h2_radius": 8, "shift": "ab", "pairs": 100}, {"h2_radius": 6, "pairs": 30}),
    (11, "c11-coset-tree", "coset_defect", {"model_a": "tree2", "model_b": "tree2-shift", "trials": 20},
     {"trials": 5}),
    (11, "c11-coset-h2", "coset_defect", {"model_a": "schottky", "model_b": "schottky-conj", "trials": 20},
     {"trials": 5}),
]


def verify_scenario(profile: str = "quick", seed: int = 0) -> Scenario:
    if profile not in ("quick", "full"):
        raise ConfigError(f"unknown verify profile {profile!r} (quick, full)")
    models = {k: dict(PRESETS[k]) for k in (*SUITE_MODELS, "tree2-shift")}
    exps = []
    for crit, name, op_name, params, quick in SUITE:
        p = dict(params)
        if profile == "quick":
            p.update(quick)
        exps.append(Experiment(name, op_name, p, crit))
    return Scenario(models, exps, seed, name=f"verify-{profile}")


def verify(profile: str = "quick", seed: int = 0) -> Report:
    sc = verify_scenario(profile, seed)
    sc.validate()
    return run_scenario(sc)


def criterion_verdicts(report: Report) -> dict[int, bool]:
    per_exp = report.by_experiment()
    out: dict[int, bool] = {}
    for name, crit in report.criteria.items():
        if crit is not None:
            out[crit] = out.get(crit, True) and per_exp.get(name, False)
    return out
