"""Command line entry point: ``hyperlab <subcommand> [--scenario FILE] [--seed N] [--out DIR] ...``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import harness, oracles
from .boundary import BoundaryPoint, extended_gromov, limit_set_sample, parse_boundary
from .busemann import Convention, busemann, cocycle
from .errors import ConfigError, HyperlabError
from .experiments import long_random_word
from .filling import (barycenter_descent, cobound_estimate, coset_relation_defect, gromov_comparison, instance,
                      line_witnesses, rho_distance)
from .gromov import SampleRegion, delta_estimate
from .presets import PRESETS, preset
from .rigidsets import BudgetFunction, build_E_phi, build_E_prime, sparsity_check
from .spaces import SL2, ActionModel, FreeTree, Orbit, UpperHalfPlane, model_from_config
from .spectrum import conjugacy_class_key, mls_compare, mls_table, translation_length
from .words import Word, parse_word

log = logging.getLogger("hyperlab")


def _fmt(x) -> str:
    if isinstance(x, float):
        return "%.12g" % x
    return "" if x is None else str(x)


class Out:
    """CSV to stdout, mirrored to ``--out DIR/<stem>.csv`` when given."""

    def __init__(self, args):
        self.dir = Path(args.out) if args.out else None

    def table(self, stem: str, columns, rows) -> None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r.get(c)) for c in columns])
        sys.stdout.write(buf.getvalue())
        if self.dir is not None:
            self._write(f"{stem}.csv", buf.getvalue())

    def sidecar(self, stem: str, doc: dict) -> None:
        if self.dir is not None:
            self._write(f"{stem}.json", json.dumps(doc, indent=2))

    def _write(self, name: str, text: str) -> None:
        try:
            self.dir.mkdir(parents=True, exist_ok=True)
            (self.dir / name).write_text(text)
        except OSError as exc:
            raise ConfigError(f"cannot write {self.dir / name}: {exc}") from exc


def _model(args, name: str) -> ActionModel:
    if args.scenario:
        sc = harness.load_scenario(args.scenario)
        if name in sc.models:
            return model_from_config(name, sc.models[name])
    return preset(name)


def _matrix(text: str) -> SL2:
    vals = json.loads(text)
    return SL2.from_rows(vals if isinstance(vals[0], list) else [vals[:2], vals[2:]])


def _point(model: ActionModel, text: str):
    text = text.strip()
    if isinstance(model, UpperHalfPlane) and text.startswith(("(", "[")):
        x, y = json.loads(text.replace("(", "[").replace(")", "]"))
        return complex(x, y)
    return Orbit(parse_word(text, model.rank))


def _words(model: ActionModel, args) -> list[Word]:
    if args.words:
        return [parse_word(w, model.rank) for w in args.words.split(",")]
    return model.ball(args.radius)


def _rng(args, name: str) -> np.random.Generator:
    return harness.experiment_rng(args.seed, name)


# -- subcommands ------------------------------------------------------------

def cmd_delta_estimate(args) -> int:
    m = _model(args, args.model)
    if isinstance(m, FreeTree) and args.exhaustive:
        est = delta_estimate(m, SampleRegion(args.radius or 4, exhaustive=True))
    else:
        radius = args.radius if args.radius is not None else (5.0 if isinstance(m, UpperHalfPlane) else 4)
        est = delta_estimate(m, SampleRegion(radius), args.samples, seed=args.seed)
    Out(args).table("delta-estimate", ["model", "sample_size", "delta", "witness"],
                    [{"model": m.name, "sample_size": est.sample_size, "delta": float(est.value),
                      "witness": " ".join(map(str, est.witness))}])
    return 0


def cmd_gromov(args) -> int:
    m = _model(args, args.model)
    x, y = parse_boundary(args.x), parse_boundary(args.y)
    o = _point(m, args.o) if args.o else None
    v = extended_gromov(m, x, y, o, args.depth)
    Out(args).table("gromov", ["x", "y", "lower", "upper", "estimate", "depth"],
                    [{"x": x, "y": y, "lower": float(v.lower), "upper": float(v.upper),
                      "estimate": float(v.estimate), "depth": v.depth}])
    return 0


def cmd_busemann(args) -> int:
    m = _model(args, args.model)
    x = parse_boundary(args.x)
    conv = Convention(args.convention)
    oracle = None
    if args.gamma.strip().startswith("["):
        if not isinstance(m, UpperHalfPlane):
            raise ConfigError("matrix γ needs an upper half plane model")
        g = _matrix(args.gamma)
        o = m.base_point
        p = m.act(g if conv is Convention.DIRECT else g.inverse(), o)
        v = busemann(m, o, p, x, args.depth)
        if x.tag.value == "explicit_ray" and math.isinf(x.real):
            oracle = oracles.busemann_at_infinity(o, p)
    else:
        g = parse_word(args.gamma, m.rank)
        v = cocycle(m, g, x, conv, args.depth)
        if isinstance(m, FreeTree) and m.basis is None and m.base_point == Word.identity() and x.word_type:
            q = g if conv is Convention.DIRECT else g.inverse()
            # ⟨q, x⟩_e is the common prefix of q with any ray truncation longer than q
            ray = x.word_ray(len(q) + 200)
            oracle = 2 * oracles.tree_ray_product(str(q) if q else "", str(ray) if ray else "") - len(q)
        elif isinstance(m, UpperHalfPlane) and x.tag.value == "explicit_ray" and math.isinf(x.real):
            o = m.base_point
            p = m.apply(g if conv is Convention.DIRECT else g.inverse(), o)
            oracle = oracles.busemann_at_infinity(o, p)
    Out(args).table("busemann", ["input", "lower", "upper", "oracle"],
                    [{"input": f"gamma={args.gamma};x={x};convention={conv.value}", "lower": float(v.lower),
                      "upper": float(v.upper), "oracle": None if oracle is None else float(oracle)}])
    return 0


def cmd_length(args) -> int:
    m = _model(args, args.model)
    est = translation_length(m, args.gamma, args.method, args.N)
    Out(args).table("length", ["word", "method", "lower", "upper", "estimate", "classification"],
                    [{"word": est.element, "method": est.method, "lower": float(est.value.lower),
                      "upper": float(est.value.upper), "estimate": float(est.estimate),
                      "classification": est.classification}])
    return 0


def cmd_spectrum(args) -> int:
    m = _model(args, args.model)
    t = mls_table(m, _words(m, args))
    Out(args).table("spectrum", ["word", "conjugacy_class", "method", "lower", "upper", "classification"],
                    [{"word": r.word, "conjugacy_class": conjugacy_class_key(m, r.word), "method": r.method,
                      "lower": float(r.value.lower), "upper": float(r.value.upper),
                      "classification": r.classification} for r in t.rows])
    return 0


def cmd_compare(args) -> int:
    a, b = _model(args, args.model_a), _model(args, args.model_b)
    words = _words(a, args)
    rows = []
    for w in words:
        la, lb = translation_length(a, w), translation_length(b, w)
        ratio = la.estimate / lb.estimate if lb.estimate > 0 else (1.0 if la.estimate == 0 else math.inf)
        rows.append({"word": w, "method": f"{la.method}|{lb.method}", "lower": float(la.value.lower),
                     "upper": float(la.value.upper), "classification": la.classification,
                     "value_a": float(la.estimate), "value_b": float(lb.estimate),
                     "diff": float(la.estimate - lb.estimate), "ratio": float(ratio)})
    cmp = mls_compare(a, b, words)
    Out(args).table("compare", ["word", "method", "lower", "upper", "classification", "value_a", "value_b",
                                "diff", "ratio"], rows)
    Out(args).sidecar("compare", {"model_a": a.name, "model_b": b.name, "max_diff": cmp.max_diff,
                                  "max_ratio": cmp.max_ratio, "witness_diff": str(cmp.witness_diff),
                                  "count": cmp.count})
    return 0


def cmd_rigid_set(args) -> int:
    m = _model(args, args.model)
    f = BudgetFunction.parse(args.budget)
    if args.prime:
        E = build_E_prime(m, f, radius=args.radius, severity=args.severity)
    else:
        E = build_E_phi(m, args.gamma, args.theta, f, per_eta=args.per_eta, radius=args.radius,
                        severity=args.severity)
    sp = sparsity_check(E, m, f, args.T_max)
    Out(args).table("rigid-set", ["word", "length", "branch", "i", "n"],
                    [{"word": x.element, "length": float(x.length), "branch": x.branch, "i": x.i, "n": x.n}
                     for x in E.members])
    Out(args).sidecar("rigid-set", {
        "model": m.name, "gamma": None if E.gamma is None else str(E.gamma),
        "theta": None if E.theta is None else str(E.theta), "budget": args.budget, "severity": args.severity,
        "per_eta": args.per_eta, "radius": args.radius, "prime": args.prime, "seed": args.seed,
        "sparsity_passed": sp.passed, "first_violation": sp.first_violation,
        "skipped": [list(s) for s in E.skipped]})
    return 0 if sp.passed else 1


def _witnesses(m: ActionModel, args, p=None, q=None) -> tuple:
    W: list[BoundaryPoint] = []
    if p is not None and q is not None and not args.no_line:
        W.extend(line_witnesses(m, p, q))
    for spec in args.witness or []:
        W.append(parse_boundary(spec))
    if args.sample:
        if isinstance(m, UpperHalfPlane):
            rng = _rng(args, "witness-sample")
            W.extend(BoundaryPoint.explicit_ray(float(t)) for t in np.tan(rng.uniform(-1.5, 1.5, args.sample)))
        else:
            W.extend(limit_set_sample(m, args.sample, 2, seed=args.seed))
    return tuple(W)


def cmd_filling_distance(args) -> int:
    m = _model(args, args.model)
    p, q = _point(m, args.p), _point(m, args.q)
    W = _witnesses(m, args, p, q)
    r = rho_distance(instance(m, p, W, args.K), instance(m, q, W, args.K), args.depth)
    Out(args).table("filling-distance", ["p", "q", "distance", "rho_lower", "rho_upper", "rho", "witness",
                                         "pairs"],
                    [{"p": args.p, "q": args.q, "distance": float(m.dist(p, q)), "rho_lower": float(r.value.lower),
                      "rho_upper": float(r.value.upper), "rho": float(r.estimate),
                      "witness": " ".join(map(str, r.witness)), "pairs": r.pairs}])
    return 0


def cmd_descent(args) -> int:
    m = _model(args, args.model)
    start = _point(m, args.start)
    if args.target:
        target = _point(m, args.target)
    elif isinstance(m, FreeTree):
        target = Orbit(long_random_word(_rng(args, "descent-target"), m.rank, args.distance))
    else:
        raise ConfigError("--target is required on this model")
    if isinstance(m, FreeTree):
        start, target = m.resolve(start), m.resolve(target)
    else:
        start, target = complex(m.resolve(start)), complex(m.resolve(target))
    W = _witnesses(m, args, start, target) if not args.no_line else _witnesses(m, args)
    tr = barycenter_descent(instance(m, target, W, args.K), start, max_steps=args.max_steps)
    Out(args).table("descent", ["step", "point", "rho", "target"],
                    [{"step": k, "point": _short(s.point), "rho": float(s.rho), "target": _short(s.target)}
                     for k, s in enumerate(tr.steps)])
    Out(args).sidecar("descent", {"model": m.name, "K": args.K, "stop_radius": tr.stop_radius,
                                  "iterations": tr.iterations, "finding": tr.finding, "seed": args.seed})
    return 0 if tr.finding is None else 1


def _short(label: str, keep: int = 40) -> str:
    return label if len(label) <= 2 * keep + 3 else f"{label[:keep]}...{label[-keep:]}"


def cmd_compare_boundary(args) -> int:
    a, b = _model(args, args.model_a), _model(args, args.model_b)
    if args.pairs:
        pairs = [tuple(parse_boundary(s) for s in pair.split(",")) for pair in args.pairs.split(";")]
    else:
        pts = limit_set_sample(a, args.sample or 6, 2, seed=args.seed)
        pairs = [(x, y) for i, x in enumerate(pts) for y in pts[i + 1:]]
    cmp = gromov_comparison(a, b, pairs, args.depth)
    rows = [{"statistic": "L", "value": float(cmp.value), "lower": float(cmp.enclosure.lower),
             "upper": float(cmp.enclosure.upper), "witness": " ".join(map(str, cmp.witness))}]
    if args.cobound_radius is not None:
        h = cobound_estimate(a, b, cmp.witness, args.cobound_radius, args.depth)
        rows.append({"statistic": "cobound", "value": float(h.estimate), "lower": float(h.lower),
                     "upper": float(h.upper), "witness": " ".join(map(str, cmp.witness))})
    Out(args).table("compare-boundary", ["statistic", "value", "lower", "upper", "witness"], rows)
    return 0


def cmd_coset_defect(args) -> int:
    a, b = _model(args, args.model_a), _model(args, args.model_b)
    cd = coset_relation_defect(a, b, args.h, args.gamma, args.n, Convention(args.convention), args.depth)
    rows = [{"quantity": "defect", "n": args.n, "lower": float(cd.defect.lower), "upper": float(cd.defect.upper),
             "bound": float(cd.bound)}]
    rows += [{"quantity": "ratio", "n": k, "lower": float(v.lower), "upper": float(v.upper), "bound": None}
             for k, v in cd.ratios]
    Out(args).table("coset-defect", ["quantity", "n", "lower", "upper", "bound"], rows)
    ok = cd.defect.lower <= cd.bound and -cd.defect.upper <= cd.bound
    return 0 if ok else 1


def cmd_verify(args) -> int:
    report = harness.verify(args.profile, args.seed)
    out = Out(args)
    sys.stdout.write(harness.report_csv(report))
    if out.dir is not None:
        harness.emit_report(report, out.dir, "csv", f"verify-{args.profile}")
        harness.emit_report(report, out.dir, "json", f"verify-{args.profile}")
    for crit, ok in sorted(harness.criterion_verdicts(report).items()):
        print(f"criterion {crit}: {'PASS' if ok else 'FAIL'}", file=sys.stderr)
    return report.exit_code


def cmd_run(args) -> int:
    path = args.file or args.scenario
    if not path:
        raise ConfigError("run needs a scenario file")
    report, code = harness.run(path, args.out, args.seed_given)
    if report.errors:
        for e in report.errors:
            print(f"config error: {e}", file=sys.stderr)
        return code
    sys.stdout.write(harness.report_csv(report))
    s = report.summary()
    print(f"{s['passed']}/{s['rows']} checks passed", file=sys.stderr)
    return code


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    def globals_(defaults: bool) -> argparse.ArgumentParser:
        # subcommand copies use SUPPRESS so they never overwrite a flag given before the subcommand
        g = argparse.ArgumentParser(add_help=False)
        d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
        g.add_argument("--scenario", default=d(None), help="YAML scenario file (model declarations, or the file for `run`)")
        g.add_argument("--seed", type=int, default=d(None), help="seed (default 0; for `run`, the scenario's)")
        g.add_argument("--out", default=d(None), help="directory for CSV and JSON outputs")
        g.add_argument("-v", "--verbose", action="store_true", default=d(False))
        return g

    common = globals_(False)
    p = argparse.ArgumentParser(prog="hyperlab", description="Experiments on isometric actions on hyperbolic spaces.",
                                parents=[globals_(True)])
    sub = p.add_subparsers(dest="command", required=True)
    models = ", ".join(PRESETS)

    def add(name, fn, help_):
        s = sub.add_parser(name, help=help_, parents=[common])
        s.set_defaults(fn=fn)
        return s

    def model_opt(s, *names):
        for n, default in names:
            s.add_argument(f"--{n.replace('_', '-')}", dest=n, default=default, help=f"preset ({models}) or scenario model")

    s = add("delta-estimate", cmd_delta_estimate, "sampled four-point δ")
    model_opt(s, ("model", "tree2"))
    s.add_argument("--samples", type=int, default=100_000)
    s.add_argument("--radius", type=float)
    s.add_argument("--exhaustive", action="store_true")

    s = add("gromov", cmd_gromov, "extended Gromov product of two boundary points")
    model_opt(s, ("model", "tree2"))
    s.add_argument("x")
    s.add_argument("y")
    s.add_argument("--o", help="base point: word, or (x, y) on H²")
    s.add_argument("--depth", type=int)

    s = add("busemann", cmd_busemann, "Busemann cocycle c(γ, x)")
    model_opt(s, ("model", "tree2"))
    s.add_argument("--gamma", required=True, help="word, or matrix as JSON rows")
    s.add_argument("--x", required=True, help="boundary point: +w, -w, u(c), ray:t, h*spec")
    s.add_argument("--convention", choices=[c.value for c in Convention], default="inverse")
    s.add_argument("--depth", type=int)

    s = add("length", cmd_length, "translation length of one element")
    model_opt(s, ("model", "tree2"))
    s.add_argument("--gamma", required=True)
    s.add_argument("--method")
    s.add_argument("--N", type=int)

    for name, fn, help_ in (("spectrum", cmd_spectrum, "marked length spectrum table"),
                            ("compare", cmd_compare, "compare two spectra")):
        s = add(name, fn, help_)
        if name == "spectrum":
            model_opt(s, ("model", "tree2"))
        else:
            model_opt(s, ("model_a", "tree2"), ("model_b", "tree2-s2"))
        s.add_argument("--radius", type=int, default=2)
        s.add_argument("--words", help="comma-separated words instead of a ball")

    s = add("rigid-set", cmd_rigid_set, "build E_φ (or E′ with --prime)")
    model_opt(s, ("model", "tree2"))
    s.add_argument("--gamma", default="ab")
    s.add_argument("--theta")
    s.add_argument("--budget", default="sqrt")
    s.add_argument("--severity", type=float, default=1.0)
    s.add_argument("--per-eta", dest="per_eta", type=int, default=2)
    s.add_argument("--radius", type=int, default=1)
    s.add_argument("--prime", action="store_true")
    s.add_argument("--T-max", dest="T_max", type=float, default=1e4)

    def witness_opts(s):
        s.add_argument("--witness", action="append", help="extra witness boundary point (repeatable)")
        s.add_argument("--sample", type=int, default=0, help="add this many sampled witnesses")
        s.add_argument("--no-line", action="store_true", help="omit the line-extension witness pair")
        s.add_argument("--K", type=float, default=101.0)

    s = add("filling-distance", cmd_filling_distance, "ρ̂(D_p, D_q)")
    model_opt(s, ("model", "tree2"))
    s.add_argument("--p", required=True)
    s.add_argument("--q", required=True)
    s.add_argument("--depth", type=int)
    witness_opts(s)

    s = add("descent", cmd_descent, "barycenter descent toward D_r")
    model_opt(s, ("model", "tree2"))
    s.add_argument("--start", default="e")
    s.add_argument("--target", help="r; on trees defaults to a seeded random word of --distance letters")
    s.add_argument("--distance", type=int, default=100_000)
    s.add_argument("--max-steps", dest="max_steps", type=int, default=10_000)
    witness_opts(s)

    s = add("compare-boundary", cmd_compare_boundary, "empirical Gromov-product comparison constant")
    model_opt(s, ("model_a", "tree2"), ("model_b", "tree2-shift"))
    s.add_argument("--pairs", help="x,y;x,y;...")
    s.add_argument("--sample", type=int, default=0)
    s.add_argument("--cobound-radius", dest="cobound_radius", type=int)
    s.add_argument("--depth", type=int)

    s = add("coset-defect", cmd_coset_defect, "coset relation defect for two models")
    model_opt(s, ("model_a", "tree2"), ("model_b", "tree2-shift"))
    s.add_argument("--h", required=True)
    s.add_argument("--gamma", required=True)
    s.add_argument("--n", type=int, default=4)
    s.add_argument("--convention", choices=[c.value for c in Convention], default="inverse")
    s.add_argument("--depth", type=int)

    s = add("verify", cmd_verify, "bundled acceptance suite")
    s.add_argument("--profile", choices=["quick", "full"], default="quick")

    s = add("run", cmd_run, "run a scenario file")
    s.add_argument("file", nargs="?")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    args.seed_given = args.seed
    args.seed = 0 if args.seed is None else args.seed
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return harness.EXIT_CONFIG
    except HyperlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return harness.EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
