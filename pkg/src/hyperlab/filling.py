"""Pointed metric instances, the distance ρ between them, and barycenter descent.

Suprema over ∂X are replaced by finite witness sets.  Every ρ value is a
lower bound for the true supremum; checks that need an upper estimate use
the witness sup, checks that need a lower estimate use the explicit witness
pairs of the corresponding construction (line extensions through p and q).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

from .boundary import (BoundaryPoint, _iw_lcp, approximant, dedupe, extended_gromov, fixed_points,
                       tree_point_product, tree_word)
from .busemann import Convention, cocycle
from .errors import CoincidentBoundaryPoints, ConfigError, PreconditionFailed
from .intervals import IntervalValue
from .spaces import HYPERBOLIC, ActionModel, FreeTree, Orbit, UpperHalfPlane
from .words import InfiniteWord, Word, parse_word

DEFAULT_K = 101.0
REFINE_LEVELS = 40


@dataclass
class MetricInstance:
    """D = (model, o_D, W): a pointed copy of the model with witnesses W."""

    model: ActionModel
    base: Any
    witnesses: tuple
    K: float = DEFAULT_K
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not self.K > 100:
            raise ConfigError(f"K must exceed 100, got {self.K}")
        self.witnesses = dedupe(self.witnesses)

    @property
    def delta(self) -> float:
        return self.model.delta

    def product(self, x: BoundaryPoint, y: BoundaryPoint, depth: int | None = None) -> IntervalValue:
        if isinstance(self.model, FreeTree):
            X, Y = self._tree(x), self._tree(y)
            return IntervalValue.exact(_iw_lcp(X, Y, x, y))
        return extended_gromov(self.model, x, y, self.base, depth)

    def _tree(self, x: BoundaryPoint) -> InfiniteWord:
        if x not in self._cache:
            o = self.model.resolve(self.base)
            self._cache[x] = tree_word(self.model, x).left_multiply(o.inverse())
        return self._cache[x]

    def visual_slack(self) -> float:
        """max over y ∈ W of min over x ≠ y of ⟨x, y⟩ (finite proxy, should be ≤ K − 1)."""
        W = self.witnesses
        return max(min(self.product(x, y).estimate for x in W if x != y) for y in W)

    def label(self) -> str:
        return f"D[{self.model.name}@{self.model.point_label(self.base)}]"


def instance(model: ActionModel, base=None, witnesses: Sequence[BoundaryPoint] = (), K: float = DEFAULT_K) -> MetricInstance:
    return MetricInstance(model, Orbit(Word.identity()) if base is None else base, tuple(witnesses), K)


def _shared_witnesses(D1: MetricInstance, D2: MetricInstance) -> tuple:
    W = dedupe(D1.witnesses + D2.witnesses)
    if len(W) < 2:
        raise ConfigError("witness set needs at least two boundary points")
    return W


@dataclass(frozen=True)
class RhoEstimate:
    value: IntervalValue
    witness: tuple
    pairs: int
    lower_bound: bool = True  # finite witness sup never exceeds the true sup

    @property
    def estimate(self) -> float:
        return self.value.estimate


def rho_distance(D1: MetricInstance, D2: MetricInstance, depth: int | None = None) -> RhoEstimate:
    W = _shared_witnesses(D1, D2)
    lo = hi = est = 0.0
    witness = ()
    n = 0
    for i, x in enumerate(W):
        for y in W[i + 1:]:
            g = (D1.product(x, y, depth) - D2.product(x, y, depth)).abs()
            n += 1
            lo, hi = max(lo, g.lower), max(hi, g.upper)
            if g.estimate > est or not witness:
                est, witness = max(est, g.estimate), (x, y)
    return RhoEstimate(IntervalValue(min(lo, est), max(hi, est), depth or 0, est), witness, n)


# ---------------------------------------------------------------------------

def relative_busemann(D1: MetricInstance, D2: MetricInstance, x: BoundaryPoint,
                      depth: int | None = None) -> IntervalValue:
    """f(x) = ½ liminf_{y→x} ⟨x,y⟩_{D1} − ⟨x,y⟩_{D2}, widened by ½K + 4δ.

    On a single tree the liminf is the Busemann value ½B_{o1,o2}(x); other
    models refine y → x along approximants and take a tail running min.
    """
    slack = 0.5 * max(D1.K, D2.K) + 4 * max(D1.delta, D2.delta)
    if isinstance(D1.model, FreeTree) and D1.model is D2.model:
        m = D1.model
        o1, o2 = m.resolve(D1.base), m.resolve(D2.base)
        b = 2 * tree_point_product(m, o2, x, o1) - m.distance(o1, o2)
        return IntervalValue(0.5 * b - slack, 0.5 * b + slack, 0, 0.5 * b)
    return _refined_busemann(D1, D2, x, depth).scale(0.5).widen(slack)


def _refined_busemann(D1: MetricInstance, D2: MetricInstance, x: BoundaryPoint, depth) -> IntervalValue:
    if not x.word_type and not isinstance(D1.model, UpperHalfPlane):
        raise PreconditionFailed(f"no refining sequence toward {x}: witness set needs refinement")
    exact = D1.model.exact and D2.model.exact
    if exact:
        target = D1.model.dist(D1.base, D2.base) + 16
    else:
        target = 20.0
    vals: list[IntervalValue] = []
    for k in range(1, REFINE_LEVELS + 1):
        y = approximant(x, k, D1.model.rank)
        try:
            p1 = D1.product(x, y, depth)
            vals.append(p1 - D2.product(x, y, depth))
        except CoincidentBoundaryPoints:
            break
        if p1.estimate >= target and len(vals) >= 4:
            break
    if len(vals) < 2:
        raise PreconditionFailed(f"no refining sequence toward {x}: witness set needs refinement")
    tail = vals[len(vals) // 2:]
    return IntervalValue(min(v.lower for v in tail), min(v.upper for v in tail),
                         max(v.depth for v in tail), min(v.estimate for v in tail))


@dataclass(frozen=True)
class Check:
    statistic: float
    relation: str
    bound: float
    passed: bool
    detail: dict = field(default_factory=dict)


def _f_values(D1: MetricInstance, D2: MetricInstance, depth=None) -> list[tuple[BoundaryPoint, float]]:
    return [(x, relative_busemann(D1, D2, x, depth).estimate) for x in _shared_witnesses(D1, D2)]


def supinf_opposite_check(D1: MetricInstance, D2: MetricInstance, depth=None) -> Check:
    fv = _f_values(D1, D2, depth)
    hi = max(v for _, v in fv)
    lo = min(v for _, v in fv)
    bound = 5 * max(D1.delta, D2.delta) + 1.5 * max(D1.K, D2.K)
    stat = abs(hi + lo)
    return Check(stat, "<=", bound, stat <= bound, {"sup": hi, "inf": lo})


def rho_vs_sup_check(D1: MetricInstance, D2: MetricInstance, depth=None) -> Check:
    rho = rho_distance(D1, D2, depth).estimate
    s = abs(max(v for _, v in _f_values(D1, D2, depth)))
    K, d = max(D1.K, D2.K), max(D1.delta, D2.delta)
    upper = 2 * s + 3.5 * K + 14 * d
    lower = 2 * s - K - 12 * d
    ok = lower <= rho <= upper
    return Check(rho, "in", upper, ok, {"two_sup_f": 2 * s, "lower": lower, "upper": upper})


# ---------------------------------------------------------------------------

def line_witnesses(model: ActionModel, p, q) -> tuple[BoundaryPoint, BoundaryPoint]:
    """Two rays through q continuing the segment [p, q] and branching at q."""
    if isinstance(model, FreeTree):
        if model.basis is not None:
            raise PreconditionFailed("line extensions need an unmarked tree")
        p, q = model.resolve(p), model.resolve(q)
        u = (p.inverse() * q).letters
        if not u:
            raise PreconditionFailed("p = q")
        back = u[-1] ^ 1
        letters = [z for z in range(2 * model.model_rank) if z != back]
        return (BoundaryPoint.infinite_word(q, bytes([letters[0]])),
                BoundaryPoint.infinite_word(q, bytes([letters[1]])))
    if isinstance(model, UpperHalfPlane):
        p, q = complex(model.resolve(p)), complex(model.resolve(q))
        if model.distance(p, q) <= model.tolerance:
            raise PreconditionFailed("p = q")
        xi = model.boundary_direction(p, q)
        # rays from q at ±π/4 around the continuation stay on the far side of q
        return (BoundaryPoint.explicit_ray(model.rotate_direction(q, xi, math.pi / 4)),
                BoundaryPoint.explicit_ray(model.rotate_direction(q, xi, -math.pi / 4)))
    raise PreconditionFailed(f"no line-extension construction for {model!r}")


@dataclass(frozen=True)
class EmbeddingCheck:
    distance: float
    rho: float
    lower_bound: float
    upper_bound: float
    passed: bool
    witnesses: tuple


def embedding_check(model: ActionModel, p, q, K: float = DEFAULT_K, depth: int | None = None) -> EmbeddingCheck:
    """d − 4K − 13δ̂ ≤ ρ̂(D_p, D_q) ≤ d + 4δ̂ with the line-extension witness pair."""
    W = line_witnesses(model, p, q)
    Dp, Dq = instance(model, p, W, K), instance(model, q, W, K)
    d = model.dist(p, q)
    rho = rho_distance(Dp, Dq, depth).estimate
    delta = model.delta
    lo, hi = d - 4 * K - 13 * delta, d + 4 * delta + model.tolerance
    return EmbeddingCheck(d, rho, lo, hi, lo <= rho <= hi, W)


@dataclass(frozen=True)
class DescentStep:
    point: str
    rho: float
    target: str
    step: float


@dataclass
class DescentTrace:
    steps: list[DescentStep] = field(default_factory=list)
    final_point: Any = None
    finding: str | None = None
    stop_radius: float = 0.0

    @property
    def iterations(self) -> int:
        return max(0, len(self.steps) - 1)


def barycenter_descent(D: MetricInstance, start, K: float | None = None, max_steps: int = 10_000) -> DescentTrace:
    """Move p toward the witness maximizing f_{D_p,D} by 50K + 50δ̂ until ρ̂ ≤ 1000K + 1000δ̂."""
    model = D.model
    K = D.K if K is None else K
    delta = model.delta
    step = 50 * K + 50 * delta
    stop = 1000 * K + 1000 * delta
    if isinstance(model, FreeTree):
        step = int(math.floor(step))
    trace = DescentTrace(stop_radius=stop)
    p = model.resolve(start)
    prev = math.inf
    for _ in range(max_steps + 1):
        Dp = instance(model, p, D.witnesses, K)
        rho = rho_distance(Dp, D).estimate
        if rho >= prev:
            trace.finding = f"non-decreasing step: ρ̂ {prev:.12g} -> {rho:.12g}"
            trace.steps.append(DescentStep(model.point_label(p), rho, "", 0.0))
            break
        if rho <= stop:
            trace.steps.append(DescentStep(model.point_label(p), rho, "", 0.0))
            break
        fv = _f_values(Dp, D)
        x = max(fv, key=lambda t: t[1])[0]
        trace.steps.append(DescentStep(model.point_label(p), rho, str(x), step))
        p = _advance(model, p, x, step)
        prev = rho
    else:
        trace.finding = f"max steps {max_steps} reached"
    trace.final_point = p
    return trace


def _advance(model: ActionModel, p, x: BoundaryPoint, step: float):
    if isinstance(model, FreeTree):
        X = tree_word(model, x).left_multiply(p.inverse())
        return p * Word(X.head(int(step)), reduced=True)
    if isinstance(model, UpperHalfPlane):
        return model.geodesic_point(complex(p), x.boundary_real(model), step)
    raise PreconditionFailed(f"descent not available for {model!r}")


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Comparison:
    value: float
    witness: tuple
    enclosure: IntervalValue


def gromov_comparison(model_a: ActionModel, model_b: ActionModel, pairs: Sequence[tuple[BoundaryPoint, BoundaryPoint]],
                      depth: int | None = None) -> Comparison:
    """Empirical L = max |⟨x,y⟩_A − ⟨x,y⟩_B| over shared witness pairs."""
    best, wit, enc = 0.0, (), IntervalValue.exact(0.0)
    for x, y in pairs:
        g = (extended_gromov(model_a, x, y, None, depth) - extended_gromov(model_b, x, y, None, depth)).abs()
        if g.estimate > best or not wit:
            best, wit, enc = max(best, g.estimate), (x, y), g
    return Comparison(best, wit, enc)


def _g(model_a, model_b, x, y, depth) -> IntervalValue:
    return extended_gromov(model_a, x, y, None, depth) - extended_gromov(model_b, x, y, None, depth)


def cobound_estimate(model_a: ActionModel, model_b: ActionModel, pair: tuple[BoundaryPoint, BoundaryPoint],
                     radius: int, depth: int | None = None) -> IntervalValue:
    """ĥ(x,y) = max over the ball of g(x,y) − g(γx,γy); a lower bound of the sup."""
    x, y = pair
    base = _g(model_a, model_b, x, y, depth)
    best = None
    for gam in model_a.ball(radius):
        v = base - _g(model_a, model_b, x.translate(gam), y.translate(gam), depth)
        if best is None or v.estimate > best.estimate:
            best = v
    return best


def _word(model: ActionModel, g) -> Word:
    return parse_word(g, model.rank) if isinstance(g, str) else model.check_word(g)


@dataclass(frozen=True)
class CosetDefect:
    defect: IntervalValue
    ratios: tuple  # ((n, c(γⁿ,γ⁻)/n enclosure), ...)
    bound: float


def coset_relation_defect(model_a: ActionModel, model_b: ActionModel, h, g, n: int,
                          convention: Convention = Convention.INVERSE, depth: int | None = None,
                          schedule: Sequence[int] = (1, 2, 4, 8, 16, 32, 64)) -> CosetDefect:
    """g(γ⁻,Γ⁺) − g(hγ⁻,Γ⁺) − [cocycle terms] for Γ = hγⁿ, g = ⟨⟩_A − ⟨⟩_B, c = c_A − c_B.

    Direct uses c(Γ,γ⁻) + c(Γ,Γ⁺); Inverse uses the half-sum ½(c̃(Γ,γ⁻) + c̃(Γ,Γ⁺)).
    """
    h, g = _word(model_a, h), _word(model_a, g)
    plus, minus = fixed_points(model_a, g)
    try:
        extended_gromov(model_a, plus.translate(h), minus)
    except CoincidentBoundaryPoints:
        raise PreconditionFailed("hγ⁺ = γ⁻") from None
    big = h * g ** n
    if model_a.classify(big) != HYPERBOLIC:
        raise PreconditionFailed(f"hγⁿ = {big} is not hyperbolic")
    y = BoundaryPoint.fixed_plus(big)

    def c(gam, x, conv):
        return cocycle(model_a, gam, x, conv, depth) - cocycle(model_b, gam, x, conv, depth)

    lhs = _g(model_a, model_b, minus, y, depth) - _g(model_a, model_b, minus.translate(h), y, depth)
    if convention is Convention.DIRECT:
        val = lhs - c(big, minus, convention) - c(big, y, convention)
    else:
        val = lhs - (c(big, minus, convention) + c(big, y, convention)).scale(0.5)
    ratios = tuple((k, c(g ** k, minus, convention).scale(1.0 / k)) for k in schedule)
    return CosetDefect(val, ratios, 8 * max(model_a.delta, model_b.delta))


