"""Sparse spectrally rigid sets E_φ and the ratio-detecting sets E′_φ.

Members are γ^{−n}η⁻¹ (branch E¹ or the quasi-parabolic case) or
θγ^{−n}η⁻¹ (branch E²).  For the i-th η the exponents n¹ < n² < ... are
chosen greedily so that

* the m-th member has f(ℓ) ≥ m·2^i with ℓ nondecreasing in m, which makes
  #{members of η_i with ℓ ≤ T} ≤ f(T)/2^i and hence #{ℓ ≤ T} ≤ f(T);
* for m > 1 the member's orbit point is s·i²·(δ̂+1) deep toward γ⁻ (or θγ⁻).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .boundary import BoundaryPoint, extended_gromov, fixed_points, point_boundary_product
from .errors import BudgetExceeded, CoincidentBoundaryPoints, ConfigError, PreconditionFailed
from .spaces import HYPERBOLIC, ActionModel, Orbit
from .spectrum import translation_length
from .words import Word, parse_word

E1, E2, CASE1, PRIME = "E1", "E2", "case1", "prime"
LINEAR_SCAN = 64
MAX_EXPONENT = 1 << 22


@dataclass(frozen=True)
class BudgetFunction:
    """Nondecreasing f ≥ 1 with f(T) → ∞."""

    kind: str = "sqrt"
    table: tuple = ()  # piecewise: ((T₀, v₀), (T₁, v₁), ...) sorted by T, last step extends by sqrt

    def __call__(self, T: float) -> float:
        if T < 0:
            T = 0
        if self.kind == "sqrt":
            if float(T).is_integer():
                t = int(T)
                return max(1, math.isqrt(t - 1) + 1 if t > 0 else 0)
            return max(1, math.ceil(math.sqrt(T)))
        if self.kind == "log":
            return max(1, math.ceil(math.log1p(T)))
        if self.kind == "piecewise":
            v = 1
            for t0, val in self.table:
                if T >= t0:
                    v = max(v, val)
            return v
        raise ConfigError(f"unknown budget kind {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "BudgetFunction":
        text = text.strip().lower()
        if text in ("sqrt", "log"):
            return cls(text)
        if text.startswith("piecewise:"):
            steps = []
            for part in text[10:].split(","):
                t0, v = part.split("=")
                steps.append((float(t0), int(v)))
            return cls("piecewise", tuple(sorted(steps)))
        raise ConfigError(f"unknown budget {text!r} (sqrt, log, piecewise:T=v,...)")


@dataclass(frozen=True)
class Member:
    element: Word
    i: int
    eta: Word
    n: int
    branch: str
    theta: Word | None
    gamma: Word
    length: float

    def rebuild(self) -> Word:
        core = self.gamma ** (-self.n) * self.eta.inverse()
        return self.theta * core if self.branch == E2 else core


@dataclass
class RigidSet:
    members: list[Member] = field(default_factory=list)
    gamma: Word | None = None
    theta: Word | None = None
    budget: BudgetFunction = field(default_factory=BudgetFunction)
    severity: float = 1.0
    skipped: list[tuple[str, str]] = field(default_factory=list)

    def elements(self) -> list[Word]:
        return [m.element for m in self.members]

    def __len__(self) -> int:
        return len(self.members)


def _word(model: ActionModel, g) -> Word:
    if isinstance(g, str):
        return parse_word(g, model.rank)
    return model.check_word(g)


def choose_theta(model: ActionModel, g, radius: int = 2) -> Word:
    """First ball element θ (canonical order) with θγ⁻ ≠ γ⁻."""
    g = _word(model, g)
    _, minus = fixed_points(model, g)
    for theta in model.ball(radius):
        if not theta:
            continue
        try:
            extended_gromov(model, minus.translate(theta), minus)
        except CoincidentBoundaryPoints:
            continue
        return theta
    raise PreconditionFailed(f"no θ within radius {radius}: action may be elementary")


def _search(pred: Callable[[int], bool], start: int) -> int:
    """Smallest-ish n ≥ start with pred(n): linear scan, then gallop and bisect."""
    n = start
    for n in range(start, start + LINEAR_SCAN):
        if pred(n):
            return n
    lo, step = start + LINEAR_SCAN - 1, LINEAR_SCAN
    hi = lo + step
    while not pred(hi):
        lo, step = hi, step * 2
        hi = lo + step
        if hi > MAX_EXPONENT:
            raise BudgetExceeded("exponent search (budget infeasible at this severity; try a smaller one)",
                                 MAX_EXPONENT)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _pick_exponents(model: ActionModel, length_model: ActionModel, build: Callable[[int], Word],
                    depth_target: BoundaryPoint, i: int, M: int, f: BudgetFunction, severity: float,
                    taken: set[Word], primary_only: bool) -> list[tuple[int, Word, float]]:
    thr = severity * i * i * (model.delta + 1)
    out: list[tuple[int, Word, float]] = []
    n_prev, ell_prev = 0, -math.inf
    for m in range(1, M + 1):
        need = m * 2 ** i

        def ok(n: int) -> bool:
            w = build(n)
            if w in taken or (primary_only and w.is_proper_power()):
                return False
            ell = translation_length(length_model, w).value.lower
            if ell < ell_prev or f(ell) < need:
                return False
            if m > 1 and point_boundary_product(model, Orbit(w), depth_target).lower < thr:
                return False
            return True

        n = _search(ok, n_prev + 1)
        w = build(n)
        ell = translation_length(length_model, w).value.lower
        out.append((n, w, ell))
        taken.add(w)
        n_prev, ell_prev = n, ell
    return out


def build_E_phi(model: ActionModel, g, theta=None, f: BudgetFunction | None = None, per_eta: int = 2,
                radius: int = 1, severity: float = 1.0, quasi_parabolic: bool = False,
                length_model: ActionModel | None = None) -> RigidSet:
    """Greedy construction of E_φ over the canonical ball of η's."""
    g = _word(model, g)
    f = f or BudgetFunction()
    if per_eta < 1:
        raise ConfigError("per-eta count must be >= 1")
    plus, minus = fixed_points(model, g)
    if not quasi_parabolic:
        theta = _word(model, theta) if theta is not None else choose_theta(model, g)
        ref = extended_gromov(model, minus.translate(theta), minus)
    E = RigidSet(gamma=g, theta=None if quasi_parabolic else theta, budget=f, severity=severity)
    taken: set[Word] = set()
    lm = length_model or model
    for i, eta in enumerate(model.ball(radius), start=1):
        eta_inv = eta.inverse()
        if quasi_parabolic:
            branch = CASE1
        else:
            try:
                near = extended_gromov(model, plus.translate(eta), minus)
            except CoincidentBoundaryPoints:
                E.skipped.append((str(eta), "ηγ⁺ = γ⁻"))
                continue
            # ties (overlapping enclosures) resolve to E¹
            branch = E1 if near.lower <= ref.upper + 2 * model.delta else E2
        if branch == E2:
            build = lambda n, e=eta_inv: theta * (g ** (-n)) * e  # noqa: E731
            target = minus.translate(theta)
        else:
            build = lambda n, e=eta_inv: (g ** (-n)) * e  # noqa: E731
            target = minus
        for n, w, ell in _pick_exponents(model, lm, build, target, i, per_eta, f, severity, taken, False):
            E.members.append(Member(w, i, eta, n, branch, theta if branch == E2 else None, g, ell))
    return E


def _in_cyclic_group(eta: Word, root: Word) -> bool:
    if not eta:
        return True
    r = eta.primitive_root()
    if r != root and r != root.inverse():
        return False
    # η = r^k exactly (not merely a conjugate)
    k = len(eta.cyclic_core) // max(1, len(root.cyclic_core))
    return eta == root ** k or eta == root ** (-k)


def build_E_prime(model: ActionModel, f: BudgetFunction | None = None, radius: int = 1, per_gamma: int = 1,
                  severity: float = 1.0, eta_radius: int = 2,
                  length_model: ActionModel | None = None) -> RigidSet:
    """E′_φ = {γ^{−n}η_γ⁻¹ : γ primary hyperbolic}, every member primary."""
    f = f or BudgetFunction()
    E = RigidSet(budget=f, severity=severity)
    taken: set[Word] = set()
    lm = length_model or model
    etas = model.ball(eta_radius)
    i = 0
    for g in model.ball(radius):
        if not g or model.classify(g) != HYPERBOLIC:
            continue
        if g.is_proper_power():
            E.skipped.append((str(g), "proper power"))
            continue
        i += 1
        plus, minus = fixed_points(model, g)
        root = g.primitive_root()
        eta = None
        for cand in etas:
            if _in_cyclic_group(cand, root):
                continue
            try:
                extended_gromov(model, minus.translate(cand), plus)
            except CoincidentBoundaryPoints:
                continue
            eta = cand
            break
        if eta is None:
            E.skipped.append((str(g), f"no η_γ within radius {eta_radius}"))
            continue
        build = lambda n, gg=g, e=eta.inverse(): (gg ** (-n)) * e  # noqa: E731
        for n, w, ell in _pick_exponents(model, lm, build, minus, i, per_gamma, f, severity, taken, True):
            E.members.append(Member(w, i, eta, n, PRIME, None, g, ell))
    bad = [m.element for m in E.members if m.element.is_proper_power()]
    if bad:
        raise PreconditionFailed(f"non-primary members {bad}")
    return E


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SparsityResult:
    passed: bool
    histogram: tuple  # ((T, #{ℓ ≤ T}, f(T)), ...)
    first_violation: tuple | None


def sparsity_check(E: RigidSet | Sequence[Word], model: ActionModel, f: BudgetFunction,
                   T_max: float | None = None) -> SparsityResult:
    """Exact recount of #{γ ∈ E : ℓ(γ) ≤ T} ≤ f(T) at every member length.

    The count only jumps at member lengths and f is nondecreasing, so those
    are the only places a violation can first appear.
    """
    words = E.elements() if isinstance(E, RigidSet) else list(E)
    lengths = sorted(translation_length(model, w).value.upper for w in words)
    hist = []
    bad = None
    k = 0
    for idx, T in enumerate(lengths):
        if idx + 1 < len(lengths) and lengths[idx + 1] == T:
            continue
        if T_max is not None and T > T_max:
            break
        k = idx + 1
        fT = f(T)
        hist.append((T, k, fT))
        if k > fT and bad is None:
            bad = (T, k, fT)
    return SparsityResult(bad is None, tuple(hist), bad)


@dataclass(frozen=True)
class ProbeReport:
    max_diff_E: float
    max_diff_ball: float
    ball_witness: Word | None
    first_E_witness: Word | None
    first_E_index: int | None
    checked: int


def rigidity_probe(E: RigidSet | Sequence[Word], model_a: ActionModel, model_b: ActionModel, radius: int,
                   tol: float = 1e-9, limit: int | None = None) -> ProbeReport:
    words = E.elements() if isinstance(E, RigidSet) else list(E)
    if limit is not None:
        words = words[:limit]
    max_e, first, first_idx = 0.0, None, None
    for k, w in enumerate(words):
        d = abs(translation_length(model_a, w).estimate - translation_length(model_b, w).estimate)
        max_e = max(max_e, d)
        if d > tol and first is None:
            first, first_idx = w, k
    max_b, wb = 0.0, None
    for w in model_a.ball(radius):
        d = abs(translation_length(model_a, w).estimate - translation_length(model_b, w).estimate)
        if d > max_b:
            max_b, wb = d, w
    return ProbeReport(max_e, max_b, wb, first, first_idx, len(words))


def escape_trend(E: RigidSet, model: ActionModel) -> list[float]:
    """⟨member·o, γ⁻⟩ (θγ⁻ for E²) per member, in construction order."""
    out = []
    for m in E.members:
        _, minus = fixed_points(model, m.gamma)
        target = minus.translate(m.theta) if m.branch == E2 else minus
        out.append(point_boundary_product(model, Orbit(m.element), target).estimate)
    return out
