"""Translation lengths, stable-length checks, the main relation, spectrum tables."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .boundary import BoundaryPoint, extended_gromov, fixed_points
from .busemann import Convention, cocycle
from .errors import CoincidentBoundaryPoints, PreconditionFailed
from .intervals import IntervalValue
from .spaces import HYPERBOLIC, ActionModel, FreeTree, UpperHalfPlane
from .words import Word, parse_word

CYCLIC = "CyclicReduction"
TRACE = "Trace"
POWER = "PowerDifference"

DEFAULT_N = 2 ** 10
WIDTH_TARGET = 1e-2
MAX_N = 2 ** 16


@dataclass(frozen=True)
class LengthEstimate:
    value: IntervalValue
    method: str
    element: Word
    classification: str = HYPERBOLIC

    @property
    def estimate(self) -> float:
        return self.value.estimate


def _word(model: ActionModel, g) -> Word:
    if isinstance(g, str):
        return parse_word(g, model.rank)
    return model.check_word(g)


def best_method(model: ActionModel) -> str:
    if isinstance(model, FreeTree):
        return CYCLIC
    if isinstance(model, UpperHalfPlane):
        return TRACE
    return POWER


def translation_length(model: ActionModel, g, method: str | None = None, N: int | None = None,
                       auto: bool = True) -> LengthEstimate:
    """ℓ(γ) by cyclic reduction (trees), trace (H²), or power differences.

    PowerDifference: (d(γ^{2N}o,o) − d(γ^N o,o))/N ± (4δ/N + tol); with
    ``auto`` N doubles from 2¹⁰ until the enclosure is narrower than 1e−2.
    """
    g = _word(model, g)
    method = method or best_method(model)
    cls = model.classify(g)
    if method == CYCLIC:
        if not isinstance(model, FreeTree):
            raise PreconditionFailed("CyclicReduction needs a free tree model")
        return LengthEstimate(IntervalValue.exact(model.element(g).cyclic_length()), CYCLIC, g, cls)
    if method == TRACE:
        if not isinstance(model, UpperHalfPlane):
            raise PreconditionFailed("Trace needs a matrix model")
        v = model.trace_length(g)
        return LengthEstimate(IntervalValue.exact(v), TRACE, g, cls)
    if method.startswith(POWER):
        return _power_difference(model, g, N or DEFAULT_N, auto and N is None, cls)
    raise PreconditionFailed(f"unknown length method {method!r}")


def _power_difference(model: ActionModel, g: Word, N: int, auto: bool, cls: str) -> LengthEstimate:
    tol = max(model.tolerance, 1e-12)
    while True:
        d2 = model.displacement(g, 2 * N)
        d1 = model.displacement(g, N)
        value = (d2 - d1) / N
        slack = 4 * model.delta / N + tol
        width = 2 * slack
        if not auto or width < WIDTH_TARGET or N >= MAX_N:
            break
        N *= 2
    if cls == HYPERBOLIC and 0 < d2 - d1 < tol:
        raise PreconditionFailed(f"increase N: N·ℓ = {d2 - d1:.3g} is below resolution")
    iv = IntervalValue(max(0.0, value - slack), value + slack, N, value)
    return LengthEstimate(iv, f"{POWER}({N})", g, cls)


def length_value(model: ActionModel, g) -> float:
    return translation_length(model, g).estimate


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StableLengthDefect:
    plus: IntervalValue
    minus: IntervalValue
    length: float


def stable_length_defect(model: ActionModel, g, convention: Convention = Convention.DIRECT,
                         depth: int | None = None) -> StableLengthDefect:
    """Direct: c(γ,γ⁺) − ℓ and c(γ,γ⁻) + ℓ.  Inverse: c̃(γ,γ⁺) + ℓ and c̃(γ,γ⁻) − ℓ."""
    g = _word(model, g)
    plus, minus = fixed_points(model, g)
    ell = translation_length(model, g).value
    cp = cocycle(model, g, plus, convention, depth)
    cm = cocycle(model, g, minus, convention, depth)
    if convention is Convention.DIRECT:
        return StableLengthDefect(cp - ell, cm + ell, ell.estimate)
    return StableLengthDefect(cp + ell, cm - ell, ell.estimate)


@dataclass(frozen=True)
class MainRelation:
    literal: IntervalValue  # c(η,γ⁺) + nℓ(γ) − ℓ(ηγⁿ), chosen convention
    literal_bound: IntervalValue  # |⟨γ⁺,γ⁻⟩ − ⟨ηγ⁺,γ⁻⟩| + 12δ
    corrected: IntervalValue  # ℓ(ηγⁿ) − [nℓ(γ) − c̃(η,γ⁺) + 2(⟨γ⁺,γ⁻⟩ − ⟨ηγ⁺,γ⁻⟩)]
    length: float

    @property
    def literal_exceeds(self) -> bool:
        return self.literal.abs().lower > self.literal_bound.upper


def main_relation_defect(model: ActionModel, eta, g, n: int, convention: Convention = Convention.DIRECT,
                         depth: int | None = None) -> MainRelation:
    eta, g = _word(model, eta), _word(model, g)
    if n < 1:
        raise PreconditionFailed("n must be >= 1")
    plus, minus = fixed_points(model, g)
    try:
        far = extended_gromov(model, plus.translate(eta), minus, None, depth)
    except CoincidentBoundaryPoints:
        raise PreconditionFailed(f"ηγ⁺ = γ⁻ for η={eta}, γ={g}") from None
    prod = eta * g ** n
    if model.classify(prod) != HYPERBOLIC:
        raise PreconditionFailed(f"ηγⁿ = {prod} is not hyperbolic")
    near = extended_gromov(model, plus, minus, None, depth)
    # the relation is a limit in n: (ηγⁿ)⁻ must already sit closer to γ⁻ than γ⁺ and ηγ⁺ do
    try:
        conv = extended_gromov(model, BoundaryPoint.fixed_minus(prod), minus, None, depth)
        if conv.lower <= max(near.upper, far.upper) + 2 * model.delta:
            raise PreconditionFailed(f"n={n} not in the asymptotic regime: (ηγⁿ)⁻ has not converged to γ⁻")
    except CoincidentBoundaryPoints:
        pass
    ell_g = translation_length(model, g).value
    ell_p = translation_length(model, prod).value
    lit = cocycle(model, eta, plus, convention, depth) + ell_g.scale(n) - ell_p
    bound = (near - far).abs() + 12 * model.delta
    corr = ell_p - (ell_g.scale(n) - cocycle(model, eta, plus, Convention.INVERSE, depth)
                    + (near - far).scale(2))
    return MainRelation(lit, bound, corr, ell_p.estimate)


# ---------------------------------------------------------------------------

@dataclass
class SpectrumRow:
    word: Word
    value: IntervalValue
    method: str
    classification: str


@dataclass
class SpectrumTable:
    model_id: str
    rows: list[SpectrumRow] = field(default_factory=list)

    def values(self) -> dict[Word, float]:
        return {r.word: r.value.estimate for r in self.rows}

    def __len__(self) -> int:
        return len(self.rows)


def mls_table(model: ActionModel, elements: Iterable[Word | str]) -> SpectrumTable:
    table = SpectrumTable(model.name)
    for g in elements:
        est = translation_length(model, g)
        table.rows.append(SpectrumRow(est.element, est.value, est.method, est.classification))
    return table


@dataclass(frozen=True)
class SpectrumComparison:
    max_diff: float
    max_ratio: float
    witness_diff: Word | None
    witness_ratio: Word | None
    count: int


def mls_compare(model_a: ActionModel, model_b: ActionModel, elements: Sequence[Word | str]) -> SpectrumComparison:
    """Sup-norm and multiplicative comparison of two spectra on shared words."""
    best_d, best_r = 0.0, 1.0
    wd = wr = None
    n = 0
    for g in elements:
        g = _word(model_a, g)
        _word(model_b, g)
        la, lb = length_value(model_a, g), length_value(model_b, g)
        n += 1
        d = abs(la - lb)
        if d > best_d:
            best_d, wd = d, g
        if la > 0 and lb > 0:
            r = max(la / lb, lb / la)
            if r > best_r:
                best_r, wr = r, g
        elif (la > 0) != (lb > 0):
            best_r, wr = math.inf, g
    return SpectrumComparison(best_d, best_r, wd, wr, n)


def conjugacy_class_key(model: ActionModel, g) -> str:
    """Canonical key of the conjugacy class (trees: least cyclic rotation)."""
    g = _word(model, g)
    if isinstance(model, FreeTree):
        w = model.element(g)
        return str(Word(w.conjugacy_key(), reduced=True))
    return str(Word(g.conjugacy_key(), reduced=True))

