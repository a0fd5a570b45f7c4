"""Busemann functions and the rough Busemann cocycle.

Two conventions are carried side by side:

* ``DIRECT``  c(γ, x) = B_{o, γo}(x)
* ``INVERSE`` c̃(γ, x) = B_{o, γ⁻¹o}(x)

Downstream modules default to ``INVERSE``; on trees it is the one whose
cocycle identity c̃(γγ′,x) = c̃(γ,γ′x) + c̃(γ′,x) holds with zero defect.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .boundary import BoundaryPoint, extended_gromov, point_boundary_product
from .errors import CoincidentBoundaryPoints, ConfigError, PreconditionFailed
from .intervals import IntervalValue
from .spaces import ActionModel, Orbit
from .words import Word, parse_word


class Convention(str, Enum):
    DIRECT = "direct"
    INVERSE = "inverse"


def _word(model: ActionModel, g) -> Word:
    if isinstance(g, str):
        return parse_word(g, model.rank)
    return model.check_word(g)


def _origin():
    return Orbit(Word.identity())


def busemann(model: ActionModel, o, p, x: BoundaryPoint, depth: int | None = None) -> IntervalValue:
    """B_{o,p}(x) = 2⟨p, x⟩_o − d(o, p)."""
    return point_boundary_product(model, p, x, o, depth).scale(2) - model.dist(o, p)


def cocycle(model: ActionModel, g, x: BoundaryPoint, convention: Convention = Convention.INVERSE,
            depth: int | None = None) -> IntervalValue:
    g = _word(model, g)
    p = Orbit(g if convention is Convention.DIRECT else g.inverse())
    return busemann(model, _origin(), p, x, depth)


def extended_cocycle(model: ActionModel, g, p) -> float:
    """c(γ, p) = d(o, p) − d(γo, p) for a point p."""
    g = _word(model, g)
    return model.dist(_origin(), p) - model.dist(Orbit(g), p)


def cocycle_identity_defect(model: ActionModel, g, h, x: BoundaryPoint,
                            convention: Convention = Convention.INVERSE, depth: int | None = None,
                            transformed: bool = False) -> IntervalValue:
    """c(γγ′,x) − c(γ,γ′x) − c(γ′,x).

    ``transformed`` gives the Direct-convention variant
    c(γγ′,x) − c(γ,x) − c(γ′,γ⁻¹x), which is exact on trees.
    """
    g, h = _word(model, g), _word(model, h)
    c = lambda a, y: cocycle(model, a, y, convention, depth)  # noqa: E731
    if transformed:
        return c(g * h, x) - c(g, x) - c(h, x.translate(g.inverse()))
    return c(g * h, x) - c(g, x.translate(h)) - c(h, x)


@dataclass(frozen=True)
class TransformDefect:
    literal: IntervalValue  # ⟨x,y⟩ − ⟨γx,γy⟩ − c(γ,x) − c(γ,y), chosen convention
    half_sum: IntervalValue  # ⟨x,y⟩ − ⟨γx,γy⟩ − ½(c̃(γ,x) + c̃(γ,y))


def product_transform_defect(model: ActionModel, g, x: BoundaryPoint, y: BoundaryPoint,
                             convention: Convention = Convention.DIRECT,
                             depth: int | None = None) -> TransformDefect:
    g = _word(model, g)
    diff = extended_gromov(model, x, y, None, depth) - extended_gromov(
        model, x.translate(g), y.translate(g), None, depth)
    lit = diff - cocycle(model, g, x, convention, depth) - cocycle(model, g, y, convention, depth)
    inv = Convention.INVERSE
    half = diff - (cocycle(model, g, x, inv, depth) + cocycle(model, g, y, inv, depth)).scale(0.5)
    return TransformDefect(lit, half)


def continuity_defect(model: ActionModel, g, ys: Sequence[BoundaryPoint], x: BoundaryPoint,
                      convention: Convention = Convention.INVERSE, depth: int | None = None) -> IntervalValue:
    """(tail running min of c(γ, yᵢ)) − c(γ, x) for yᵢ → x."""
    if len(ys) < 2:
        raise ConfigError("continuity check needs at least two sequence terms")
    closeness = []
    for y in ys:
        try:
            closeness.append(math.inf if y == x else extended_gromov(model, y, x, None, depth).estimate)
        except CoincidentBoundaryPoints:
            closeness.append(math.inf)
    # a sequence already at x counts as converged
    if closeness[-1] != math.inf and not closeness[-1] > closeness[0]:
        raise PreconditionFailed("sequence does not converge to x (extended products not growing)")
    tail = ys[len(ys) // 2:]
    vals = [cocycle(model, g, y, convention, depth) for y in tail]
    m = IntervalValue(min(v.lower for v in vals), min(v.upper for v in vals),
                      max(v.depth for v in vals), min(v.estimate for v in vals))
    return m - cocycle(model, g, x, convention, depth)
