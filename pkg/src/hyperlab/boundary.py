"""Boundary points as lazy rays and extended Gromov products.

A :class:`BoundaryPoint` is a model-independent *specification* written in
the shared alphabet (fixed point of a word, eventually periodic infinite
word, explicit geodesic ray, or a translate of another point).  Each model
turns the spec into a ray ``n -> point``; word-type specs produce orbit
points ``w·o`` so far-out distances are computed on reduced words.

Trees get an exact closed form (longest common prefix of canonical infinite
words); every other model uses the tail-window liminf with enclosure
``[m, m + 2δ]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .errors import CoincidentBoundaryPoints, NotHyperbolic
from .intervals import IntervalValue
from .spaces import HYPERBOLIC, ActionModel, FreeTree, Orbit, UpperHalfPlane
from .words import InfiniteWord, Word, common_prefix, parse_word

DEPTH_START = 8
DEPTH_CEILING = 2 ** 14
CHANGE_TOL = 0.01
EXPLICIT_CEILING = 30.0  # float resolution of coordinates near ∂H²


class Tag(str, Enum):
    FIXED_PLUS = "FixedPlus"
    FIXED_MINUS = "FixedMinus"
    INFINITE_WORD = "InfiniteWord"
    EXPLICIT_RAY = "ExplicitRay"
    TRANSLATE = "Translate"


@dataclass(frozen=True)
class BoundaryPoint:
    tag: Tag
    word: Word | None = None
    infinite: InfiniteWord | None = None
    real: float | None = None
    inner: "BoundaryPoint | None" = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def fixed_plus(cls, g: Word | str) -> "BoundaryPoint":
        return cls(Tag.FIXED_PLUS, word=_w(g))

    @classmethod
    def fixed_minus(cls, g: Word | str) -> "BoundaryPoint":
        return cls(Tag.FIXED_MINUS, word=_w(g))

    @classmethod
    def infinite_word(cls, prefix: Word | str | bytes, period: Word | str | bytes) -> "BoundaryPoint":
        return cls(Tag.INFINITE_WORD, infinite=InfiniteWord(_w(prefix), _w(period)))

    @classmethod
    def explicit_ray(cls, xi: float) -> "BoundaryPoint":
        return cls(Tag.EXPLICIT_RAY, real=float(xi))

    def translate(self, eta: Word | str) -> "BoundaryPoint":
        """η·x."""
        eta = _w(eta)
        if not eta:
            return self
        if self.tag is Tag.TRANSLATE:
            return BoundaryPoint(Tag.TRANSLATE, word=eta * self.word, inner=self.inner)
        return BoundaryPoint(Tag.TRANSLATE, word=eta, inner=self)

    # -- rays ---------------------------------------------------------------
    @property
    def word_type(self) -> bool:
        if self.tag is Tag.TRANSLATE:
            return self.inner.word_type
        return self.tag is not Tag.EXPLICIT_RAY

    def word_ray(self, n: int) -> Word | None:
        """Shared word w_n with ray(n) = w_n·o, or None for explicit rays."""
        t = self.tag
        if t is Tag.FIXED_PLUS:
            return self.word ** n
        if t is Tag.FIXED_MINUS:
            return self.word ** (-n)
        if t is Tag.INFINITE_WORD:
            return Word(self.infinite.head(n), reduced=True)
        if t is Tag.TRANSLATE:
            inner = self.inner.word_ray(n)
            return None if inner is None else self.word * inner
        return None

    def native_ray(self, model: ActionModel, n: float):
        if self.tag is Tag.EXPLICIT_RAY:
            if not isinstance(model, UpperHalfPlane):
                raise TypeError("explicit rays are defined for the upper half plane only")
            return model.geodesic_point(model.base_point, self.real, float(n))
        if self.tag is Tag.TRANSLATE:
            return model.apply(self.word, self.inner.native_ray(model, n))
        return model.resolve(Orbit(self.word_ray(n)))

    def ray(self, model: ActionModel, n: int):
        w = self.word_ray(n)
        return Orbit(w) if w is not None else self.native_ray(model, n)

    def attractor_form(self) -> tuple[Word, Word]:
        """(η, γ) with this point equal to η·γ⁺ (word-type points only)."""
        t = self.tag
        if t is Tag.FIXED_PLUS:
            return Word.identity(), self.word
        if t is Tag.FIXED_MINUS:
            return Word.identity(), self.word.inverse()
        if t is Tag.INFINITE_WORD:
            return Word(self.infinite.prefix, reduced=True), Word(self.infinite.period, reduced=True)
        if t is Tag.TRANSLATE:
            eta, g = self.inner.attractor_form()
            return self.word * eta, g
        raise TypeError("explicit rays have no attractor form")

    def boundary_real(self, model: UpperHalfPlane) -> float:
        """Endpoint on R ∪ {∞} in the upper half plane."""
        if self.tag is Tag.EXPLICIT_RAY:
            return self.real
        if self.tag is Tag.TRANSLATE:
            return model.element(self.word).boundary_map(self.inner.boundary_real(model))
        eta, g = self.attractor_form()
        plus, _ = model.fixed_reals(g)
        return model.element(eta).boundary_map(plus)

    def __str__(self) -> str:
        t = self.tag
        if t is Tag.FIXED_PLUS:
            return f"+({self.word})"
        if t is Tag.FIXED_MINUS:
            return f"-({self.word})"
        if t is Tag.INFINITE_WORD:
            return str(self.infinite)
        if t is Tag.EXPLICIT_RAY:
            return f"ray({self.real:.12g})"
        return f"{self.word}*{self.inner}"


def _w(g) -> Word:
    if isinstance(g, Word):
        return g
    if isinstance(g, (bytes, bytearray)):
        return Word(g)
    return parse_word(g)


def canonical_key(x: BoundaryPoint):
    """Key identifying the boundary point itself (free-group marking assumed)."""
    if not x.word_type:
        if x.tag is Tag.TRANSLATE:
            return ("ray", str(x.word), canonical_key(x.inner))
        return ("ray", x.real)
    eta, g = x.attractor_form()
    u, c = g.cyclic_decomposition
    if not c:
        raise NotHyperbolic(f"{g} has no axis")
    return InfiniteWord(u, c).left_multiply(eta)


def dedupe(points) -> tuple:
    seen = {}
    for x in points:
        seen.setdefault(canonical_key(x), x)
    return tuple(seen.values())


def parse_boundary(text: str) -> BoundaryPoint:
    """``+ab`` / ``-ab`` (fixed points), ``u(c)`` (u·c^∞), ``ray:1.5``, ``ray:inf``, ``h*<spec>``."""
    text = text.strip()
    if "*" in text:
        head, rest = text.split("*", 1)
        return parse_boundary(rest).translate(head)
    if text.startswith("ray:"):
        return BoundaryPoint.explicit_ray(float(text[4:]))
    if text.startswith("+"):
        return BoundaryPoint.fixed_plus(text[1:])
    if text.startswith("-"):
        return BoundaryPoint.fixed_minus(text[1:])
    if text.endswith(")") and "(" in text:
        i = text.rindex("(")
        return BoundaryPoint.infinite_word(text[:i] or "e", text[i + 1:-1])
    from .errors import ConfigError

    raise ConfigError(f"cannot parse boundary point {text!r}")


# ---------------------------------------------------------------------------
# exact tree computations

def tree_word(model: FreeTree, x: BoundaryPoint) -> InfiniteWord:
    """Canonical infinite word of x in the tree's own alphabet."""
    eta, g = x.attractor_form()
    u, c = model.element(g).cyclic_decomposition
    if not c:
        raise NotHyperbolic(f"{g} has no axis")
    return InfiniteWord(u, c).left_multiply(model.element(eta))


def _tree_native(model: FreeTree, p) -> Word:
    return model.resolve(p)


def tree_product(model: FreeTree, x: BoundaryPoint, y: BoundaryPoint, o=None) -> int:
    o_inv = _tree_native(model, o if o is not None else model.base_point).inverse()
    X = tree_word(model, x).left_multiply(o_inv)
    Y = tree_word(model, y).left_multiply(o_inv)
    return _iw_lcp(X, Y, x, y)


def _iw_lcp(X: InfiniteWord, Y: InfiniteWord, x=None, y=None) -> int:
    n = X.comparison_length(Y)
    k = common_prefix(X.head(n), Y.head(n))
    if k >= n:
        raise CoincidentBoundaryPoints(f"coincident boundary points {x} and {y}")
    return k


def tree_point_product(model: FreeTree, p, x: BoundaryPoint, o=None) -> int:
    o_n = _tree_native(model, o if o is not None else model.base_point)
    rel = (o_n.inverse() * _tree_native(model, p)).letters
    X = tree_word(model, x).left_multiply(o_n.inverse())
    return common_prefix(rel, X.head(len(rel)))


# ---------------------------------------------------------------------------
# windowed liminf

def _product(model: ActionModel, p, q, o) -> float:
    return 0.5 * (model.dist(p, o) + model.dist(q, o) - model.dist(p, q))


def _window_indices(n: int) -> list[int]:
    return sorted({max(1, n // 2), max(1, (3 * n) // 4), n})


def _ceiling(model: ActionModel, *points: BoundaryPoint) -> float:
    if any(not x.word_type for x in points):
        return min(model.divergence_ceiling, EXPLICIT_CEILING)
    return model.divergence_ceiling + 2 * model.delta


def _windowed(model: ActionModel, f: Callable[[int], float], depth: int | None,
              ceiling: float, what: str) -> IntervalValue:
    """Running min over tail windows, depth doubling until stable."""
    from .errors import BallExceeded

    delta = model.delta
    if depth is not None:
        m = f(depth)
        if m > ceiling:
            raise CoincidentBoundaryPoints(f"{what}: product {m:.6g} exceeds divergence ceiling {ceiling:.6g}")
        return IntervalValue(m, m + 2 * delta, depth, m)
    prev = None
    n = DEPTH_START
    m = None
    change = 0.0
    while n <= DEPTH_CEILING:
        try:
            cur = f(n)
        except (BallExceeded, _RayLimit):
            if m is None:
                raise
            break
        if cur > ceiling:
            raise CoincidentBoundaryPoints(f"{what}: product {cur:.6g} exceeds divergence ceiling {ceiling:.6g}")
        m = cur
        if prev is not None:
            change = abs(cur - prev)
            if change < CHANGE_TOL:
                break
        prev = cur
        n *= 2
    depth_used = min(n, DEPTH_CEILING)
    return IntervalValue(m - change, m + 2 * delta, depth_used, m)


class _RayLimit(Exception):
    pass


def _ray(model: ActionModel, x: BoundaryPoint, n: int):
    if not x.word_type and n > model.max_ray_distance:
        raise _RayLimit
    return x.ray(model, n)


def extended_gromov(model: ActionModel, x: BoundaryPoint, y: BoundaryPoint, o=None,
                    depth: int | None = None) -> IntervalValue:
    """⟨x, y⟩_o as an enclosure; exact on trees."""
    if o is None:
        o = Orbit(Word.identity())
    if isinstance(model, FreeTree):
        v = tree_product(model, x, y, o)
        return IntervalValue.exact(v, depth or 0)

    def f(n: int) -> float:
        idx = _window_indices(n)
        xs = [_ray(model, x, i) for i in idx]
        ys = [_ray(model, y, j) for j in idx]
        return min(_product(model, p, q, o) for p in xs for q in ys)

    return _windowed(model, f, depth, _ceiling(model, x, y), f"⟨{x}, {y}⟩")


def point_boundary_product(model: ActionModel, p, x: BoundaryPoint, o=None,
                           depth: int | None = None) -> IntervalValue:
    """⟨p, x⟩_o for a point p and a boundary point x."""
    if o is None:
        o = Orbit(Word.identity())
    if isinstance(model, FreeTree):
        return IntervalValue.exact(tree_point_product(model, p, x, o), depth or 0)

    def f(n: int) -> float:
        return min(_product(model, p, _ray(model, x, j), o) for j in _window_indices(n))

    # a finite point never diverges against a boundary point
    return _windowed(model, f, depth, math.inf, f"⟨{p}, {x}⟩")


def same_boundary_point(model: ActionModel, x: BoundaryPoint, y: BoundaryPoint) -> bool:
    try:
        extended_gromov(model, x, y)
    except CoincidentBoundaryPoints:
        return True
    return False


# ---------------------------------------------------------------------------
# fixed points and limit-set samples

def fixed_points(model: ActionModel, g: Word | str) -> tuple[BoundaryPoint, BoundaryPoint]:
    g = _w(g)
    if model.classify(g) != HYPERBOLIC:
        raise NotHyperbolic(f"{g} is not hyperbolic: no axis")
    return BoundaryPoint.fixed_plus(g), BoundaryPoint.fixed_minus(g)


def fixed_point_reals(model: UpperHalfPlane, g: Word | str) -> tuple[float, float]:
    """Eigenvector oracle: (γ⁺, γ⁻) as points of R ∪ {∞}."""
    return model.fixed_reals(_w(g) if isinstance(g, str) else g)


def limit_set_sample(model: ActionModel, count: int, radius: int, seed: int = 0,
                     separation: float | None = None) -> list[BoundaryPoint]:
    """Attracting fixed points of hyperbolic ball elements, deduplicated.

    Deduplication uses primitive roots (equal fixed points in a free group
    means a common root); ``separation`` additionally drops points whose
    extended product with a kept point exceeds it.
    """
    from .errors import ConfigError

    if count < 1:
        raise ConfigError("count must be >= 1")
    ball = [g for g in model.ball(radius) if g and model.classify(g) == HYPERBOLIC]
    if not ball:
        raise NotHyperbolic(f"no hyperbolic element in the radius-{radius} ball")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(ball)) if seed is not None else range(len(ball))
    seen: set[Word] = set()
    out: list[BoundaryPoint] = []
    for k in order:
        g = ball[int(k)]
        root = g.primitive_root()
        if root in seen:
            continue
        x = BoundaryPoint.fixed_plus(root)
        if separation is not None:
            try:
                if any(extended_gromov(model, x, y).estimate > separation for y in out):
                    continue
            except CoincidentBoundaryPoints:
                continue
        seen.add(root)
        out.append(x)
        if len(out) >= count:
            break
    return out


# ---------------------------------------------------------------------------
# sequences converging to a boundary point

def _auxiliary(g: Word, rank: int) -> BoundaryPoint:
    """A fixed point distinct from γ^±: first ball word with a different root."""
    from .spaces import word_ball

    r = g.primitive_root()
    for w in word_ball(rank, 2):
        if w and w.cyclic_length() > 0:
            wr = w.primitive_root()
            if wr != r and wr != r.inverse():
                return BoundaryPoint.fixed_plus(w)
    raise NotHyperbolic("no auxiliary boundary point")


def approximant(x: BoundaryPoint, k: int, rank: int) -> BoundaryPoint:
    """k-th term of a sequence of boundary points converging to x."""
    if x.tag is Tag.EXPLICIT_RAY:
        xi = x.real
        return BoundaryPoint.explicit_ray(2.0 ** k if math.isinf(xi) else xi + 2.0 ** (-k))
    if x.tag is Tag.TRANSLATE and not x.inner.word_type:
        return approximant(x.inner, k, rank).translate(x.word)
    eta, g = x.attractor_form()
    z = _auxiliary(g, max(rank, g.max_generator() + 1))
    return z.translate(eta * g ** k)
