"""Concrete groups acting isometrically on hyperbolic spaces.

Every model acts through a *marking*: a shared free alphabet (generators
``a, b, ...``) whose words name group elements in all models at once.  Two
models with the same rank therefore carry comparable actions of the same
abstract group, which is how lengths and boundary products are matched up.

* :class:`FreeTree` - the Cayley tree of a free group, optionally in a
  different basis (e.g. the word metric for ``{a, ab}``).
* :class:`WordMetricBall` - the word metric for a finite generating set of a
  free group, computed by BFS inside an explicitly budgeted ball.
* :class:`UpperHalfPlane` - 2x2 real matrices acting by Möbius maps on H².
"""
from __future__ import annotations

import cmath
import itertools
import math
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Any, Sequence

from .errors import BallExceeded, BudgetExceeded, ConfigError
from .words import Word, check_rank, parse_word

HYPERBOLIC = "hyperbolic"
PARABOLIC = "parabolic"
ELLIPTIC = "elliptic-or-identity"

DEFAULT_BALL_BUDGET = 2_000_000


@dataclass(frozen=True)
class Orbit:
    """The orbit point word·o of the model's base point.

    Distances between orbit points are evaluated as displacements of the
    reduced word w₁⁻¹w₂, which stays accurate far out toward the boundary
    where coordinates of the two points are no longer separable in floats.
    """

    word: Word

    def __str__(self) -> str:
        return f"{self.word}·o"


class Kind(str, Enum):
    FREE_TREE = "free_tree"
    WORD_METRIC_BALL = "word_metric_ball"
    UPPER_HALF_PLANE = "upper_half_plane"


def reduce(letters: Sequence[int] | str, rank: int) -> Word:
    """Free reduction of a raw word over ``rank`` generators."""
    if isinstance(letters, str):
        return parse_word(letters, rank)
    raw = bytes(letters)
    for x in raw:
        if x // 2 >= rank:
            raise ConfigError(f"unknown generator index {x // 2} (rank {rank})")
    return Word(raw)


def word_ball(rank: int, radius: int, budget: int = DEFAULT_BALL_BUDGET) -> list[Word]:
    """Reduced words of length <= radius in shortlex order (a < A < b < B ...)."""
    if radius < 0:
        raise ConfigError("radius must be >= 0")
    count = 1 + sum(2 * rank * (2 * rank - 1) ** (j - 1) for j in range(1, radius + 1))
    if count > budget:
        raise BudgetExceeded(f"ball of radius {radius} ({count} elements)", budget)
    out = [Word.identity()]
    level = [b""]
    for _ in range(radius):
        nxt = []
        for w in level:
            last = w[-1] ^ 1 if w else -1
            for x in range(2 * rank):
                if x != last:
                    nxt.append(w + bytes([x]))
        out.extend(Word(w, reduced=True) for w in nxt)
        level = nxt
    return out


class ActionModel:
    """Base class: a pointed metric space with an isometric action."""

    kind: Kind
    rank: int
    name: str = ""
    rough_constant: float = 0.0
    exact: bool = False
    divergence_ceiling: float = 1000.0
    max_ray_distance: float = math.inf
    tolerance: float = 0.0

    _delta: float | None = None
    delta_margin: float = 0.0

    # -- group side -------------------------------------------------------
    def element(self, g: Any):
        """Native representation of a shared word (or pass a native through)."""
        raise NotImplementedError

    def act(self, native, p):
        raise NotImplementedError

    def apply(self, g, p):
        return self.act(self.element(g), p)

    def orbit_point(self, g, base=None):
        return self.apply(g, self.base_point if base is None else base)

    def check_word(self, w: Word) -> Word:
        return check_rank(w, self.rank)

    # -- metric side ------------------------------------------------------
    base_point: Any

    def distance(self, p, q) -> float:
        raise NotImplementedError

    def displacement(self, g, n: int = 1, base=None) -> float:
        """d(gⁿ·o, o)."""
        raise NotImplementedError

    def resolve(self, p):
        """Native coordinates of a point (orbit points are applied to o)."""
        if isinstance(p, Orbit):
            return self.apply(p.word, self.base_point)
        return p

    def dist(self, p, q) -> float:
        """Distance accepting native points or :class:`Orbit` points."""
        if isinstance(p, Orbit) and isinstance(q, Orbit):
            return self.displacement(p.word.inverse() * q.word)
        return self.distance(self.resolve(p), self.resolve(q))

    def same_point(self, p, q) -> bool:
        return self.distance(p, q) <= self.tolerance

    def classify(self, g) -> str:
        raise NotImplementedError

    def ball(self, radius: int) -> list[Word]:
        return word_ball(self.rank, radius)

    @property
    def delta(self) -> float:
        """Hyperbolicity constant used by every tolerance check (δ̂ + margin)."""
        if self._delta is None:
            from .gromov import default_delta_estimate

            self._delta = default_delta_estimate(self).value
        return self._delta + self.delta_margin

    def set_delta(self, value: float) -> None:
        self._delta = float(value)

    def point_label(self, p) -> str:
        return str(p)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name or self.kind.value})"


class FreeTree(ActionModel):
    """Cayley tree of the free group F(model_rank).

    ``basis`` gives the images of the shared generators as words in the
    tree's own alphabet; it must be a free basis for the tree metric to be a
    word metric of the shared group (checked only for rank agreement).
    """

    kind = Kind.FREE_TREE
    exact = True

    def __init__(self, rank: int = 2, basis: Sequence[Word | str] | None = None,
                 base_point: Word | str | None = None, name: str = ""):
        if rank < 1:
            raise ConfigError("free tree rank must be >= 1")
        self.model_rank = rank
        if basis is None:
            self.basis = None
            self.rank = rank
        else:
            self.basis = [parse_word(b, rank) if isinstance(b, str) else check_rank(b, rank) for b in basis]
            self.rank = len(self.basis)
        if isinstance(base_point, str):
            base_point = parse_word(base_point, rank)
        self.base_point = base_point if base_point is not None else Word.identity()
        self.name = name or (f"tree{rank}" if basis is None else f"tree{rank}[{','.join(map(str, self.basis))}]")
        self._delta = 0.0

    @property
    def delta(self) -> float:
        return 0.0 + self.delta_margin

    def element(self, g) -> Word:
        if isinstance(g, str):
            g = parse_word(g, self.rank)
        if self.basis is None:
            return check_rank(g, self.rank)
        return self.check_word(g).substitute(self.basis)

    def act(self, native: Word, p: Word) -> Word:
        return native * p

    def distance(self, p: Word, q: Word) -> int:
        return len(p.inverse() * q)

    def displacement(self, g, n: int = 1, base=None) -> int:
        o = self.base_point if base is None else base
        return len(o.inverse() * (self.element(g) ** n) * o)

    def classify(self, g) -> str:
        return HYPERBOLIC if self.element(g).cyclic_length() > 0 else ELLIPTIC

    def with_base_point(self, p: Word) -> "FreeTree":
        m = FreeTree(self.model_rank, self.basis, p, name=f"{self.name}@{p}")
        m.delta_margin = self.delta_margin
        return m


class WordMetricBall(ActionModel):
    """Word metric on a subgroup of F(rank) for generators given as words.

    Group elements are reduced words of the ambient free group; distances
    are looked up in a BFS ball of the requested radius.
    """

    kind = Kind.WORD_METRIC_BALL
    exact = True

    def __init__(self, rank: int, generators: Sequence[Word | str], radius: int,
                 budget: int = DEFAULT_BALL_BUDGET, name: str = ""):
        self.rank = rank
        self.generators = [parse_word(g, rank) if isinstance(g, str) else check_rank(g, rank) for g in generators]
        if not self.generators or any(not g for g in self.generators):
            raise ConfigError("word metric needs nontrivial generators")
        self.radius = radius
        self.budget = budget
        self.base_point = Word.identity()
        self.name = name or f"wordball[{','.join(map(str, self.generators))}]"
        self.rough_constant = 0.0
        self._lengths, self._order = self._bfs()

    def _bfs(self) -> tuple[dict[Word, int], list[Word]]:
        steps = []
        for g in self.generators:
            steps.extend([g, g.inverse()])
        lengths = {Word.identity(): 0}
        order = [Word.identity()]
        queue = deque([Word.identity()])
        while queue:
            w = queue.popleft()
            k = lengths[w]
            if k == self.radius:
                continue
            for s in steps:
                v = w * s
                if v not in lengths:
                    lengths[v] = k + 1
                    order.append(v)
                    if len(lengths) > self.budget:
                        raise BudgetExceeded(f"BFS ball of radius {self.radius}", self.budget)
                    queue.append(v)
        return lengths, order

    def element(self, g) -> Word:
        if isinstance(g, str):
            g = parse_word(g, self.rank)
        return self.check_word(g)

    def act(self, native: Word, p: Word) -> Word:
        return native * p

    def word_length(self, g: Word) -> int:
        try:
            return self._lengths[g]
        except KeyError:
            raise BallExceeded(self.radius + 1, self.radius) from None

    def distance(self, p: Word, q: Word) -> int:
        return self.word_length(p.inverse() * q)

    def displacement(self, g, n: int = 1, base=None) -> int:
        o = self.base_point if base is None else base
        return self.word_length(o.inverse() * (self.element(g) ** n) * o)

    def classify(self, g) -> str:
        return HYPERBOLIC if self.element(g).cyclic_length() > 0 else ELLIPTIC

    def ball(self, radius: int) -> list[Word]:
        if radius > self.radius:
            raise BallExceeded(radius, self.radius)
        return [w for w in self._order if self._lengths[w] <= radius]


# ---------------------------------------------------------------------------
# SL(2, R)

_RESCALE = 1e100


@dataclass(frozen=True)
class SL2:
    """exp(log_scale) * [[a, b], [c, d]] with unit determinant.

    Generators are normalized to determinant 1 once; products inherit it up
    to rounding.  Very long products move magnitude into ``log_scale`` so
    they never overflow.
    """

    a: float
    b: float
    c: float
    d: float
    log_scale: float = 0.0

    @classmethod
    def from_rows(cls, rows) -> "SL2":
        (a, b), (c, d) = rows
        det = a * d - b * c
        if det <= 0:
            raise ConfigError(f"matrix {rows} has non-positive determinant")
        r = math.sqrt(det)
        return cls(a / r, b / r, c / r, d / r)

    @classmethod
    def identity(cls) -> "SL2":
        return cls(1.0, 0.0, 0.0, 1.0)

    def __mul__(self, o: "SL2") -> "SL2":
        a = self.a * o.a + self.b * o.c
        b = self.a * o.b + self.b * o.d
        c = self.c * o.a + self.d * o.c
        d = self.c * o.b + self.d * o.d
        s = self.log_scale + o.log_scale
        # no renormalization by a*d - b*c: it cancels catastrophically for large entries
        n = math.hypot(a, b, c, d)
        if s != 0.0 or n > _RESCALE:
            return SL2(a / n, b / n, c / n, d / n, s + math.log(n))
        return SL2(a, b, c, d, 0.0)

    def inverse(self) -> "SL2":
        return SL2(self.d, -self.b, -self.c, self.a, self.log_scale)

    def __pow__(self, n: int) -> "SL2":
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        out = SL2.identity()
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def det(self) -> float:
        return math.exp(2 * self.log_scale) * (self.a * self.d - self.b * self.c)

    def log_abs_trace(self) -> float:
        t = abs(self.a + self.d)
        return -math.inf if t == 0 else self.log_scale + math.log(t)

    def trace(self) -> float:
        return math.exp(self.log_scale) * (self.a + self.d)

    def log_frobenius_sq(self) -> float:
        return 2 * self.log_scale + math.log(self.a ** 2 + self.b ** 2 + self.c ** 2 + self.d ** 2)

    def rows(self) -> list[list[float]]:
        k = math.exp(self.log_scale)
        return [[k * self.a, k * self.b], [k * self.c, k * self.d]]

    def mobius(self, z: complex) -> complex:
        den = self.c * z + self.d
        if den == 0:
            raise ValueError("point mapped to infinity")
        w = (self.a * z + self.b) / den
        # Im from the det-1 identity keeps relative accuracy near the boundary
        im = z.imag / (abs(den) ** 2 * math.exp(2 * self.log_scale))
        return complex(w.real, im)

    def boundary_map(self, x: float) -> float:
        """Action on R ∪ {∞} (∞ encoded as math.inf)."""
        if math.isinf(x):
            return math.inf if self.c == 0 else self.a / self.c
        den = self.c * x + self.d
        return math.inf if den == 0 else (self.a * x + self.b) / den


def acosh_of_exp(log_x: float) -> float:
    """arccosh(exp(log_x)) without overflow."""
    if log_x < 30:
        return math.acosh(max(1.0, math.exp(log_x)))
    return log_x + math.log1p(math.sqrt(max(0.0, 1 - math.exp(-2 * log_x))))


def hyperbolic_distance(p: complex, q: complex) -> float:
    num = abs(p - q)
    if num == 0:
        return 0.0
    return 2 * math.asinh(num / (2 * math.sqrt(p.imag) * math.sqrt(q.imag)))


class UpperHalfPlane(ActionModel):
    """Matrices acting on H² = {Im z > 0} by Möbius transformations."""

    kind = Kind.UPPER_HALF_PLANE
    rough_constant = 0.0
    divergence_ceiling = 30.0  # −log of double precision resolution on ∂H²
    max_ray_distance = 600.0

    def __init__(self, generators: Sequence[SL2 | Sequence[Sequence[float]]],
                 base_point: complex = 1j, name: str = "",
                 tolerance: float = 1e-9, trace_tolerance: float = 1e-9):
        gens = [g if isinstance(g, SL2) else SL2.from_rows(g) for g in generators]
        if not gens:
            raise ConfigError("upper half plane model needs generators")
        self.generators = gens
        self.rank = len(gens)
        base_point = complex(base_point)
        if base_point.imag <= 0:
            raise ConfigError("base point must have positive imaginary part")
        self.base_point = base_point
        self.name = name or f"h2[{self.rank}]"
        self.tolerance = tolerance
        self.trace_tolerance = trace_tolerance
        self._inv = [g.inverse() for g in gens]
        self._delta = None

    def element(self, g) -> SL2:
        if isinstance(g, SL2):
            return g
        if isinstance(g, str):
            g = parse_word(g, self.rank)
        if isinstance(g, Word):
            self.check_word(g)
            out = SL2.identity()
            for x in g.letters:
                gi, inv = divmod(x, 2)
                out = out * (self._inv[gi] if inv else self.generators[gi])
            return out
        return SL2.from_rows(g)

    def act(self, native: SL2, p: complex) -> complex:
        return native.mobius(complex(p))

    def distance(self, p: complex, q: complex) -> float:
        if p.imag <= 0 or q.imag <= 0:
            raise ValueError("points must lie in the upper half plane")
        return hyperbolic_distance(p, q)

    def _to_base(self, base: complex) -> SL2:
        y = math.sqrt(base.imag)
        return SL2(y, base.real / y, 0.0, 1 / y)

    def displacement(self, g, n: int = 1, base=None) -> float:
        o = self.base_point if base is None else complex(base)
        m = self.element(g) ** n
        a = self._to_base(o)
        conj = a.inverse() * m * a
        # cosh d(M i, i) = ||M||_F^2 / 2 for det-1 M
        return acosh_of_exp(conj.log_frobenius_sq() - math.log(2))

    def classify(self, g) -> str:
        m = self.element(g)
        lt = m.log_abs_trace()
        if lt > math.log(2) + self.trace_tolerance:
            return HYPERBOLIC
        if lt >= math.log(2) - self.trace_tolerance:
            return PARABOLIC
        return ELLIPTIC

    def trace_length(self, g) -> float:
        m = self.element(g)
        lt = m.log_abs_trace()
        if lt <= math.log(2):
            return 0.0
        return 2 * acosh_of_exp(lt - math.log(2))

    def fixed_reals(self, g) -> tuple[float, float]:
        """(attracting, repelling) boundary fixed points of a hyperbolic element."""
        m = self.element(g)
        a, b, c, d = m.a, m.b, m.c, m.d
        disc = (a - d) ** 2 + 4 * b * c
        if disc <= 0:
            raise ValueError("element is not hyperbolic")
        if c == 0:
            other = b / (d - a)
            return (math.inf, other) if abs(a) > abs(d) else (other, math.inf)
        r = math.sqrt(disc)
        z1 = (a - d + r) / (2 * c)
        z2 = (a - d - r) / (2 * c)
        # attracting iff |c z + d| > sqrt(det of stored part)
        if abs(c * z1 + d) > abs(c * z2 + d):
            return z1, z2
        return z2, z1

    def geodesic_point(self, start: complex, xi: float, t: float) -> complex:
        """Point at distance t from ``start`` on the geodesic ray toward xi."""
        to_start = self._to_base(start)
        local = to_start.inverse().boundary_map(xi)
        rot = SL2.identity() if math.isinf(local) else _rotation_to(local)
        return (to_start * rot).mobius(1j * math.exp(t))

    def rotate_direction(self, start: complex, xi: float, angle: float) -> float:
        """Endpoint of the ray from ``start`` making ``angle`` with the ray to xi."""
        to_start = self._to_base(start)
        local = to_start.inverse().boundary_map(xi)
        e = 1.0 + 0j if math.isinf(local) else (local - 1j) / (local + 1j)
        e = e * cmath.exp(1j * angle)
        return to_start.boundary_map(_disk_to_real(e))

    def boundary_direction(self, p: complex, q: complex) -> float:
        """Endpoint on R ∪ {∞} of the geodesic ray from p through q."""
        to_p = self._to_base(p)
        w = to_p.inverse().mobius(q)
        # in the disk picture around i the ray endpoint has the direction of w
        u = (w - 1j) / (w + 1j)
        if abs(u) == 0:
            raise ValueError("p == q")
        return to_p.boundary_map(_disk_to_real(u / abs(u)))

    def conjugate(self, m: SL2 | Sequence[Sequence[float]], name: str = "") -> "UpperHalfPlane":
        """Model with generators M g M⁻¹ (same base point)."""
        mm = m if isinstance(m, SL2) else SL2.from_rows(m)
        out = UpperHalfPlane([mm * g * mm.inverse() for g in self.generators], self.base_point,
                             name or f"{self.name}^M", self.tolerance, self.trace_tolerance)
        out.delta_margin = self.delta_margin
        return out

    def with_base_point(self, p: complex) -> "UpperHalfPlane":
        out = UpperHalfPlane(self.generators, p, f"{self.name}@{p}", self.tolerance, self.trace_tolerance)
        out._delta = self._delta
        out.delta_margin = self.delta_margin
        return out

    def point_label(self, p) -> str:
        return f"{p.real:.12g}{p.imag:+.12g}i"


def _disk_to_real(e: complex) -> float:
    """Unit-circle direction (disk centered at i) to R ∪ {∞}."""
    if abs(e - 1) < 1e-15:
        return math.inf
    return (1j * (1 + e) / (1 - e)).real


def _rotation_to(xi: float) -> SL2:
    """Elliptic element fixing i and sending ∞ to xi."""
    # [[cos, sin], [-sin, cos]] maps ∞ to -cot(θ)
    theta = math.atan2(-1.0, xi)
    return SL2(math.cos(theta), math.sin(theta), -math.sin(theta), math.cos(theta))


# ---------------------------------------------------------------------------
# operations named in the model layer

def distance(model: ActionModel, p, q) -> float:
    return model.distance(p, q)


def apply(model: ActionModel, g, p):
    return model.apply(g, p)


def ball_enumerate(model: ActionModel, radius: int) -> list[Word]:
    return model.ball(radius)


def classify(model: ActionModel, g) -> str:
    return model.classify(g)


def schottky_generators(translation: float = 3.0) -> list[SL2]:
    """Two hyperbolic generators with perpendicular axes through i.

    Ping-pong holds when tanh(translation / 2) > cos(π/4), i.e. translation
    above 2·atanh(1/√2) ≈ 1.763, so every nontrivial word is hyperbolic.
    """
    h = translation / 2
    a = SL2(math.cosh(h), math.sinh(h), math.sinh(h), math.cosh(h))
    r = SL2(math.cos(math.pi / 4), math.sin(math.pi / 4), -math.sin(math.pi / 4), math.cos(math.pi / 4))
    return [a, r * a * r.inverse()]


def model_from_config(name: str, cfg: dict) -> ActionModel:
    """Build a model from a scenario declaration."""
    kind = cfg.get("kind")
    try:
        if kind == Kind.FREE_TREE.value:
            rank = int(cfg.get("rank", 2))
            m = FreeTree(rank, cfg.get("basis"), cfg.get("base_point"), name=name)
        elif kind == Kind.WORD_METRIC_BALL.value:
            m = WordMetricBall(int(cfg.get("rank", 2)), cfg["generators"], int(cfg.get("radius", 6)),
                               int(cfg.get("budget", DEFAULT_BALL_BUDGET)), name=name)
        elif kind == Kind.UPPER_HALF_PLANE.value:
            gens = cfg.get("generators")
            if gens == "schottky" or gens is None:
                gens = schottky_generators(float(cfg.get("translation", 3.0)))
            else:
                gens = [_matrix_from_cfg(g) for g in gens]
            bp = cfg.get("base_point", [0.0, 1.0])
            m = UpperHalfPlane(gens, complex(bp[0], bp[1]), name=name,
                               tolerance=float(cfg.get("tolerance", 1e-9)))
            if "conjugate_by" in cfg:
                m = m.conjugate(_matrix_from_cfg(cfg["conjugate_by"]), name=name)
        else:
            raise ConfigError(f"model {name!r}: unknown kind {kind!r}")
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"model {name!r}: malformed declaration ({exc})") from exc
    if "delta" in cfg:
        m.set_delta(float(cfg["delta"]))
    m.delta_margin = float(cfg.get("delta_margin", 0.0))
    return m


def _matrix_from_cfg(g) -> SL2:
    vals = list(itertools.chain.from_iterable(g)) if isinstance(g[0], (list, tuple)) else list(g)
    if len(vals) != 4:
        raise ConfigError(f"matrix must have 4 entries (row-major), got {g}")
    return SL2.from_rows([[float(vals[0]), float(vals[1])], [float(vals[2]), float(vals[3])]])

