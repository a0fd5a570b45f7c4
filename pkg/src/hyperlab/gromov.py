"""Gromov products, four-point hyperbolicity estimates, rough cross-ratios."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .boundary import BoundaryPoint, extended_gromov
from .errors import CoincidentBoundaryPoints, ConfigError
from .intervals import IntervalValue
from .spaces import ActionModel, FreeTree, Orbit, UpperHalfPlane, WordMetricBall, word_ball
from .words import Word

DEFAULT_DISK_RADIUS = 5.0
DEFAULT_SAMPLES = 100_000


def gromov_product(model: ActionModel, p, q, o) -> float:
    """½(d(p,o) + d(q,o) − d(p,q)); integer-valued on trees."""
    s = model.dist(p, o) + model.dist(q, o) - model.dist(p, q)
    if isinstance(s, int):
        return s // 2 if s % 2 == 0 else s / 2
    return 0.5 * s


def four_point_defect(model: ActionModel, o, p, q, r) -> float:
    """min(⟨p,r⟩_o, ⟨r,q⟩_o) − ⟨p,q⟩_o, clamped at 0."""
    g = lambda u, v: gromov_product(model, u, v, o)  # noqa: E731
    return max(0.0, min(g(p, r), g(r, q)) - g(p, q))


@dataclass(frozen=True)
class SampleRegion:
    """Where quadruples are drawn: a hyperbolic disk (H²) or a word ball."""

    radius: float
    center: Any = None
    exhaustive: bool = False


@dataclass(frozen=True)
class DeltaEstimate:
    value: float
    sample_size: int
    witness: tuple = ()

    @property
    def doubled(self) -> float:
        # pinned-basepoint constant δ gives 2δ-hyperbolicity for all basepoints
        return 2 * self.value


def _disk_points(u: np.ndarray, v: np.ndarray, radius: float, center: complex) -> np.ndarray:
    # area-uniform in the hyperbolic disk: cosh r uniform on [1, cosh R]
    r = np.arccosh(1 + u * (math.cosh(radius) - 1))
    zeta = np.tanh(r / 2) * np.exp(2j * np.pi * v)
    z = 1j * (1 + zeta) / (1 - zeta)
    return center.real + center.imag * z


def _h2_dist(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return 2 * np.arcsinh(np.abs(p - q) / (2 * np.sqrt(p.imag) * np.sqrt(q.imag)))


def _h2_defects(pts: np.ndarray) -> np.ndarray:
    o, p, q, r = pts.T
    dpo, dqo, dro = _h2_dist(p, o), _h2_dist(q, o), _h2_dist(r, o)
    gpq = 0.5 * (dpo + dqo - _h2_dist(p, q))
    gpr = 0.5 * (dpo + dro - _h2_dist(p, r))
    grq = 0.5 * (dro + dqo - _h2_dist(r, q))
    return np.maximum(0.0, np.minimum(gpr, grq) - gpq)


def delta_estimate(model: ActionModel, region: SampleRegion | None = None, count: int = DEFAULT_SAMPLES,
                   seed: int = 0) -> DeltaEstimate:
    """Max sampled four-point defect.

    Draws are prefix-stable (the first ``count`` quadruples of a larger
    sample are the same), so the value is monotone under sample growth.
    """
    if count < 1:
        raise ConfigError("sample count must be >= 1")
    if region is None:
        region = SampleRegion(DEFAULT_DISK_RADIUS if isinstance(model, UpperHalfPlane) else 4)
    if region.radius < 0:
        raise ConfigError("empty sample region")
    rng = np.random.default_rng(seed)
    if isinstance(model, UpperHalfPlane):
        center = complex(region.center) if region.center is not None else model.base_point
        uv = rng.random((count, 8))
        pts = _disk_points(uv[:, 0::2], uv[:, 1::2], region.radius, center)
        defects = _h2_defects(pts)
        k = int(np.argmax(defects))
        return DeltaEstimate(float(defects[k]), count, tuple(complex(z) for z in pts[k]))
    if isinstance(model, FreeTree) and region.exhaustive:
        return exhaustive_tree_delta(model, int(region.radius))
    ball = model.ball(int(region.radius))
    idx = rng.integers(0, len(ball), size=(count, 4))
    best, witness = 0.0, ()
    for row in idx:
        pts = [Orbit(ball[i]) for i in row]
        d = four_point_defect(model, *pts)
        if d > best:
            best, witness = d, tuple(str(ball[i]) for i in row)
    return DeltaEstimate(float(best), count, witness)


def exhaustive_tree_delta(model: FreeTree, radius: int) -> DeltaEstimate:
    """Every ordered quadruple of vertices in the ball, vectorized per basepoint."""
    verts = word_ball(model.model_rank, radius)
    n = len(verts)
    dist = np.array([[model.distance(p, q) for q in verts] for p in verts], dtype=np.int16)
    best, witness = 0, ()
    for k in range(n):
        do = dist[k]
        g2 = do[:, None] + do[None, :] - dist  # 2·⟨p,q⟩_o
        # defect[p,q,r] = min(g[p,r], g[r,q]) − g[p,q]
        defect = np.minimum(g2[:, None, :], g2.T[None, :, :]) - g2[:, :, None]
        m = int(defect.max())
        if m > best:
            best = m
            p, q, r = np.unravel_index(int(defect.argmax()), defect.shape)
            witness = tuple(str(verts[i]) for i in (k, p, q, r))
    return DeltaEstimate(best / 2, n ** 4, witness)


def default_delta_estimate(model: ActionModel) -> DeltaEstimate:
    if isinstance(model, FreeTree):
        return DeltaEstimate(0.0, 0)
    if isinstance(model, WordMetricBall):
        return delta_estimate(model, SampleRegion(model.radius // 2), count=20_000, seed=0)
    return delta_estimate(model, SampleRegion(DEFAULT_DISK_RADIUS), DEFAULT_SAMPLES, seed=0)


# ---------------------------------------------------------------------------

def cross_ratio(model: ActionModel, x: BoundaryPoint, y: BoundaryPoint, z: BoundaryPoint, w: BoundaryPoint,
                o=None, depth: int | None = None) -> IntervalValue:
    """(x,y;z,w)_o = ⟨x,y⟩ + ⟨z,w⟩ − ⟨z,y⟩ − ⟨x,w⟩ at one shared depth."""
    pts = (x, y, z, w)
    try:
        if not isinstance(model, FreeTree):
            for i in range(4):
                for j in range(i + 1, 4):
                    if (i, j) not in ((0, 1), (2, 3), (1, 2), (0, 3)):
                        extended_gromov(model, pts[i], pts[j], o, depth)
        pairs = [(x, y), (z, w), (z, y), (x, w)]
        vals = [extended_gromov(model, a, b, o, depth) for a, b in pairs]
        if depth is None and not isinstance(model, FreeTree):
            shared = max(v.depth for v in vals)
            vals = [extended_gromov(model, a, b, o, shared) for a, b in pairs]
        elif isinstance(model, FreeTree):
            for i, j in ((0, 2), (1, 3)):
                extended_gromov(model, pts[i], pts[j], o)
    except CoincidentBoundaryPoints as exc:
        raise CoincidentBoundaryPoints(f"not pairwise distinct: {exc}") from exc
    return vals[0] + vals[1] - vals[2] - vals[3]


@dataclass
class RoughGeodesic:
    grid: Sequence[float]
    points: Sequence[Any]
    C: float = 0.0

    def __post_init__(self):
        if len(self.grid) != len(self.points):
            raise ConfigError("grid and points differ in length")


@dataclass(frozen=True)
class GeodesicDefect:
    middle: float  # max ⟨τ(t₁),τ(t₃)⟩_{τ(t₂)}
    along: float  # max |t₂−t₁| − ⟨τ(t₂),τ(t₃)⟩_{τ(t₁)}
    bound: float
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.middle <= self.bound and self.along <= self.bound


def rough_geodesic_defect(model: ActionModel, tau: RoughGeodesic) -> GeodesicDefect:
    t = list(tau.grid)
    if len(t) < 3:
        raise ConfigError("rough geodesic needs at least 3 grid points")
    if any(b <= a for a, b in zip(t, t[1:])):
        raise ConfigError("grid must be strictly increasing")
    pts = tau.points
    n = len(t)
    mid, along = -math.inf, -math.inf
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                mid = max(mid, gromov_product(model, pts[i], pts[k], pts[j]))
                along = max(along, abs(t[j] - t[i]) - gromov_product(model, pts[j], pts[k], pts[i]))
    return GeodesicDefect(float(mid), float(along), 1.5 * tau.C)


def tree_geodesic(word: Word) -> RoughGeodesic:
    """The vertex path e, w[:1], w[:2], ... with C = 0."""
    pts = [Word(word.letters[:k], reduced=True) for k in range(len(word) + 1)]
    return RoughGeodesic(list(range(len(pts))), pts, 0.0)
