"""Real enclosures carried through the boundary computations.

``estimate`` is the raw value computed from the truncated sequences; the
certified statement is ``lower <= true value <= upper``.  Arithmetic is
plain interval arithmetic (widths add under +/-).
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class IntervalValue:
    lower: float
    upper: float
    depth: int = 0
    estimate: float | None = None

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"empty interval [{self.lower}, {self.upper}]")
        if self.estimate is None:
            object.__setattr__(self, "estimate", self.lower)

    @classmethod
    def exact(cls, value: float, depth: int = 0) -> "IntervalValue":
        return cls(value, value, depth, value)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def mid(self) -> float:
        return 0.5 * (self.lower + self.upper)

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= x <= self.upper + slack

    def overlaps(self, other: "IntervalValue", slack: float = 0.0) -> bool:
        return self.lower - slack <= other.upper and other.lower - slack <= self.upper

    def magnitude(self) -> float:
        """max |x| over the enclosure."""
        return max(abs(self.lower), abs(self.upper))

    def widen(self, r: float) -> "IntervalValue":
        return IntervalValue(self.lower - r, self.upper + r, self.depth, self.estimate)

    def _lift(self, other) -> "IntervalValue":
        if isinstance(other, IntervalValue):
            return other
        return IntervalValue.exact(float(other))

    def __add__(self, other) -> "IntervalValue":
        o = self._lift(other)
        return IntervalValue(
            self.lower + o.lower, self.upper + o.upper, max(self.depth, o.depth), self.estimate + o.estimate
        )

    __radd__ = __add__

    def __neg__(self) -> "IntervalValue":
        return IntervalValue(-self.upper, -self.lower, self.depth, -self.estimate)

    def __sub__(self, other) -> "IntervalValue":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "IntervalValue":
        return self._lift(other) - self

    def scale(self, k: float) -> "IntervalValue":
        a, b = k * self.lower, k * self.upper
        return IntervalValue(min(a, b), max(a, b), self.depth, k * self.estimate)

    def __mul__(self, k: float) -> "IntervalValue":
        return self.scale(k)

    __rmul__ = __mul__

    def abs(self) -> "IntervalValue":
        lo = 0.0 if self.lower <= 0 <= self.upper else min(abs(self.lower), abs(self.upper))
        return IntervalValue(lo, self.magnitude(), self.depth, abs(self.estimate))

    def __str__(self) -> str:
        if self.lower == self.upper:
            return f"{self.lower:.12g}"
        return f"[{self.lower:.12g}, {self.upper:.12g}]"
