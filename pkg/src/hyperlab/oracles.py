"""Independent reference computations.

Nothing here imports the word, boundary or matrix code under test: words are
plain strings over ``aAbB...`` and matrices are evaluated in mpmath.
"""
from __future__ import annotations

import mpmath

mpmath.mp.dps = 50


def naive_reduce(s: str) -> str:
    out: list[str] = []
    for ch in s:
        if out and out[-1] == ch.swapcase():
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def naive_inverse(s: str) -> str:
    return s[::-1].swapcase()


def tree_distance(p: str, q: str) -> int:
    return len(naive_reduce(naive_inverse(p) + q))


def tree_gromov(p: str, q: str, o: str = "") -> float:
    return 0.5 * (tree_distance(p, o) + tree_distance(q, o) - tree_distance(p, q))


def cyclic_length(s: str) -> int:
    w = naive_reduce(s)
    while len(w) > 1 and w[0] == w[-1].swapcase():
        w = w[1:-1]
    return len(w)


def is_primary(s: str) -> bool:
    """Root extraction on the cyclic core: no proper divisor period."""
    w = naive_reduce(s)
    while len(w) > 1 and w[0] == w[-1].swapcase():
        w = w[1:-1]
    n = len(w)
    return not any(n % k == 0 and w == w[:k] * (n // k) for k in range(1, n))


def tree_ray_product(x: str, y: str, o: str = "") -> int:
    """LCP of o⁻¹x and o⁻¹y for long truncations x, y of two rays."""
    a = naive_reduce(naive_inverse(o) + x)
    b = naive_reduce(naive_inverse(o) + y)
    k = 0
    while k < min(len(a), len(b)) and a[k] == b[k]:
        k += 1
    return k


def trace_length(rows) -> float:
    (a, b), (c, d) = rows
    m = mpmath.matrix([[a, b], [c, d]])
    m = m / mpmath.sqrt(mpmath.det(m))
    t = abs(m[0, 0] + m[1, 1])
    return float(2 * mpmath.acosh(t / 2)) if t > 2 else 0.0


def h2_distance(p: complex, q: complex) -> float:
    p, q = mpmath.mpc(p), mpmath.mpc(q)
    return float(mpmath.acosh(1 + abs(p - q) ** 2 / (2 * p.imag * q.imag)))


def busemann_at_infinity(o: complex, p: complex) -> float:
    """B_{o,p}(∞) = log(Im p / Im o)."""
    return float(mpmath.log(mpmath.mpf(p.imag) / mpmath.mpf(o.imag)))
