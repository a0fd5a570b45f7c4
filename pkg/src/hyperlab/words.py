"""Free group words packed into ``bytes``.

Generator ``i`` is stored as letter ``2*i`` and its inverse as ``2*i + 1``,
so inversion of a letter is ``x ^ 1``.  Printed form uses lowercase letters
for generators and uppercase for inverses (``aB`` is a·b⁻¹).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigError

_INV_TABLE = bytes(x ^ 1 for x in range(256))
MAX_RANK = 26


def letter_name(code: int) -> str:
    gen, inv = divmod(code, 2)
    ch = chr(ord("a") + gen)
    return ch.upper() if inv else ch


_NAME_TABLE = bytes(ord(letter_name(x)) if x < 2 * MAX_RANK else ord("?") for x in range(256))


def spell(letters: bytes) -> str:
    return letters.translate(_NAME_TABLE).decode("ascii")


def invert_letters(letters: bytes) -> bytes:
    return letters.translate(_INV_TABLE)[::-1]


def common_prefix(a: bytes, b: bytes) -> int:
    """Length of the longest common prefix, by bisection on slice equality."""
    n = min(len(a), len(b))
    if n == 0 or a[0] != b[0]:
        return 0
    if a[:n] == b[:n]:
        return n
    lo, hi = 1, n  # a[:lo] == b[:lo], a[:hi] != b[:hi]
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if a[:mid] == b[:mid]:
            lo = mid
        else:
            hi = mid
    return lo


def free_reduce(letters: bytes) -> bytes:
    if len(letters) > 64:
        a = np.frombuffer(letters, dtype=np.uint8)
        if not np.any(a[1:] == (a[:-1] ^ 1)):
            return bytes(letters)
    out = bytearray()
    for x in letters:
        if out and out[-1] == x ^ 1:
            out.pop()
        else:
            out.append(x)
    return bytes(out)


def _rotate(c: bytes, k: int) -> bytes:
    """Left rotation by k (negative k rotates right)."""
    k %= len(c)
    return c[k:] + c[:k]


def _concat(a: bytes, b: bytes) -> bytes:
    # both inputs reduced; cancellation happens only at the seam
    if not a or not b or a[-1] != b[0] ^ 1:
        return a + b
    t = common_prefix(invert_letters(a), b)
    return a[: len(a) - t] + b[t:]


@dataclass(frozen=True, order=True)
class Word:
    """A freely reduced word.  Ordering is shortlex on letter codes."""

    size: int
    letters: bytes

    def __init__(self, letters: bytes | bytearray | list[int] = b"", *, reduced: bool = False):
        data = bytes(letters)
        if not reduced:
            data = free_reduce(data)
        object.__setattr__(self, "letters", data)
        object.__setattr__(self, "size", len(data))

    @classmethod
    def identity(cls) -> "Word":
        return cls(b"", reduced=True)

    @classmethod
    def gen(cls, index: int, inverse: bool = False) -> "Word":
        return cls(bytes([2 * index + int(inverse)]), reduced=True)

    @classmethod
    def parse(cls, text: str, rank: int | None = None) -> "Word":
        return parse_word(text, rank)

    def __len__(self) -> int:
        return self.size

    def __bool__(self) -> bool:
        return self.size > 0

    def __mul__(self, other: "Word") -> "Word":
        return Word(_concat(self.letters, other.letters), reduced=True)

    def inverse(self) -> "Word":
        return Word(invert_letters(self.letters), reduced=True)

    def __pow__(self, n: int) -> "Word":
        if n == 0 or not self:
            return Word.identity()
        conj, core = self.cyclic_decomposition
        if n < 0:
            core = invert_letters(core)
            n = -n
        return Word(conj + core * n + invert_letters(conj), reduced=True)

    def max_generator(self) -> int:
        return max(self.letters) // 2 if self.letters else -1

    @cached_property
    def cyclic_decomposition(self) -> tuple[bytes, bytes]:
        """(u, c) with self = u c u⁻¹ and c cyclically reduced."""
        w = self.letters
        t = common_prefix(w, invert_letters(w))
        t = min(t, len(w) // 2)
        return w[:t], w[t : len(w) - t]

    @property
    def cyclic_core(self) -> bytes:
        return self.cyclic_decomposition[1]

    def cyclic_length(self) -> int:
        return len(self.cyclic_core)

    def is_proper_power(self) -> bool:
        core = self.cyclic_core
        return bool(core) and (core + core).find(core, 1) < len(core)

    def primitive_root(self) -> "Word":
        """The root r with self = r^k, k ≥ 1 maximal."""
        conj, core = self.cyclic_decomposition
        if not core:
            return Word.identity()
        period = (core + core).find(core, 1)
        return Word(conj + core[:period] + invert_letters(conj), reduced=True)

    def conjugacy_key(self) -> bytes:
        """Lexicographically least rotation of the cyclic core."""
        core = self.cyclic_core
        if not core:
            return b""
        return min(core[i:] + core[:i] for i in range(len(core)))

    def substitute(self, images: list["Word"]) -> "Word":
        out = b""
        inv_images = [w.inverse() for w in images]
        for x in self.letters:
            g, inv = divmod(x, 2)
            piece = inv_images[g] if inv else images[g]
            out = _concat(out, piece.letters)
        return Word(out, reduced=True)

    def __str__(self) -> str:
        return spell(self.letters) or "e"

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"


_TOKEN = re.compile(r"\s*(?:([a-zA-Z])|(\()|(\))|\^\s*(-?\d+)|(\.)|(\S))")


def parse_word(text: str, rank: int | None = None) -> Word:
    """Parse ``aB``, ``a^-1 b``, ``(ab)^5 a``, ``e`` (identity)."""
    text = text.strip()
    if text in ("", "e", "1", "id"):
        return Word.identity()
    stack: list[list[Word]] = [[]]
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        pos = m.end()
        letter, lpar, rpar, exp, _dot, bad = m.groups()
        if bad is not None:
            raise ConfigError(f"cannot parse word {text!r} near {bad!r}")
        if letter is not None:
            idx = ord(letter.lower()) - ord("a")
            if rank is not None and idx >= rank:
                raise ConfigError(f"unknown generator {letter!r} in {text!r} (rank {rank})")
            stack[-1].append(Word.gen(idx, letter.isupper()))
        elif lpar:
            stack.append([])
        elif rpar:
            if len(stack) == 1:
                raise ConfigError(f"unbalanced parenthesis in {text!r}")
            group = _product(stack.pop())
            stack[-1].append(group)
        elif exp is not None:
            if not stack[-1]:
                raise ConfigError(f"exponent without base in {text!r}")
            stack[-1][-1] = stack[-1][-1] ** int(exp)
    if len(stack) != 1:
        raise ConfigError(f"unbalanced parenthesis in {text!r}")
    return _product(stack[0])


def _product(parts: list[Word]) -> Word:
    out = Word.identity()
    for p in parts:
        out = out * p
    return out


def check_rank(word: Word, rank: int) -> Word:
    if word.max_generator() >= rank:
        raise ConfigError(f"word {word} uses a generator outside rank {rank}")
    return word


@dataclass(frozen=True)
class InfiniteWord:
    """An eventually periodic reduced infinite word ``prefix · period^∞``.

    Stored in canonical form: the period is cyclically reduced and primitive,
    the prefix is as short as possible, so equal words compare equal.
    """

    prefix: bytes
    period: bytes

    def __init__(self, prefix: bytes | Word, period: bytes | Word):
        p = prefix.letters if isinstance(prefix, Word) else free_reduce(bytes(prefix))
        c = period.letters if isinstance(period, Word) else free_reduce(bytes(period))
        if not c:
            raise ConfigError("infinite word needs a nonempty period")
        conj, core = Word(c, reduced=True).cyclic_decomposition
        p = _concat(p, conj)
        c = core
        L = len(c)
        # cancel the seam between prefix and the periodic tail
        i, j = len(p), 0
        while i and p[i - 1] == c[j % L] ^ 1:
            i, j = i - 1, j + 1
        p, c = p[:i], _rotate(c, j)
        # primitive period
        c = c[: (c + c).find(c, 1)]
        L = len(c)
        # shortest prefix
        i, j = len(p), 0
        while i and p[i - 1] == c[L - 1 - (j % L)]:
            i, j = i - 1, j + 1
        p, c = p[:i], _rotate(c, -j)
        object.__setattr__(self, "prefix", p)
        object.__setattr__(self, "period", c)

    def head(self, n: int) -> bytes:
        p, c = self.prefix, self.period
        if n <= len(p):
            return p[:n]
        k = -(-(n - len(p)) // len(c))
        return (p + c * k)[:n]

    def left_multiply(self, word: Word) -> "InfiniteWord":
        w = word.letters
        if not w:
            return self
        p, c = self.prefix, self.period
        k = -(-len(w) // len(c)) + 1
        t = common_prefix(invert_letters(w), p + c * k)
        if t <= len(p):
            return InfiniteWord(Word(w[: len(w) - t] + p[t:], reduced=True), Word(c, reduced=True))
        return InfiniteWord(Word(w[: len(w) - t], reduced=True), Word(_rotate(c, t - len(p)), reduced=True))

    def substitute(self, images: list[Word]) -> "InfiniteWord":
        return InfiniteWord(
            Word(self.prefix, reduced=True).substitute(images),
            Word(self.period, reduced=True).substitute(images),
        )

    def comparison_length(self, other: "InfiniteWord") -> int:
        # Fine–Wilf: agreement this far implies equality
        return max(len(self.prefix), len(other.prefix)) + len(self.period) + len(other.period)

    def __str__(self) -> str:
        return f"{spell(self.prefix)}({spell(self.period)})^inf"
