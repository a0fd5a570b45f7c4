import cmath
import math

import pytest
from hypothesis import given, strategies as st

from hyperlab import oracles
from hyperlab.boundary import (BoundaryPoint, Tag, canonical_key, extended_gromov, fixed_point_reals, fixed_points,
                               limit_set_sample, parse_boundary as pb, same_boundary_point, tree_product)
from hyperlab.errors import CoincidentBoundaryPoints, ConfigError
from hyperlab.spaces import FreeTree
from hyperlab.words import InfiniteWord, Word

from conftest import nonempty_words, periods, words

E = Word.identity()


def s(w) -> str:
    return str(w) if w else ""


def test_extended_examples(tree):
    assert extended_gromov(tree, pb("+a"), pb("+b")).upper == 0
    v = extended_gromov(tree, pb("+a"), BoundaryPoint.infinite_word("a", "b"))
    assert (v.lower, v.upper) == (1, 1)


def test_coincident_points_raise(tree):
    with pytest.raises(CoincidentBoundaryPoints):
        extended_gromov(tree, pb("+ab"), BoundaryPoint.infinite_word("ab", "ab"))


def test_fixed_points_examples(tree, diag):
    plus, minus = fixed_points(tree, "ab")
    assert same_boundary_point(tree, plus, BoundaryPoint.infinite_word(E, "ab"))
    assert same_boundary_point(tree, minus, BoundaryPoint.infinite_word(E, "BA"))
    hi, lo = fixed_point_reals(diag, "a")
    assert hi == math.inf and lo == pytest.approx(0.0, abs=1e-12)


@given(nonempty_words(max_size=8))
def test_powers_share_fixed_points(g):
    tree = FreeTree(2)
    if not g.cyclic_length():
        return
    for a, b in zip(fixed_points(tree, g), fixed_points(tree, g ** 2)):
        assert canonical_key(a) == canonical_key(b)


def iw():
    return st.builds(InfiniteWord, words(max_size=6), periods(3))


@given(iw(), iw(), words(max_size=6))
def test_tree_products_match_oracle(X, Y, o):
    if X.prefix == Y.prefix and X.period == Y.period:
        return
    tree = FreeTree(2)
    x, y = BoundaryPoint(Tag.INFINITE_WORD, infinite=X), BoundaryPoint(Tag.INFINITE_WORD, infinite=Y)

    def unroll(Z):
        return s(Word(Z.prefix, reduced=True)) + s(Word(Z.period, reduced=True)) * 40

    expected = oracles.tree_ray_product(unroll(X), unroll(Y), s(o))
    assert tree_product(tree, x, y, o) == expected
    assert extended_gromov(tree, x, y, o).estimate == expected


@given(iw(), nonempty_words(max_size=6))
def test_translate_is_left_multiplication(X, g):
    x = BoundaryPoint(Tag.INFINITE_WORD, infinite=X)
    assert canonical_key(x.translate(g)) == canonical_key(
        BoundaryPoint(tag=x.tag, infinite=X.left_multiply(g)))


def test_limit_set_sample(tree):
    pts = limit_set_sample(tree, 20, 2)
    keys = {canonical_key(p) for p in pts}
    assert canonical_key(pb("+a")) in keys and canonical_key(pb("+b")) in keys
    assert len(keys) == len(pts)
    for i, x in enumerate(pts):
        for y in pts[i + 1:]:
            assert math.isfinite(extended_gromov(tree, x, y).upper)
    assert len(limit_set_sample(tree, 1, 2)) == 1


def _disk_angle(x: float) -> float:
    return 0.0 if x == math.inf else cmath.phase((x - 1j) / (x + 1j))


@pytest.mark.parametrize("a, b", [(0, math.inf), (1, -1), (0.3, 2), (-0.2, 0.1), (5, math.inf)])
def test_h2_products_enclose_closed_form(schottky, a, b):
    th = abs(_disk_angle(a) - _disk_angle(b))
    th = min(th, 2 * math.pi - th)
    exact = -math.log(math.sin(th / 2))
    v = extended_gromov(schottky, pb(f"ray:{a}"), pb(f"ray:{b}"), 1j)
    assert v.lower - 1e-9 <= exact <= v.upper
    assert v.width <= 2 * schottky.delta + 0.01


def test_parse_boundary_forms():
    assert str(pb("+ab")) == "+(ab)"
    assert str(pb("-a")) == "-(a)"
    assert pb("ray:inf").real == math.inf
    assert canonical_key(pb("b*+a")) == canonical_key(BoundaryPoint.infinite_word("b", "a"))
    with pytest.raises(ConfigError):
        pb("nonsense")
