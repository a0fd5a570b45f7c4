import math

import pytest
from hypothesis import given, strategies as st

from hyperlab import oracles
from hyperlab.boundary import BoundaryPoint, Tag, parse_boundary as pb
from hyperlab.busemann import (Convention, busemann, cocycle, cocycle_identity_defect, continuity_defect,
                               extended_cocycle, product_transform_defect)
from hyperlab.spaces import FreeTree, Orbit
from hyperlab.words import InfiniteWord, Word, parse_word as W

from conftest import nonempty_words, periods, words

E = Word.identity()
D, I = Convention.DIRECT, Convention.INVERSE


def rays():
    return st.builds(lambda p, c: BoundaryPoint(Tag.INFINITE_WORD, infinite=InfiniteWord(p, c)),
                     words(max_size=6), periods(3))


def test_busemann_examples(tree, diag):
    assert busemann(tree, Orbit(E), Orbit(W("a")), pb("+a")).estimate == 1
    assert busemann(tree, Orbit(E), Orbit(E), pb("+b")).estimate == 0
    v = busemann(diag, 1j, 2j, pb("ray:inf"))
    assert v.contains(math.log(2), slack=1e-9)
    assert v.estimate == pytest.approx(oracles.busemann_at_infinity(1j, 2j), abs=1e-9)


@given(st.floats(-5, 5), st.floats(0.05, 20))
def test_busemann_at_infinity_matches_oracle(x, y):
    from hyperlab.presets import preset

    m = preset("schottky")
    p = complex(x, y)
    assert busemann(m, 1j, p, pb("ray:inf")).estimate == pytest.approx(
        oracles.busemann_at_infinity(1j, p), abs=1e-3)


def test_cocycle_examples(tree):
    assert cocycle(tree, "a", pb("+a"), D).estimate == 1
    assert cocycle(tree, "a", pb("+a"), I).estimate == -1
    assert cocycle(tree, E, pb("+a"), D).estimate == 0


def test_extended_cocycle_examples(tree):
    assert extended_cocycle(tree, "a", Orbit(W("ab"))) == 1
    assert extended_cocycle(tree, "ab", Orbit(E)) == -2


@given(nonempty_words(), words())
def test_extended_cocycle_bounds(g, p):
    tree = FreeTree(2)
    v = extended_cocycle(tree, g, Orbit(p))
    assert abs(v) <= len(g)
    assert extended_cocycle(tree, g, Orbit(E)) == -len(g)


def test_identity_defect_examples(tree):
    assert cocycle_identity_defect(tree, "a", "b", pb("+b"), I).estimate == 0
    assert cocycle_identity_defect(tree, "a", "b", pb("+b"), D).estimate == -2


@given(words(), words(), rays())
def test_tree_inverse_cocycle_exact(g, h, x):
    tree = FreeTree(2)
    v = cocycle_identity_defect(tree, g, h, x, I)
    assert v.lower == v.upper == 0
    t = cocycle_identity_defect(tree, g, h, x, D, transformed=True)
    assert t.lower == t.upper == 0


@given(nonempty_words(), rays())
def test_inverse_is_direct_of_inverse(g, x):
    tree = FreeTree(2)
    assert cocycle(tree, g, x, I).estimate == cocycle(tree, g.inverse(), x, D).estimate


def test_product_transform_examples(tree):
    r = product_transform_defect(tree, "a", pb("+a"), pb("+b"), D)
    assert r.half_sum.estimate == 0
    assert r.literal.estimate == -1


@given(nonempty_words(max_size=6), rays(), rays())
def test_tree_half_sum_exact(g, x, y):
    if (x.infinite.prefix, x.infinite.period) == (y.infinite.prefix, y.infinite.period):
        return
    r = product_transform_defect(FreeTree(2), g, x, y, I)
    assert r.half_sum.lower == r.half_sum.upper == 0


def test_continuity_examples(tree):
    ys = [BoundaryPoint.infinite_word(W("a") ** i, "b") for i in range(1, 12)]
    assert continuity_defect(tree, "a", ys, pb("+a")).estimate == 0
    assert continuity_defect(tree, "a", [pb("+a")] * 3, pb("+a")).estimate == 0


def test_h2_identity_within_bound(schottky):
    v = cocycle_identity_defect(schottky, "a", "b", pb("+ab"), I)
    assert v.magnitude() <= 8 * schottky.delta + v.width
