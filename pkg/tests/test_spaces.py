import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hyperlab import oracles
from hyperlab.errors import BallExceeded, ConfigError
from hyperlab.spaces import (ELLIPTIC, HYPERBOLIC, SL2, FreeTree, Orbit, UpperHalfPlane, WordMetricBall, apply,
                             ball_enumerate, classify, distance, model_from_config, schottky_generators)
from hyperlab.words import Word, parse_word as W

from conftest import words

E = Word.identity()


def s(w: Word) -> str:
    return str(w) if w else ""


def test_tree_distance_examples(tree):
    assert distance(tree, E, W("abab")) == 4
    assert distance(tree, W("ab"), W("ba")) == 4


def test_uhp_distance_example(diag):
    assert distance(diag, 1j, 2j) == pytest.approx(math.log(2), abs=1e-12)


def test_apply_examples(tree, diag):
    assert apply(tree, "a", E) == W("a")
    assert str(apply(tree, "ab", W("ba"))) == "abba"
    assert apply(diag, "a", 1j) == pytest.approx(2j, abs=1e-12)


@pytest.mark.parametrize("radius, count", [(0, 1), (1, 5), (2, 17), (3, 53)])
def test_ball_sizes(tree, radius, count):
    ball = ball_enumerate(tree, radius)
    assert len(ball) == count == len(set(ball))
    assert all(len(w) <= radius for w in ball)


def test_classify_examples(tree, diag):
    assert classify(tree, "ab") == HYPERBOLIC
    assert classify(tree, E) == ELLIPTIC
    assert diag.element("a").trace() == pytest.approx(3 / math.sqrt(2))
    assert classify(diag, "a") == HYPERBOLIC


@given(words(), words())
def test_tree_distance_matches_oracle(p, q):
    tree = FreeTree(2)
    assert tree.distance(p, q) == oracles.tree_distance(s(p), s(q))


@given(words(max_size=6), words(max_size=6))
def test_orbit_distance_is_displacement(g, h):
    tree = FreeTree(2, base_point="ab")
    o = tree.base_point
    assert tree.dist(Orbit(g), Orbit(h)) == tree.distance(g * o, h * o)


@given(st.floats(-3, 3), st.floats(0.1, 5), st.floats(-3, 3), st.floats(0.1, 5))
def test_h2_distance_matches_oracle(x1, y1, x2, y2):
    m = UpperHalfPlane(schottky_generators())
    p, q = complex(x1, y1), complex(x2, y2)
    assert m.distance(p, q) == pytest.approx(oracles.h2_distance(p, q), abs=1e-9)


@given(words(max_size=8))
def test_h2_action_is_isometric(g):
    m = UpperHalfPlane(schottky_generators())
    p, q = 0.3 + 1.2j, -0.7 + 0.4j
    gp, gq = m.apply(g, p), m.apply(g, q)
    assert m.distance(gp, gq) == pytest.approx(m.distance(p, q), abs=1e-6)


def test_long_products_keep_scale():
    # entries of (ab)^16 overflow nothing but would lose all precision under det renormalization
    m = UpperHalfPlane(schottky_generators())
    g = W("ab")
    ell = m.trace_length(g)
    d16, d32 = m.displacement(g, 16), m.displacement(g, 32)
    assert (d32 - d16) / 16 == pytest.approx(ell, abs=1e-6)
    big = m.displacement(g, 4096)
    assert math.isfinite(big) and big / 4096 == pytest.approx(ell, rel=1e-3)


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_sl2_product_matches_numpy(t1, t2, t3):
    def rot(t):
        return [[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]]

    A, B = np.array(rot(t1)) @ np.diag([2.0, 0.5]), np.array(rot(t2)) @ np.diag([1.5, 1 / 1.5]) @ rot(t3)
    prod = SL2.from_rows(A.tolist()) * SL2.from_rows(B.tolist())
    assert np.allclose(np.array(prod.rows()), A @ B, atol=1e-12)
    assert prod.det() == pytest.approx(1.0, abs=1e-9)


def test_word_metric_ball():
    m = WordMetricBall(2, ["a", "ab"], radius=4)
    assert m.word_length(W("b")) == 2
    assert m.word_length(W("ab")) == 1
    with pytest.raises(BallExceeded):
        m.word_length(W("bbbbb"))
    with pytest.raises(BallExceeded):
        m.ball(5)


def test_marked_tree_matches_word_ball():
    # letters of the marked tree are a and c = ab, so shared b is read as A·c
    marked = FreeTree(2, basis=["a", "Ab"])
    ball = WordMetricBall(2, ["a", "ab"], radius=6)
    for w in ball_enumerate(FreeTree(2), 3):
        assert marked.displacement(w) == ball.word_length(w)


def test_config_errors():
    with pytest.raises(ConfigError):
        model_from_config("m", {"kind": "banana"})
    with pytest.raises(ConfigError):
        model_from_config("m", {"kind": "upper_half_plane", "generators": [[1, 2, 3]]})
    with pytest.raises(ConfigError):
        model_from_config("m", {"kind": "word_metric_ball"})


def test_config_delta_and_conjugation():
    m = model_from_config("m", {"kind": "upper_half_plane", "generators": "schottky", "delta": 0.5,
                                "delta_margin": 0.25, "conjugate_by": [[2, 1], [1, 1]]})
    assert m.delta == 0.75
    base = model_from_config("b", {"kind": "upper_half_plane", "generators": "schottky"})
    assert m.trace_length("aB") == pytest.approx(base.trace_length("aB"), abs=1e-9)
