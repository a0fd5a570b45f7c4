import math

import numpy as np
import pytest
from hypothesis import given

from hyperlab import oracles
from hyperlab.boundary import limit_set_sample, parse_boundary as pb
from hyperlab.errors import ConfigError, PreconditionFailed
from hyperlab.experiments import long_random_word
from hyperlab.filling import (barycenter_descent, cobound_estimate, coset_relation_defect, embedding_check,
                              gromov_comparison, instance, line_witnesses, relative_busemann, rho_distance,
                              rho_vs_sup_check, supinf_opposite_check)
from hyperlab.presets import preset
from hyperlab.spaces import FreeTree
from hyperlab.words import Word, parse_word as W

from conftest import words

E = Word.identity()


def s(w) -> str:
    return str(w) if w else ""


@pytest.fixture(scope="module")
def opposite():
    # one ray past q = ab, one past p = e on the far side
    return (pb("+ab"), pb("+b"))


def test_rho_examples(tree, opposite):
    De = instance(tree, E, opposite)
    assert rho_distance(De, De).estimate == 0
    wit = line_witnesses(tree, E, W("ab"))
    assert rho_distance(instance(tree, E, wit), instance(tree, W("ab"), wit)).estimate == 2
    with pytest.raises(ConfigError):
        rho_distance(instance(tree, E, (pb("+a"),)), instance(tree, W("a"), (pb("+a"),)))


def test_relative_busemann(tree):
    wit = (pb("+a"), pb("-a"))
    De, Da = instance(tree, E, wit), instance(tree, W("a"), wit)
    assert relative_busemann(De, De, pb("+a")).estimate == 0
    v = relative_busemann(De, Da, pb("+a"))
    assert v.estimate == 0.5
    assert v.width == pytest.approx(101 + 8 * tree.delta)


def test_supinf_and_rho_vs_sup(tree, opposite):
    # two rays branching at q give ρ = d; the ray behind p makes f take both signs
    wit = line_witnesses(tree, E, W("ab")) + opposite[1:]
    De, Dab = instance(tree, E, wit), instance(tree, W("ab"), wit)
    c = supinf_opposite_check(De, Dab)
    assert c.statistic == 0 and c.detail == {"sup": 1.0, "inf": -1.0}
    assert c.bound == 5 * tree.delta + 1.5 * 101
    assert supinf_opposite_check(De, De).statistic == 0
    r = rho_vs_sup_check(De, Dab)
    assert r.statistic == 2 and r.detail["two_sup_f"] == 2 and r.passed
    # the opposite pair alone lies on the line through p and q, so it sees no distance
    assert rho_distance(instance(tree, E, opposite), instance(tree, W("ab"), opposite)).estimate == 0


def test_embedding_examples(tree):
    chk = embedding_check(tree, E, W("abab"))
    assert chk.rho == chk.distance == 4 and chk.passed
    assert chk.upper_bound == 4
    with pytest.raises(PreconditionFailed):
        embedding_check(tree, E, E)


@given(words(max_size=20), words(max_size=20))
def test_tree_embedding_exact(p, q):
    if p == q:
        return
    chk = embedding_check(FreeTree(2), p, q)
    assert chk.rho == oracles.tree_distance(s(p), s(q))


def test_h2_embedding_bounds(schottky):
    rng = np.random.default_rng(7)
    for _ in range(10):
        a, b = [complex(rng.uniform(-2, 2), math.exp(rng.uniform(-3, 3))) for _ in range(2)]
        assert embedding_check(schottky, a, b).passed


def test_descent_inside_stop_radius(tree, opposite):
    tr = barycenter_descent(instance(tree, W("ab"), opposite), E)
    assert tr.iterations == 0 and tr.finding is None


def test_descent_moves_toward_target(tree):
    rng = np.random.default_rng(3)
    r = long_random_word(rng, 2, 200_000)
    wit = line_witnesses(tree, E, r) + tuple(limit_set_sample(tree, 4, 1))
    tr = barycenter_descent(instance(tree, r, wit), E)
    rhos = [st.rho for st in tr.steps]
    assert tr.finding is None
    assert all(b < a for a, b in zip(rhos, rhos[1:]))
    assert rhos[-1] <= tr.stop_radius == 101_000
    assert tr.iterations <= 2 * 200_000 / (50 * 101) + 2
    assert tree.distance(tr.final_point, r) == rhos[-1]


def test_gromov_comparison(tree):
    pairs = [(x, y) for x in limit_set_sample(tree, 12, 2) for y in limit_set_sample(tree, 12, 2) if x != y]
    assert gromov_comparison(tree, tree, pairs).value == 0
    shifted = preset("tree2-shift")
    assert gromov_comparison(tree, shifted, pairs).value <= tree.distance(E, shifted.base_point) + 4 * tree.delta


def test_cobound(tree):
    pair = (pb("+a"), pb("+b"))
    assert cobound_estimate(tree, tree, pair, 2).estimate == 0
    shifted = preset("tree2-shift")
    vals = [cobound_estimate(tree, shifted, pair, r).estimate for r in (1, 2, 3)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    assert max(abs(v) for v in vals) <= 2 * 2 + 8 * tree.delta


def test_coset_same_model(tree):
    c = coset_relation_defect(tree, tree, "b", "a", 4)
    assert c.defect.lower == c.defect.upper == 0
    assert all(v.estimate == 0 for _, v in c.ratios)


def test_coset_conjugated_matrices(schottky, schottky_conj):
    c = coset_relation_defect(schottky, schottky_conj, "a", "a", 8)
    assert c.defect.contains(0.0, slack=c.bound)
    mags = [v.magnitude() for _, v in c.ratios]
    assert [n for n, _ in c.ratios][-1] == 64
    assert all(b <= a for a, b in zip(mags, mags[1:]))
