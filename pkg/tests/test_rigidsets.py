import pytest
from hypothesis import given, strategies as st

from hyperlab import oracles
from hyperlab.boundary import extended_gromov, fixed_points
from hyperlab.errors import ConfigError
from hyperlab.presets import preset
from hyperlab.rigidsets import (BudgetFunction, build_E_phi, build_E_prime, choose_theta, escape_trend,
                                rigidity_probe, sparsity_check)
from hyperlab.spaces import FreeTree
from hyperlab.words import parse_word as W

SQRT = BudgetFunction.parse("sqrt")


@pytest.fixture(scope="module")
def E_phi():
    return build_E_phi(FreeTree(2), "ab", "a", SQRT)


@pytest.fixture(scope="module")
def E_prime():
    return build_E_prime(FreeTree(2), SQRT)


@given(st.integers(0, 10 ** 6))
def test_sqrt_budget_is_ceiling(T):
    f = SQRT(T)
    assert f >= 1 and (f - 1) ** 2 < max(T, 1) <= f * f


def test_budget_parse():
    assert BudgetFunction.parse("piecewise:0=1,10=3")(12) == 3
    with pytest.raises(ConfigError):
        BudgetFunction.parse("cubic")


def test_choose_theta(tree):
    assert choose_theta(tree, "a") == W("b")
    assert choose_theta(tree, "ab") == W("a")
    for g in ("a", "ab", "aB", "abb"):
        theta = choose_theta(tree, g)
        assert theta
        _, minus = fixed_points(tree, g)
        extended_gromov(tree, minus.translate(theta), minus)


def test_E_phi_structure(E_phi):
    first = E_phi.members[0]
    assert first.element == W("ab") ** -1 and first.branch == "E1"
    assert all(m.rebuild() == m.element for m in E_phi.members)
    assert sum(1 for m in E_phi.members if m.length <= 100) <= 10
    assert len(set(E_phi.elements())) == len(E_phi)


def test_E_phi_sparse(E_phi, tree):
    assert sparsity_check(E_phi, tree, SQRT, T_max=1e4).passed
    assert sparsity_check(E_phi, tree, SQRT).passed


def test_E_prime_members(E_prime, tree):
    first = E_prime.members[0]
    assert first.gamma == W("a") and first.eta == W("b")
    assert first.element == W("a") ** -first.n * W("B")
    assert all(oracles.is_primary(str(w)) for w in E_prime.elements())
    assert sparsity_check(E_prime, tree, SQRT, T_max=1e4).passed


def test_E_prime_skips_proper_powers():
    # √ budget at radius 2 needs ℓ ≥ 4¹⁶, so the skip path is exercised under a fast budget
    E = build_E_prime(FreeTree(2), BudgetFunction.parse("piecewise:0=1,1=1000000"), radius=2)
    assert {g for g, why in E.skipped if why == "proper power"} == {"aa", "AA", "bb", "BB"}
    assert all(oracles.is_primary(str(w)) for w in E.elements())


def test_sparsity_edge_cases(tree):
    assert sparsity_check([], tree, SQRT).passed
    r = sparsity_check(tree.ball(3), tree, BudgetFunction.parse("piecewise:0=1"))
    assert not r.passed
    T, count, f = r.first_violation
    assert count > f


def test_probe_same_model(E_phi, tree):
    r = rigidity_probe(E_phi, tree, tree, 3)
    assert r.max_diff_E == r.max_diff_ball == 0


def test_probe_word_metrics(E_phi, tree):
    s2 = preset("tree2-s2")
    assert (tree.displacement("b"), s2.displacement("b")) == (1, 2)
    r = rigidity_probe(E_phi, tree, s2, 3, limit=50)
    assert r.first_E_index is not None and r.first_E_index < 50
    assert r.max_diff_ball > 0


def test_probe_conjugate_matrices():
    E = build_E_phi(FreeTree(2), "ab", "a", SQRT)
    r = rigidity_probe(E, preset("schottky"), preset("schottky-conj"), 6)
    assert r.max_diff_E <= 1e-9 and r.max_diff_ball <= 1e-9


def test_escape_trend(E_phi, tree):
    trend = escape_trend(E_phi, tree)
    assert len(trend) == len(E_phi)
