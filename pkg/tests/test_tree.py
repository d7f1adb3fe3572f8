from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import w
from hororadon import (IDENTITY, ROOT, CylindricalFunction, InsufficientCylinderDepth,
                       Isometry, RootedPerm, Translate, Tree)
from hororadon import oracles
from hororadon.tree import act_boundary, reduce_word


def vertices(q: int, max_len: int = 6):
    """Reduced words over 0..q."""
    return st.lists(st.integers(0, q), max_size=2 * max_len).map(
        lambda xs: reduce_word(xs)[:max_len])


# -- basic geometry ----------------------------------------------------------


def test_tree_constants():
    t = Tree(2)
    assert t.c_q == Fraction(1, 3)
    assert Tree(3).c_q == Fraction(3, 8)
    assert t.T == pytest.approx(2 * np.pi / np.log(2))
    with pytest.raises(ValueError):
        Tree(1)


def test_distance_examples(tree2):
    assert tree2.distance(ROOT, w("01")) == 2
    assert tree2.distance(w("01"), w("02")) == 2
    assert tree2.distance(w("010"), w("2")) == 4


def test_ball_and_sphere_sizes(tree2):
    assert len(tree2.sphere(ROOT, 1)) == 3
    assert len(tree2.sphere(ROOT, 3)) == 12
    assert len(tree2.ball(ROOT, 0)) == 1
    q = 3
    t = Tree(q)
    for m in range(1, 5):
        assert len(t.sphere(ROOT, m)) == (q + 1) * q ** (m - 1)


def test_ball_around_nonroot_vertex(tree):
    c = (1, 0)
    ball = tree.ball(c, 2)
    assert len(ball) == 1 + (tree.q + 1) + (tree.q + 1) * tree.q
    assert all(tree.distance(c, x) <= 2 for x in ball)


def test_distance_matches_bfs_random_pairs():
    t = Tree(3)
    adj = oracles.adjacency(t, 5)
    ball = t.ball(ROOT, 5)
    rng = np.random.default_rng(5)
    for i, j in rng.integers(0, len(ball), size=(50, 2)):
        x, y = ball[i], ball[j]
        assert t.distance(x, y) == oracles.bfs_distances(adj, x)[y]


def test_words_are_reduced_and_ordered(tree):
    ws = tree.words(3)
    assert len(ws) == tree.num_cylinders(3) == (tree.q + 1) * tree.q ** 2
    assert list(ws) == sorted(ws)
    assert all(tree.is_vertex(u) for u in ws)


def test_check_vertex_rejects_unreduced(tree2):
    with pytest.raises(ValueError):
        tree2.check_vertex((0, 0))
    with pytest.raises(ValueError):
        tree2.check_vertex((3,))


# -- horocyclic index ---------------------------------------------------------


def test_horocyclic_index_examples(tree2):
    assert tree2.horocyclic_index(ROOT, w("0"), w("01")) == 1
    assert tree2.horocyclic_index(ROOT, w("0"), w("12")) == -1
    with pytest.raises(InsufficientCylinderDepth):
        tree2.horocyclic_index(ROOT, w("012"), w("01"))


def test_horocyclic_index_matches_path_oracle(tree2):
    adj = oracles.adjacency(tree2, 3)
    ball = tree2.ball(ROOT, 2)
    for u in tree2.words(3)[::4]:
        for v in ball[::3]:
            for x in ball:
                assert tree2.horocyclic_index(v, x, u) == oracles.kappa_by_paths(adj, v, x, u)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_horocyclic_index_properties(data):
    q = data.draw(st.sampled_from([2, 3]))
    t = Tree(q)
    v, x, y = (data.draw(vertices(q, 4)) for _ in range(3))
    u = data.draw(vertices(q, 8).filter(lambda u: len(u) >= 4))
    k = t.horocyclic_index
    assert abs(k(v, x, u)) <= t.distance(v, x)
    assert (k(v, x, u) - t.distance(v, x)) % 2 == 0
    assert k(v, x, u) + k(x, y, u) == k(v, y, u)
    assert k(x, v, u) == -k(v, x, u)
    # constant on sub-cylinders
    for a in t.children(u):
        assert k(v, x, a) == k(v, x, u)


def test_kappa_array_agrees_with_scalar(tree):
    v, x = (1,), (0, 2) if tree.q >= 2 else (0, 1)
    arr = tree.kappa_array(v, x, 3)
    assert list(arr) == [tree.horocyclic_index(v, x, u) for u in tree.words(3)]


# -- measures -----------------------------------------------------------------


def test_cylinder_measures(tree2):
    assert tree2.cylinder_measure_o(w("0")) == Fraction(1, 3)
    assert tree2.cylinder_measure_o(w("01")) == Fraction(1, 6)
    t3 = Tree(3)
    assert sum(t3.cylinder_measure_o(u) for u in t3.words(3)) == 1
    assert set(t3.nu_exact(3)) == {Fraction(1, 36)}


def test_nu_at_other_base_is_probability(tree):
    for base in tree.ball(ROOT, 2):
        assert sum(tree.nu_exact(3, base)) == 1
        assert tree.nu_array(3, base).sum() == pytest.approx(1.0, abs=1e-14)


def test_integrate_boundary_examples(tree2):
    one = CylindricalFunction.from_callable(tree2, 0, lambda u: 1)
    assert tree2.integrate_boundary(one) == 1
    one2 = CylindricalFunction.from_callable(tree2, 2, lambda u: 1)
    assert tree2.integrate_boundary(one2, base=w("0")) == 1
    ind = CylindricalFunction.indicator(tree2, w("0"))
    assert tree2.integrate_boundary(ind) == Fraction(1, 3)


def test_poisson_kernel_examples(tree2):
    assert all(tree2.poisson_kernel(ROOT, u) == 1 for u in tree2.words(2))
    assert tree2.poisson_kernel(w("0"), w("01")) == 2
    pk = CylindricalFunction.from_callable(tree2, 2, lambda u: tree2.poisson_kernel(w("01"), u))
    assert tree2.integrate_boundary(pk) == pytest.approx(1.0)


def test_refine_preserves_integral(tree):
    F = CylindricalFunction.from_callable(tree, 2, lambda u: sum(u) + 1)
    assert tree.integrate_boundary(F.refine(4)) == tree.integrate_boundary(F)


# -- isometries ---------------------------------------------------------------


def test_translate_examples(tree2):
    g = Translate(w("0"))
    assert g(ROOT) == w("0")
    assert g(w("0")) == ROOT
    assert g(w("01")) == w("1")


def test_rooted_perm_fixes_root_and_preserves_length(tree):
    rng = np.random.default_rng(0)
    p = RootedPerm.random(tree, 2, rng)
    assert p(ROOT) == ROOT
    for x in tree.ball(ROOT, 4):
        assert len(p(x)) == len(x)
        assert p.inverse()(p(x)) == x


def test_isometry_composition_and_inverse(tree):
    rng = np.random.default_rng(1)
    for _ in range(10):
        g = Isometry.random(tree, rng)
        h = Isometry.random(tree, rng)
        gh = g @ h
        for x in tree.ball(ROOT, 3):
            assert gh(x) == g(h(x))
            assert g.inverse()(g(x)) == x
    assert IDENTITY((1, 0)) == (1, 0)


def test_isometry_preserves_distance(tree):
    rng = np.random.default_rng(2)
    ball = tree.ball(ROOT, 3)
    for _ in range(5):
        g = Isometry.random(tree, rng)
        for x in ball[::2]:
            for y in ball[::3]:
                assert tree.distance(g(x), g(y)) == tree.distance(x, y)


def test_boundary_prefix_needs_depth(tree2):
    g = Isometry([Translate(w("01"))])
    with pytest.raises(InsufficientCylinderDepth):
        g.boundary_prefix(w("12"), 1)
    # prefix of the image of a long ray is determined
    assert g.boundary_prefix(w("121"), 1) == g(w("121"))[:1]


def test_kappa_equivariance(tree):
    rng = np.random.default_rng(3)
    for _ in range(5):
        g = Isometry.random(tree, rng)
        d = g.displacement_bound
        for u in tree.words(3 + d)[::7]:
            gu = g.boundary_prefix(u, 3)
            assert len(gu) == 3
            for v in tree.ball(ROOT, 1):
                for x in tree.ball(ROOT, 1):
                    assert tree.horocyclic_index(g(v), g(x), gu) == \
                        tree.horocyclic_index(v, x, u)


def test_quasi_invariance_of_boundary_measure(tree):
    rng = np.random.default_rng(4)
    F = CylindricalFunction.indicator(tree, (1,))
    for _ in range(5):
        g = Isometry.random(tree, rng)
        lhs = tree.integrate_boundary(act_boundary(g, F))
        # int F(g^{-1} w) dnu^o = int F dnu^{g^{-1} o}
        rhs = tree.integrate_boundary(F.refine(max(1, len(g.inverse()(ROOT)))),
                                      base=g.inverse()(ROOT))
        assert lhs == rhs
