"""Tree backend tests: exact combinatorics, agreement with brute force, and
the seeded weak-(1,1) family (k = 2 here; the cross-branching sweep runs in
the acceptance suite)."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nalab.errors import DomainError
from nalab.treelab import (
    TreeSpace,
    VertexFunction,
    VertexWeight,
    tree_ball,
    tree_kolmogorov,
    tree_maximal,
    tree_maximal_naive,
    tree_product_measure,
    weak11_constant,
)


@given(k=st.integers(min_value=2, max_value=4), depth=st.integers(min_value=1, max_value=6))
@settings(max_examples=30, deadline=None)
def test_size_and_parents(k, depth):
    t = TreeSpace(k, depth)
    assert t.size == (k ** (depth + 1) - 1) // (k - 1)
    for v in range(1, min(t.size, 120)):
        assert t.parent[v] == (v - 1) // k


def test_paths_round_trip():
    t = TreeSpace(2, 5)
    v = t.vertex_at("0.1.0")
    assert t.path_of(v) == "0.1.0"
    assert t.vertex_at("") == 0 and t.path_of(0) == ""
    assert t.depths[v] == 3


def test_distance_symmetry_and_table():
    t = TreeSpace(2, 5)
    rng = np.random.default_rng(7)
    for _ in range(100):
        x, y = (int(a) for a in rng.integers(0, t.size, 2))
        assert t.distance(x, y) == t.distance(y, x)
        assert t.distance(x, y) == t.distances_from(x)[y]
    assert t.distance(0, t.size - 1) == 5


def test_ball_counts():
    t = TreeSpace(2, 8)
    assert len(tree_ball(t, 0, 3)) == 15
    for k in (2, 3, 4):
        tk = TreeSpace(k, 6)
        for r in range(0, 7):
            assert len(tree_ball(tk, 0, r)) == (k ** (r + 1) - 1) // (k - 1)


def test_ball_nesting_and_boundary_flag():
    t = TreeSpace(2, 8)
    prev = set()
    for r in range(0, 11):
        b = tree_ball(t, 37, r)
        cur = set(int(u) for u in b.vertices)
        assert prev <= cur
        assert b.touches_boundary == (t.depths[37] + r >= 8)
        if not b.touches_boundary and r > 0:
            assert len(cur) > len(prev)
        prev = cur


def test_maximal_trivials():
    t = TreeSpace(2, 8)
    f = VertexFunction.dirac(t, [100])
    res = tree_maximal(f)
    assert res.values[100] == 1.0 and res.argmax_radius[100] == 0
    assert np.all(res.values >= f.values)
    with pytest.raises(DomainError):
        VertexFunction(t, -np.ones(t.size))
    with pytest.raises(DomainError):
        VertexFunction(t, np.ones(3))


def test_maximal_equals_naive_exactly():
    rng = np.random.default_rng(1234)
    for tree in (TreeSpace(2, 5), TreeSpace(3, 3)):
        for trial in range(6):
            if trial % 2 == 0:
                vals = rng.integers(0, 8, tree.size).astype(float)
            else:
                vals = rng.integers(0, 64, tree.size) / 64.0
            f = VertexFunction(tree, vals)
            fast = tree_maximal(f)
            slow = tree_maximal_naive(f)
            assert np.array_equal(fast.values, slow.values)
            assert np.array_equal(fast.argmax_radius, slow.argmax_radius)
            assert np.array_equal(fast.boundary, slow.boundary)


def test_weak11_point_mass_family_k2():
    tree = TreeSpace(2, 8)
    rng = np.random.default_rng(1234)
    cs = [
        weak11_constant(VertexFunction.dirac(tree, rng.integers(0, tree.size, 10)))
        for _ in range(100)
    ]
    assert max(cs) == pytest.approx(0.9, abs=1e-12)


def test_product_measure_brute_force():
    t = TreeSpace(2, 3)
    w = VertexWeight(t, np.linspace(1.0, 2.0, t.size))
    sets = ([0, 1, 2], [3, 4, 5, 6], list(range(t.size)))
    for E in sets:
        for F in sets:
            for n in (0, 1, 2, 3, 6):
                for mode in ("exact-distance", "less-than"):
                    got = tree_product_measure(w, E, F, n, mode=mode)
                    brute = 0.0
                    for x in set(E):
                        for y in set(F):
                            d = t.distance(x, y)
                            if (d == n) if mode == "exact-distance" else (d < n):
                                brute += w.values[y]
                    assert abs(got - brute) < 1e-12, (E, F, n, mode)


def test_product_measure_edge_count():
    t = TreeSpace(2, 8)
    w = VertexWeight.ones(t)
    allv = range(t.size)
    assert tree_product_measure(w, [1, 3], [2, 6], 0, mode="less-than") == 0.0
    pm1 = tree_product_measure(w, allv, allv, 1, mode="exact-distance")
    assert pm1 == 2 * (2**9 - 2)  # ordered pairs at distance 1 = twice the edges


def test_kolmogorov_trivials():
    t = TreeSpace(2, 8)
    rep = tree_kolmogorov(0.5, VertexFunction.zeros(t), range(t.size))
    assert rep.lhs == 0.0 and rep.rhs == 0.0 and rep.holds
    f_root = VertexFunction.dirac(t, [0])
    ball4 = tree_ball(t, 0, 4)
    rep5 = tree_kolmogorov(0.5, f_root, ball4.vertices)
    assert rep5.holds
    assert tree_kolmogorov(0.9, f_root, ball4.vertices).rhs >= rep5.rhs
    for bad_q in (0.0, 1.0, -0.2, 1.3):
        with pytest.raises(DomainError):
            tree_kolmogorov(bad_q, f_root, ball4.vertices)


def test_kolmogorov_seeded_sample():
    # a 20-case slice of the 100-case acceptance sweep
    t = TreeSpace(2, 8)
    rng = np.random.default_rng(1234)
    for _ in range(20):
        f = VertexFunction(t, rng.uniform(0.0, 1.0, t.size))
        center = int(rng.integers(0, t.size))
        radius = int(rng.integers(0, 2 * t.depth + 1))
        B = tree_ball(t, center, radius).vertices
        for q in (0.3, 0.5, 0.7):
            assert tree_kolmogorov(q, f, B).holds
