from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fingeo.exterior import (
    IndexTable,
    PluckerVector,
    batch_det,
    evaluate,
    form_kernel,
    hodge_form,
    is_decomposable,
    minors,
    outer_rows,
    plucker,
    wedge,
    wedge_kernel,
    wedge_products,
)
from fingeo.gf import SUB, get_tower
from fingeo.linalg import enumerate_subspaces, join, matmul, meet, rank, rref


def leibniz_det(tw, M):
    """Oracle: permutation expansion with explicit sign counting."""
    k = len(M)
    total = 0
    for perm in itertools.permutations(range(k)):
        inv = sum(1 for i in range(k) for j in range(i + 1, k) if perm[i] > perm[j])
        term = 1
        for i in range(k):
            term = tw.mul(term, int(M[i][perm[i]]))
        total = tw.sub(total, term) if inv % 2 else tw.add(total, term)
    return total


def test_index_table_round_trip():
    tab = IndexTable.get(6, 3)
    assert len(tab) == 20
    for i, s in enumerate(tab.subsets):
        assert tab.lookup(s) == i
    assert [tuple(s) for s in tab.subsets] == list(itertools.combinations(range(6), 3))
    assert len(IndexTable.get(4, 0)) == 1


@pytest.mark.parametrize("key", [(2, 1, 4), (3, 1, 2), (5, 1, 1)])
@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
def test_batch_det_matches_leibniz(key, k, rng):
    tw = get_tower(*key)
    mats = rng.integers(0, tw.order, size=(12, k, k))
    mats[0, -1] = mats[0, 0]  # a singular one
    got = batch_det(tw, mats)
    assert [int(x) for x in got] == [leibniz_det(tw, m) for m in mats]


def test_minors_expansion_and_elimination_agree(gf16, rng):
    B = rng.integers(0, 16, size=(5, 8))
    subsets = IndexTable.get(8, 5).subsets
    direct = [leibniz_det(gf16, B[:, s]) for s in subsets]
    assert minors(gf16, B, subsets).tolist() == direct


def test_plucker_basis_independent(gf3, rng):
    for _ in range(10):
        B = rng.integers(0, 3, size=(2, 4))
        if rank(gf3, B) < 2:
            continue
        while True:
            g = rng.integers(0, 3, size=(2, 2))
            if leibniz_det(gf3, g):
                break
        w1 = rref(gf3, B)
        w2 = rref(gf3, matmul(gf3, g, B))
        assert plucker(w1) == plucker(w2)
        assert wedge(gf3, B).proportional(wedge(gf3, matmul(gf3, g, B)))


def test_wedge_of_dependent_vectors_is_zero(gf16):
    v = np.array([[1, 2, 3, 4], [2, 4, 6, 8]])
    v[1] = gf16.vmul(7, v[0])
    assert wedge(gf16, v).is_zero()


def test_plucker_of_zero_subspace_rejected(gf4):
    with pytest.raises(ValueError):
        plucker(rref(gf4, np.zeros((0, 3), dtype=np.int64), n=3))


def test_hodge_form_is_full_determinant(gf16, rng):
    n, k = 6, 2
    for _ in range(10):
        c = rref(gf16, rng.integers(0, 16, size=(n - k, n)))
        if c.dim != n - k:
            continue
        f = hodge_form(c, k)
        X = rng.integers(0, 16, size=(k, n))
        val = evaluate(gf16, f, wedge(gf16, X).coords)
        assert val == leibniz_det(gf16, np.vstack([X, c.rows]))


def test_hodge_form_vanishes_when_meeting(gf4, rng):
    n, k = 5, 2
    for _ in range(10):
        c = rref(gf4, rng.integers(0, 4, size=(n - k, n)))
        if c.dim != n - k:
            continue
        x = c.rows[0]
        y = rng.integers(0, 4, size=n)
        assert evaluate(gf4, hodge_form(c, k), wedge(gf4, [x, y]).coords) == 0


def test_hodge_form_dimension_check(gf4):
    with pytest.raises(ValueError):
        hodge_form(rref(gf4, [[1, 0, 0, 0]]), 2)


def test_decomposability_exhaustive_gf2():
    tw = get_tower(2, 1, 1)
    lines = {tuple(plucker(w).coords) for w in enumerate_subspaces(tw, 4, 2, SUB)}
    assert len(lines) == 35
    all_vectors = list(itertools.product(range(2), repeat=6))
    for coords in all_vectors[1:]:
        v = PluckerVector(tw, 4, 2, np.array(coords), SUB)
        ok, witness = is_decomposable(v)
        assert ok == (coords in lines)
        if ok:
            assert plucker(witness).proportional(v)


def test_e12_plus_e34_not_decomposable(gf2):
    tab = IndexTable.get(4, 2)
    c = np.zeros(6, dtype=np.int64)
    c[tab.lookup((0, 1))] = 1
    c[tab.lookup((2, 3))] = 1
    assert is_decomposable(PluckerVector(gf2, 4, 2, c))[0] is False


def test_wedge_kernel_recovers_subspace(gf16, rng):
    for k in (1, 2, 3):
        w = rref(gf16, rng.integers(0, 16, size=(k, 6)))
        if w.dim == k:
            assert wedge_kernel(plucker(w)) == w


def test_form_kernel_of_hodge_form(gf4, rng):
    # f(x, y) = det[x; y; c] has kernel exactly c when n - k >= 1
    c = rref(gf4, rng.integers(0, 4, size=(3, 5)))
    if c.dim == 3:
        assert form_kernel(gf4, hodge_form(c, 2), 5, 2) == c


def test_wedge_products_row_order(gf16, rng):
    blocks = [rng.integers(0, 16, size=(2, 5)) for _ in range(3)]
    W = wedge_products(gf16, blocks, 5)
    assert W.shape == (8, math.comb(5, 3))
    for row, (a, b, c) in zip(W, itertools.product(range(2), repeat=3)):
        assert (row == wedge(gf16, [blocks[0][a], blocks[1][b], blocks[2][c]]).coords).all()


def test_outer_rows(gf4):
    out = outer_rows(gf4, [np.array([[1, 2]]), np.array([[3, 1, 2]])])
    assert out.tolist() == [[3, 1, 2, gf4.mul(2, 3), 2, gf4.mul(2, 2)]]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31))
def test_wedge_multilinear_alternating(seed):
    tw = get_tower(3, 1, 2)
    rng = np.random.default_rng(seed)
    x, y, z = rng.integers(0, 9, size=(3, 5))
    a = int(rng.integers(0, 9))
    lhs = wedge(tw, [tw.vadd(x, tw.vmul(a, z)), y]).coords
    rhs = tw.vadd(wedge(tw, [x, y]).coords, tw.vmul(a, wedge(tw, [z, y]).coords))
    assert (lhs == rhs).all()
    assert (wedge(tw, [y, x]).coords == tw.vneg(wedge(tw, [x, y]).coords)).all()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31))
def test_meet_detected_by_wedge(seed):
    tw = get_tower(2, 1, 2)
    rng = np.random.default_rng(seed)
    a = rref(tw, rng.integers(0, 4, size=(2, 4)))
    b = rref(tw, rng.integers(0, 4, size=(2, 4)))
    if a.dim == 2 and b.dim == 2:
        both = wedge(tw, np.vstack([a.rows, b.rows]))
        assert both.is_zero() == (meet(a, b).dim > 0)
        assert join(a, b).dim == 4 - meet(a, b).dim
