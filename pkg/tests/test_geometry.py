from __future__ import annotations

import itertools

import numpy as np
import pytest

from fingeo.gf import SUB, TOP, get_tower
from fingeo.geometry import (
    BlockDecomposition,
    alpha,
    alpha_decomposable,
    commutation_check,
    desarguesian_spread,
    field_reduce,
    function_table,
    lift,
    normalize_rows,
    partition_check,
    projective_points,
    rank_one_check,
    read_points,
    reduce_points,
    segre_element,
    sigma_dagger,
    sigma_fix_check,
    sign_pattern,
    span_rank,
    to_fixed,
)
from fingeo.linalg import rref, span_vectors

CASES = [(2, 2, 2), (2, 2, 3), (3, 2, 2), (2, 3, 2)]  # (r, t, q)


def tower_for(r, t, q):
    return get_tower(q, 1, t)


def point_set(tw, rows):
    pts = span_vectors(tw, rows, SUB)
    pts.discard((0,) * np.shape(rows)[1])
    return pts


@pytest.mark.parametrize("r,t,q", CASES)
def test_projective_points_count_and_normal_form(r, t, q):
    tw = tower_for(r, t, q)
    P = projective_points(tw, r)
    Q = q**t
    assert len(P) == (Q**r - 1) // (Q - 1)
    assert len({tuple(p) for p in P}) == len(P)
    assert (normalize_rows(tw, P) == P).all()


@pytest.mark.parametrize("r,t,q", CASES)
def test_reduce_and_read_are_inverse(r, t, q, rng):
    tw = tower_for(r, t, q)
    X = rng.integers(0, tw.order, size=(7, r))
    C = reduce_points(tw, X)
    assert C.shape == (7, r * t)
    assert np.isin(C, tw.subfield_elements()).all()
    assert (read_points(tw, r, C) == X).all()


@pytest.mark.parametrize("r,t,q", CASES)
def test_spread_is_a_partition(r, t, q):
    tw = tower_for(r, t, q)
    spread = desarguesian_spread(tw, r)
    assert len(spread) == (q ** (r * t) - 1) // (q**t - 1)
    assert all(e.subspace.dim == t for e in spread)
    assert partition_check(spread)
    # oracle: explicit pairwise disjointness and cover
    sets = [point_set(tw, e.subspace.rows) for e in spread]
    for a, b in itertools.combinations(sets, 2):
        assert not a & b
    assert sum(len(s) for s in sets) == q ** (r * t) - 1


def test_partition_check_rejects_overlap():
    tw = tower_for(2, 2, 2)
    spread = desarguesian_spread(tw, 2)
    assert not partition_check(spread[:-1])
    assert not partition_check(spread[:-1] + [spread[0]])
    assert not partition_check([])


@pytest.mark.parametrize("r,t,q", CASES)
def test_field_reduce_is_scalar_multiples(r, t, q):
    tw = tower_for(r, t, q)
    for x in projective_points(tw, r)[:10]:
        expected = {tuple(int(v) for v in reduce_points(tw, tw.vmul(lam, x))) for lam in range(1, tw.order)}
        assert point_set(tw, field_reduce(tw, x).subspace.rows) == expected


@pytest.mark.parametrize("r,t,q", CASES)
def test_segre_construction_matches_field_reduce(r, t, q):
    tw = tower_for(r, t, q)
    for x in projective_points(tw, r):
        assert segre_element(tw, x) == field_reduce(tw, x).subspace


@pytest.mark.parametrize("r,t,q", CASES)
def test_alpha_images_span(r, t, q):
    tw = tower_for(r, t, q)
    assert span_rank(tw, r) == r**t


@pytest.mark.parametrize("r,t,q", CASES)
def test_alpha_matches_direct_product(r, t, q):
    tw = tower_for(r, t, q)
    F = function_table(r, t)
    for x in projective_points(tw, r)[:8]:
        direct = []
        for f in F:
            v = 1
            for i, j in enumerate(f):
                v = tw.mul(v, tw.frob(int(x[j]), i))
            direct.append(v)
        a = alpha(tw, x)
        assert (normalize_rows(tw, np.array(direct)) == a).all()


@pytest.mark.parametrize("r,t,q", CASES)
def test_diagram_commutes(r, t, q):
    tw = tower_for(r, t, q)
    sp = sign_pattern(tw, r)
    assert all(tw.in_subfield(s) and s != 0 for s in sp)
    for x in projective_points(tw, r):
        assert commutation_check(tw, x)


@pytest.mark.parametrize("r,t,q", CASES)
def test_alpha_image_decomposable_and_sigma_dagger_stable(r, t, q):
    tw = tower_for(r, t, q)
    for x in projective_points(tw, r)[:10]:
        assert alpha_decomposable(tw, x)
        a = alpha(tw, x)
        assert (normalize_rows(tw, sigma_dagger(tw, r, a)) == a).all()


def test_sigma_has_order_t_and_fixes_lifted_vectors(rng):
    tw = tower_for(3, 3, 2)
    bd = BlockDecomposition(tw, 3)
    V = rng.integers(0, tw.order, size=(4, 9))
    W = V
    for _ in range(tw.t):
        W = bd.sigma(W)
    assert (W == V).all()
    L = lift(tw, rng.integers(0, tw.order, size=(4, 3)))
    assert (bd.sigma(L) == L).all()


def test_fixed_coordinates_are_sigma_fixed(rng):
    tw = tower_for(2, 2, 3)
    C = rng.integers(0, 3, size=(5, 4))
    bd = BlockDecomposition(tw, 2)
    F = to_fixed(tw, 2, C)
    assert (bd.sigma(F) == F).all()


def test_sigma_fix_check_and_fixed_part(rng):
    tw = tower_for(3, 2, 2)
    bd = BlockDecomposition(tw, 3)
    C = rng.integers(0, 2, size=(2, 6))
    w = rref(tw, to_fixed(tw, 3, C), TOP)
    assert sigma_fix_check(w, bd)
    assert bd.fixed_part(w) == rref(tw, C, SUB)
    assert not sigma_fix_check(bd.block(0), bd)


def test_rank_one_on_subgeometry():
    tw = tower_for(2, 2, 2)
    for x in [(1, 0), (0, 1), (1, 1)]:
        assert rank_one_check(field_reduce(tw, x))


@pytest.mark.parametrize("r,t,q", [(2, 2, 2), (3, 2, 2)])
def test_rank_one_every_subgeometry_point(r, t, q):
    tw = tower_for(r, t, q)
    for x in itertools.product(range(q), repeat=r):
        if any(x) and tuple(normalize_rows(tw, np.array(x))) == x:
            assert rank_one_check(field_reduce(tw, x))


def test_rank_one_fails_off_subgeometry():
    tw = tower_for(2, 2, 2)
    elt = field_reduce(tw, (1, tw.xi))
    assert rank_one_check(elt, subgeometry=False) is False
    with pytest.raises(ValueError):
        rank_one_check(elt)
