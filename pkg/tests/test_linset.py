from __future__ import annotations

import json

import numpy as np
import pytest

from fingeo.gf import SUB, get_tower
from fingeo.geometry import field_reduce, normalize_rows, projective_points, read_points
from fingeo.linalg import rref, span_vectors
from fingeo.linset import (
    LinearSet,
    LinearSetSpec,
    SpecError,
    VarSpec,
    block_params,
    build_W,
    canonical_spec,
    domain_basis,
    example_spec,
    minimality_check,
    points_and_weights,
    random_spec,
    sigma_fix_check,
)


@pytest.fixture(scope="module")
def example1():
    return LinearSet.from_spec(example_spec(1))


@pytest.fixture(scope="module")
def example2():
    return LinearSet.from_spec(example_spec(2))


def brute_points(ls):
    """Oracle: enumerate every GF(q)-combination of W and normalise."""
    tw = ls.tower
    vecs = span_vectors(tw, ls.W.rows, SUB)
    vecs.discard((0,) * ls.W.n)
    counts = {}
    for v in vecs:
        pt = tuple(int(x) for x in normalize_rows(tw, read_points(tw, ls.r, np.array(v))))
        counts[pt] = counts.get(pt, 0) + 1
    return counts


@pytest.mark.parametrize("degree,tz,dim", [(1, False, 1), (2, False, 2), (4, False, 4), (4, True, 3), (2, True, 1)])
def test_domain_basis(degree, tz, dim, gf16):
    basis = domain_basis(gf16, degree, tz)
    assert len(basis) == dim
    span = span_vectors(gf16, np.array(basis)[:, None], SUB)
    for (v,) in span:
        assert gf16.frob(v, degree) == v
        if tz:
            assert gf16.sub_trace(v, degree) == 0


def test_domain_degree_must_divide(gf16):
    with pytest.raises(SpecError):
        domain_basis(gf16, 3)


def test_spec_json_round_trip():
    spec = example_spec(2)
    again = LinearSetSpec.from_json(json.dumps(spec.to_json()))
    assert again == spec
    assert spec.declared_rank == 9


def test_malformed_spec_rejected():
    with pytest.raises(SpecError):
        LinearSetSpec.from_json({"q": 2, "r": 2})


def test_rank_range_and_diagnostic():
    spec = LinearSetSpec(2, 2, 2, (VarSpec("x", 2), VarSpec("y", 2)), ("x", "y"))
    with pytest.raises(SpecError, match="admissible"):
        build_W(spec)
    diag = LinearSetSpec(2, 2, 2, spec.vars, spec.coords, diagnostic=True)
    assert build_W(diag).dim == 4


def test_inconsistent_declared_rank():
    spec = LinearSetSpec(2, 3, 2, (VarSpec("x", 1), VarSpec("y", 1), VarSpec("z", 1)), ("x", "x", "z"))
    with pytest.raises(SpecError, match="declared rank"):
        build_W(spec)


def test_coordinate_count_and_unknown_constraint():
    with pytest.raises(SpecError):
        build_W(LinearSetSpec(2, 2, 2, (VarSpec("x", 1),), ("x",)))
    with pytest.raises(SpecError, match="constraint"):
        build_W(LinearSetSpec(2, 2, 2, (VarSpec("x", 2, ("norm_one",)),), ("x", "x^q"), diagnostic=True))


def test_canonical_subgeometry_points():
    ls = LinearSet.from_spec(canonical_spec(2, 2, 2))
    rep = points_and_weights(ls)
    assert rep.point_count == 3 and rep.spectrum == {1: 3}
    assert rep.vector_identity and rep.minimal


def test_canonical_points_are_the_subgeometry():
    tw = get_tower(3, 1, 2)
    ls = LinearSet.from_spec(canonical_spec(3, 2, 2))
    expected = {tuple(p) for p in projective_points(get_tower(3, 1, 1), 2)}
    assert set(points_and_weights(ls).weights) == expected
    assert ls.rank == 2 and tw.q == 3


@pytest.mark.parametrize("which", [1, 2])
def test_w_star_is_sigma_fixed_with_right_fixed_part(which, example1, example2):
    ls = example1 if which == 1 else example2
    assert sigma_fix_check(ls.W_star, ls.blocks)
    assert ls.blocks.fixed_part(ls.W_star).dim == ls.rank == 9


def test_example1_accounting(example1):
    rep = points_and_weights(example1)
    assert rep.point_count == 511 and rep.spectrum == {1: 511}
    assert rep.vector_identity
    assert sum(2 ** w - 1 for w in rep.weights.values()) == 2**9 - 1
    assert minimality_check(example1, rep)
    bp = block_params(example1)
    assert bp.h == (0,) * 4 and bp.c == 6 and bp.proper and bp.bound_ok


def test_example2_accounting(example2):
    rep = points_and_weights(example2)
    assert rep.point_count == 509 and rep.spectrum == {1: 508, 2: 1}
    assert rep.vector_identity and minimality_check(example2, rep)
    bp = block_params(example2)
    assert bp.c == 6 and bp.proper


def test_weights_match_brute_force(rng):
    tw = get_tower(3, 1, 2)
    for _ in range(3):
        ls = LinearSet.from_spec(random_spec(tw, 3, 3, rng))
        rep = points_and_weights(ls)
        counts = brute_points(ls)
        assert set(counts) == set(rep.weights)
        for pt, n in counts.items():
            assert n == tw.q ** rep.weights[pt] - 1


def test_minimality_fails_for_a_single_heavy_point():
    # W = the field-reduced element of one point, rank t, a single point of weight t
    tw = get_tower(2, 1, 2)
    W = field_reduce(tw, (1, 0)).subspace
    ls = LinearSet(tw, 2, W)
    rep = points_and_weights(ls)
    assert rep.spectrum == {2: 1}
    assert minimality_check(ls, rep) is False


@pytest.mark.parametrize("q,r,t,k", [(2, 2, 2, 2), (3, 3, 2, 4), (2, 3, 3, 5), (2, 2, 3, 3)])
def test_random_specs_have_requested_rank(q, r, t, k, rng):
    tw = get_tower(q, 1, t)
    for _ in range(3):
        spec = random_spec(tw, r, k, rng)
        assert build_W(spec).dim == k


def test_block_params_t2_relation(rng):
    tw = get_tower(2, 1, 2)
    for _ in range(10):
        ls = LinearSet.from_spec(random_spec(tw, 3, int(rng.integers(3, 5)), rng))
        bp = block_params(ls)
        if bp.proper:
            assert bp.h[0] == ls.rank - ls.r and bp.bound_ok
        assert bp.c == ls.r - bp.h[0]


def test_subspace_given_directly():
    tw = get_tower(2, 1, 2)
    W = rref(tw, np.array([[1, 0, 0, 0], [0, 0, 1, 0]]), SUB)
    ls = LinearSet(tw, 2, W)
    assert points_and_weights(ls).point_count == 3
