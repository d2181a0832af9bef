from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import poly_mulmod
from fingeo.gf import (
    SUB,
    TOP,
    EnumerationCapError,
    FieldElement,
    FieldTower,
    TowerMismatchError,
    arith,
    enumerate_field,
    frobenius,
    get_tower,
    is_irreducible,
    least_irreducible,
    norm,
    trace,
)

SMALL = [(2, 1, 2), (2, 1, 4), (2, 2, 2), (3, 1, 2), (3, 2, 2), (2, 2, 4), (5, 1, 2), (2, 1, 3)]


def towers(limit=256):
    return [get_tower(*k) for k in SMALL if k[0] ** (k[1] * k[2]) <= limit]


# ---- the worked GF(4) values ---------------------------------------------


def test_gf4_omega_squared(gf4):
    w = gf4.element(2)
    assert (w * w).value == 3  # omega + 1
    assert poly_mulmod([0, 1], [0, 1], list(gf4.modulus), 2) == gf4.coeffs(3)


def test_gf4_omega_cubed_by_repeated_multiplication(gf4):
    acc = [1, 0]
    for _ in range(3):
        acc = poly_mulmod(acc, [0, 1], list(gf4.modulus), 2)
    assert acc == [1, 0]
    assert arith(gf4.element(2), 3, "pow").value == 1


def test_gf4_frobenius_is_squaring(gf4):
    w = gf4.element(2)
    sq = poly_mulmod([0, 1], [0, 1], list(gf4.modulus), 2)
    assert frobenius(w, 1).coeffs == sq == [1, 1]


def test_gf4_trace_and_norm(gf4):
    w = gf4.element(2)
    assert trace(w).value == 1 and trace(w).level == SUB
    assert norm(w).value == 1 and norm(w).level == SUB


def test_trace_norm_of_zero(gf16):
    assert gf16.trace(0) == 0 and gf16.norm(0) == 0


# ---- arithmetic contract --------------------------------------------------


@pytest.mark.parametrize("tw", towers(), ids=repr)
def test_inverse_every_nonzero(tw):
    for a in range(1, tw.order):
        assert tw.mul(a, tw.inv(a)) == 1


def test_inverse_of_zero_raises(gf16):
    with pytest.raises(ZeroDivisionError):
        gf16.inv(0)
    with pytest.raises(ZeroDivisionError):
        arith(gf16.element(0), None, "inv")


def test_mixed_towers_rejected(gf4, gf16):
    with pytest.raises(TowerMismatchError):
        gf4.element(1) + gf16.element(1)


def test_level_tag_is_weakest(gf16):
    one = gf16.element(1, SUB)
    x = gf16.element(gf16.xi)
    assert (one + one).level == SUB
    assert (one * x).level == TOP
    with pytest.raises(ValueError):
        FieldElement(gf16, gf16.xi, SUB)


@pytest.mark.parametrize("tw", towers(), ids=repr)
def test_generic_table_packed_identical(tw):
    a, b = np.meshgrid(np.arange(tw.order), np.arange(tw.order))
    a, b = a.ravel(), b.ravel()
    table = tw.vmul(a, b)
    generic = np.array([tw.mul_generic(int(x), int(y)) for x, y in zip(a, b)])
    assert (table == generic).all()
    if tw.p == 2:
        packed = np.array([tw.mul_packed(int(x), int(y)) for x, y in zip(a, b)])
        assert (packed == generic).all()


@pytest.mark.parametrize("tw", towers(), ids=repr)
def test_generic_matches_schoolbook_oracle(tw):
    mod = list(tw.modulus)
    rng = np.random.default_rng(tw.order)
    for a, b in rng.integers(0, tw.order, size=(200, 2)):
        assert tw.coeffs(tw.mul(int(a), int(b))) == poly_mulmod(tw.coeffs(int(a)), tw.coeffs(int(b)), mod, tw.p)


# ---- Frobenius, trace, norm invariants (exhaustive) -----------------------


@pytest.mark.parametrize("tw", towers(), ids=repr)
def test_frobenius_is_an_automorphism_of_order_t(tw):
    a, b = np.meshgrid(np.arange(tw.order), np.arange(tw.order))
    fa, fb = tw.vfrob(a, 1), tw.vfrob(b, 1)
    assert (tw.vfrob(tw.vadd(a, b), 1) == tw.vadd(fa, fb)).all()
    assert (tw.vfrob(tw.vmul(a, b), 1) == tw.vmul(fa, fb)).all()
    x = np.arange(tw.order)
    assert (tw.vfrob(tw.vfrob(x, 1), tw.t - 1) == x).all()
    assert (tw.vfrob(x, tw.t) == x).all()


@pytest.mark.parametrize("tw", towers(), ids=repr)
def test_trace_and_norm_land_in_subfield(tw):
    for a in range(tw.order):
        assert tw.frob(tw.trace(a)) == tw.trace(a)
        assert tw.frob(tw.norm(a)) == tw.norm(a)
        assert tw.in_subfield(tw.trace(a))


@pytest.mark.parametrize("tw", towers(), ids=repr)
def test_exactly_q_fixed_points(tw):
    fixed = [a for a in range(tw.order) if tw.frob(a) == a]
    assert len(fixed) == tw.q
    assert fixed == tw.subfield_elements()


@pytest.mark.parametrize("tw", [t for t in towers() if t.q <= 16 and t.e > 1], ids=repr)
def test_subfield_embedding_is_a_homomorphism(tw):
    # GF(q) = GF(p)[b]/(sub_modulus): compare with arithmetic in that quotient
    sub = list(tw.sub_modulus)
    cs = list(itertools.product(range(tw.p), repeat=tw.e))
    images = {c: tw.embed(c) for c in cs}
    assert len(set(images.values())) == tw.q
    assert images[(0,) * tw.e] == 0 and images[(1,) + (0,) * (tw.e - 1)] == 1
    for a in cs:
        for b in cs:
            s = tuple((x + y) % tw.p for x, y in zip(a, b))
            assert tw.add(images[a], images[b]) == images[s]
            m = tuple(poly_mulmod(list(a), list(b), sub, tw.p))
            assert tw.mul(images[a], images[b]) == images[m]


# ---- moduli --------------------------------------------------------------


def _reducible_brute(m, p):
    d = len(m) - 1
    for k in range(1, d // 2 + 1):
        for low in itertools.product(range(p), repeat=k):
            f = list(low) + [1]
            # divide m by f
            r = list(m)
            for i in range(d - k, -1, -1):
                c = r[i + k]
                for j in range(k + 1):
                    r[i + j] = (r[i + j] - c * f[j]) % p
            if not any(r[:k]):
                return True
    return False


@pytest.mark.parametrize("p,d", [(2, 2), (2, 3), (2, 4), (2, 8), (3, 2), (3, 4), (5, 2)])
def test_least_irreducible_is_lex_least(p, d):
    m = least_irreducible(p, d)
    assert not _reducible_brute(m, p) and is_irreducible(m, p)
    key = sum(c * p**i for i, c in enumerate(m[:-1]))
    for k in range(key):
        low = [(k // p**i) % p for i in range(d)]
        assert _reducible_brute(low + [1], p)


def test_configured_modulus_round_trip():
    tw = get_tower(2, 1, 4, modulus=(1, 0, 0, 1, 1))
    assert tw.modulus == (1, 0, 0, 1, 1)
    assert FieldTower.from_config(tw.to_config()) == tw
    with pytest.raises(ValueError):
        get_tower(2, 1, 4, modulus=(1, 0, 1, 0, 1))  # (x^2+x+1)^2


# ---- enumeration ----------------------------------------------------------


def test_enumerate_gf2(gf2):
    assert [e.value for e in enumerate_field(gf2)] == [0, 1]


def test_enumerate_gf4(gf4):
    vals = [e.value for e in enumerate_field(gf4)]
    assert len(vals) == len(set(vals)) == 4


def test_enumerate_tower_subfield():
    tw = get_tower(2, 2, 2)
    top = list(enumerate_field(tw, TOP))
    assert len(top) == 16
    assert sum(1 for e in top if tw.frob(e.value) == e.value) == 4
    sub = list(enumerate_field(tw, SUB))
    assert {e.value for e in sub} == {e.value for e in top if tw.frob(e.value) == e.value}


def test_enumeration_order_is_lexicographic(gf16):
    coeffs = [e.coeffs for e in enumerate_field(gf16)]
    assert coeffs == sorted(coeffs)


def test_enumeration_cap(gf16):
    with pytest.raises(EnumerationCapError):
        list(enumerate_field(gf16, TOP, cap=8))


# ---- property tests ---------------------------------------------------------


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 80), st.integers(0, 80), st.integers(0, 80))
def test_field_axioms_gf81(a, b, c):
    tw = get_tower(3, 1, 4)
    assert tw.mul(a, tw.add(b, c)) == tw.add(tw.mul(a, b), tw.mul(a, c))
    assert tw.mul(tw.mul(a, b), c) == tw.mul(a, tw.mul(b, c))
    assert tw.add(a, tw.neg(a)) == 0
    assert tw.sub(tw.add(a, b), b) == a


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 255), st.integers(-20, 20))
def test_pow_matches_repeated_multiplication(a, n):
    tw = get_tower(2, 2, 4)
    acc = 1
    base = a if n >= 0 else tw.inv(a)
    for _ in range(abs(n)):
        acc = tw.mul_generic(acc, base)
    assert tw.pow(a, n) == acc
