"""Desarguesian spreads, the Frobenius collineation sigma and the map alpha.

Two coordinate systems are used for the same GF(q)-space of dimension rt:

* *reduced* coordinates: GF(q)^{rt} with index ``j*t + k`` holding the k-th
  coefficient of x_j in the basis (1, xi, ..., xi^(t-1)) of GF(q^t);
* *fixed* coordinates: the subgeometry Fix(sigma) of GF(q^t)^{rt}, made of
  vectors (x, x^q, ..., x^(q^(t-1))) split in t blocks of length r.

:func:`to_fixed` is the GF(q)-linear bijection between them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exterior import IndexTable, PluckerVector, is_decomposable, outer_rows, plucker, wedge
from .gf import SUB, TOP, ENUMERATION_CAP, EnumerationCapError, FieldTower
from .linalg import SubspaceBasis, annihilator, matmul, nullspace, rank, rref, span_vectors


# --------------------------------------------------------------------------
# points of PG(r-1, q^t)
# --------------------------------------------------------------------------


def normalize_rows(tower: FieldTower, X) -> np.ndarray:
    """Scale every nonzero row so its first nonzero entry is 1."""
    X = np.asarray(X, dtype=np.int64)
    if X.ndim == 1:
        return normalize_rows(tower, X[None, :])[0]
    nz = X != 0
    if not nz.any(axis=1).all():
        raise ValueError("zero vector is not a projective point")
    lead = X[np.arange(len(X)), nz.argmax(axis=1)]
    return tower.vmul(X, tower.vinv(lead)[:, None])


def projective_points(tower: FieldTower, r: int, cap: int = ENUMERATION_CAP) -> np.ndarray:
    """Canonical representatives of PG(r-1, q^t): leading entry 1, ordered by
    leading position then lexicographically."""
    Q = tower.order
    total = (Q**r - 1) // (Q - 1)
    if total > cap:
        raise EnumerationCapError(f"PG({r - 1},{Q}) has {total} points, over the cap {cap}")
    out = []
    for lead in range(r):
        tail = r - lead - 1
        grid = np.indices((Q,) * tail).reshape(tail, -1).T if tail else np.zeros((1, 0), dtype=np.int64)
        block = np.zeros((grid.shape[0], r), dtype=np.int64)
        block[:, lead] = 1
        block[:, lead + 1 :] = grid
        out.append(block)
    return np.vstack(out)


# --------------------------------------------------------------------------
# reduced <-> fixed coordinates
# --------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _xi_powers(tower: FieldTower) -> np.ndarray:
    return np.array([tower.pow(tower.xi, k) for k in range(tower.t)], dtype=np.int64)


def read_points(tower: FieldTower, r: int, C) -> np.ndarray:
    """Reduced coordinates (... x rt) to the vectors of GF(q^t)^r they expand."""
    C = np.asarray(C, dtype=np.int64)
    t = tower.t
    C = C.reshape(C.shape[:-1] + (r, t))
    out = np.zeros(C.shape[:-1], dtype=np.int64)
    for k, xk in enumerate(_xi_powers(tower)):
        out = tower.vadd(out, tower.vmul(C[..., k], xk))
    return out


def reduce_points(tower: FieldTower, X) -> np.ndarray:
    """Inverse of :func:`read_points`: GF(q^t)^r vectors to reduced coordinates."""
    X = np.asarray(X, dtype=np.int64)
    E = tower.vexpand(X)
    return E.reshape(X.shape[:-1] + (X.shape[-1] * tower.t,))


def lift(tower: FieldTower, X) -> np.ndarray:
    """(x) -> (x, x^q, ..., x^(q^(t-1))) for rows of GF(q^t)^r."""
    X = np.asarray(X, dtype=np.int64)
    return np.concatenate([tower.vfrob(X, i) for i in range(tower.t)], axis=-1)


def to_fixed(tower: FieldTower, r: int, C) -> np.ndarray:
    """Reduced coordinates to fixed coordinates."""
    return lift(tower, read_points(tower, r, C))


# --------------------------------------------------------------------------
# blocks and sigma
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BlockDecomposition:
    """GF(q^t)^{rt} = U_0 + ... + U_{t-1} with U_i on coordinates ir .. (i+1)r-1."""

    tower: FieldTower
    r: int

    @property
    def t(self) -> int:
        return self.tower.t

    @property
    def n(self) -> int:
        return self.r * self.t

    def block(self, i: int) -> SubspaceBasis:
        E = np.zeros((self.r, self.n), dtype=np.int64)
        for j in range(self.r):
            E[j, i * self.r + j] = 1
        return rref(self.tower, E, TOP, self.n)

    def blocks(self) -> list[SubspaceBasis]:
        return [self.block(i) for i in range(self.t)]

    def sigma(self, V) -> np.ndarray:
        """(x0, ..., x_{t-1}) -> (x_{t-1}^q, x0^q, ..., x_{t-2}^q), row-wise."""
        V = np.asarray(V, dtype=np.int64)
        r = self.r
        shifted = np.roll(V, r, axis=-1)
        return self.tower.vfrob(shifted, 1)

    def sigma_space(self, w: SubspaceBasis) -> SubspaceBasis:
        return rref(self.tower, self.sigma(w.rows), w.level, w.n)

    def fixed_part(self, w: SubspaceBasis) -> SubspaceBasis:
        """``w`` meet Fix(sigma), as a GF(q)-subspace in reduced coordinates."""
        tw, n, t = self.tower, self.n, self.t
        H = annihilator(w).rows
        if H.shape[0] == 0:
            return rref(tw, np.eye(n, dtype=np.int64), SUB)
        images = to_fixed(tw, self.r, np.eye(n, dtype=np.int64))  # row (j,k) = T(e_(j,k))
        vals = matmul(tw, images, H.T)  # (n, h) over GF(q^t)
        L = tw.vexpand(vals).reshape(n, -1)  # GF(q)-linear conditions
        return rref(tw, nullspace(tw, L.T, n), SUB, n)


def sigma_fix_check(w: SubspaceBasis, blocks: BlockDecomposition) -> bool:
    """Whether sigma(w) = w; when it is, w meets Fix(sigma) in the same dimension."""
    if w.level != TOP:
        raise ValueError("sigma acts on GF(q^t)-subspaces")
    if blocks.sigma_space(w) != w:
        return False
    if blocks.fixed_part(w).dim != w.dim:
        raise AssertionError("sigma-fixed subspace meets the subgeometry in the wrong dimension")
    return True


# --------------------------------------------------------------------------
# spread elements
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SpreadElement:
    point: tuple[int, ...]
    subspace: SubspaceBasis

    def __eq__(self, other):
        return isinstance(other, SpreadElement) and self.point == other.point and self.subspace == other.subspace

    def __hash__(self):
        return hash((self.point, self.subspace))

    def to_json(self) -> dict:
        tw = self.subspace.tower
        return {"point": [tw.coeffs(x) for x in self.point], "subspace": self.subspace.to_json()}


def field_reduce(tower: FieldTower, x) -> SpreadElement:
    """The t-dimensional GF(q)-subspace {lambda x} of GF(q)^{rt}."""
    x = np.asarray(x, dtype=np.int64)
    if not x.any():
        raise ValueError("zero vector is not a projective point")
    x = normalize_rows(tower, x)
    rows = reduce_points(tower, tower.vmul(_xi_powers(tower)[:, None], x[None, :]))
    return SpreadElement(tuple(int(v) for v in x), rref(tower, rows, SUB))


def desarguesian_spread(tower: FieldTower, r: int, cap: int = ENUMERATION_CAP) -> list[SpreadElement]:
    return [field_reduce(tower, x) for x in projective_points(tower, r, cap)]


def segre_element(tower: FieldTower, x) -> SubspaceBasis:
    """<u, u^sigma, ..., u^sigma^(t-1)> meet Fix(sigma), in reduced coordinates.

    Independent of :func:`field_reduce`; the two must agree.
    """
    x = normalize_rows(tower, np.asarray(x, dtype=np.int64))
    r, t = len(x), tower.t
    bd = BlockDecomposition(tower, r)
    u = np.zeros(r * t, dtype=np.int64)
    u[:r] = x
    rows = [u]
    for _ in range(t - 1):
        rows.append(bd.sigma(rows[-1]))
    star = rref(tower, np.array(rows), TOP)
    if not sigma_fix_check(star, bd):
        raise AssertionError("scroll element is not sigma-invariant")
    return bd.fixed_part(star)


def partition_check(spread: list[SpreadElement]) -> bool:
    """Pairwise disjoint elements whose points cover PG(rt-1, q)."""
    if not spread:
        return False
    tw = spread[0].subspace.tower
    n = spread[0].subspace.n
    seen: set[tuple[int, ...]] = set()
    total = 0
    for elt in spread:
        pts = span_vectors(tw, elt.subspace.rows, SUB)
        pts.discard((0,) * n)
        total += len(pts)
        if seen & pts:
            return False
        seen |= pts
    return total == tw.q**n - 1


# --------------------------------------------------------------------------
# alpha and the Plücker embedding of spread elements
# --------------------------------------------------------------------------


def function_table(r: int, t: int) -> np.ndarray:
    """All f: range(t) -> range(r) as rows (f(0), ..., f(t-1)), lexicographic."""
    return np.indices((r,) * t).reshape(t, -1).T


def alpha_rows(tower: FieldTower, X) -> np.ndarray:
    """Unscaled ``prod_i x_{f(i)}^(q^i)`` for each row x of ``X``."""
    X = np.asarray(X, dtype=np.int64)
    if X.ndim == 1:
        X = X[None, :]
    return outer_rows(tower, [tower.vfrob(X, i) for i in range(tower.t)])


def alpha(tower: FieldTower, x) -> np.ndarray:
    """Canonically scaled image of the point x of PG(r-1, q^t) in PG(r^t - 1, q^t)."""
    x = np.asarray(x, dtype=np.int64)
    if not x.any():
        raise ValueError("zero vector is not a projective point")
    return normalize_rows(tower, alpha_rows(tower, x))[0]


def block_subset_indices(r: int, t: int) -> np.ndarray:
    """Index in the t-subsets of range(rt) of {f(0), r + f(1), ..., (t-1)r + f(t-1)}, per f."""
    table = IndexTable.get(r * t, t)
    F = function_table(r, t)
    return np.array([table.lookup(f + r * np.arange(t)) for f in F], dtype=np.int64)


def spread_plucker(tower: FieldTower, x) -> PluckerVector:
    """Plücker vector over GF(q^t) of the span of the field-reduced element of x,
    carried into fixed coordinates."""
    elt = field_reduce(tower, x)
    r = len(elt.point)
    return plucker(rref(tower, to_fixed(tower, r, elt.subspace.rows), TOP))


@lru_cache(maxsize=None)
def sign_pattern(tower: FieldTower, r: int) -> tuple[int, ...]:
    """Per-f ratio between the Plücker coordinate and alpha, taken at x = (1, ..., 1)."""
    ones = np.ones(r, dtype=np.int64)
    pv = spread_plucker(tower, ones).coords[block_subset_indices(r, tower.t)]
    a = alpha(tower, ones)
    return tuple(tower.div(int(p), int(v)) for p, v in zip(pv, a))


def commutation_check(tower: FieldTower, x) -> bool:
    """Plücker coordinates of the spread element of x sit on one-index-per-block
    subsets and match alpha(x) up to the fixed sign pattern."""
    r = len(x)
    pv = spread_plucker(tower, x).coords
    idx = block_subset_indices(r, tower.t)
    off = np.ones(len(pv), dtype=bool)
    off[idx] = False
    if pv[off].any():
        return False
    expected = normalize_rows(tower, tower.vmul(alpha(tower, x), np.array(sign_pattern(tower, r))))
    return bool((normalize_rows(tower, pv[idx]) == expected).all())


def alpha_plucker(tower: FieldTower, x) -> PluckerVector:
    """alpha(x) re-embedded in the t-th exterior power of GF(q^t)^{rt}."""
    r, t = len(x), tower.t
    coords = np.zeros(math.comb(r * t, t), dtype=np.int64)
    coords[block_subset_indices(r, t)] = tower.vmul(alpha(tower, x), np.array(sign_pattern(tower, r)))
    return PluckerVector(tower, r * t, t, coords)


def alpha_decomposable(tower: FieldTower, x) -> bool:
    return is_decomposable(alpha_plucker(tower, x))[0]


def sigma_dagger(tower: FieldTower, r: int, T) -> np.ndarray:
    """Induced action on U_0 (x) ... (x) U_{t-1}: new[f] = old[f shifted left]^q."""
    T = np.asarray(T, dtype=np.int64)
    t = tower.t
    F = function_table(r, t)
    shifted = np.roll(F, -1, axis=1)
    weights = r ** np.arange(t - 1, -1, -1)
    src = shifted @ weights
    return tower.vfrob(T[..., src], 1)


def span_rank(tower: FieldTower, r: int, cap: int = ENUMERATION_CAP) -> int:
    """Rank of the alpha images of every point of PG(r-1, q^t)."""
    return rank(tower, alpha_rows(tower, projective_points(tower, r, cap)))


def rank_one_check(elt: SpreadElement, subgeometry: bool = True) -> bool:
    """Every nonzero vector of the element, reshaped to the r x t matrix of its
    expansion coefficients, has rank 1 (lies on the Segre variety)."""
    tw = elt.subspace.tower
    if subgeometry and not all(tw.in_subfield(v) for v in elt.point):
        raise ValueError("point is not in the canonical subgeometry")
    r = len(elt.point)
    for v in span_vectors(tw, elt.subspace.rows, SUB):
        if not any(v):
            continue
        if rank(tw, np.array(v, dtype=np.int64).reshape(r, tw.t), method="table") != 1:
            return False
    return True
