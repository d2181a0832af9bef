"""Exterior powers in k-subset coordinates.

Plücker vectors and wedges live here, together with the Hodge-dual forms
used to cut out Schubert varieties.

Coordinates of the k-th exterior power of F^n are indexed by the k-subsets
of ``range(n)`` in lexicographic order.  A Plücker vector is stored raw;
:meth:`PluckerVector.canonical` scales its first nonzero coordinate to 1.
"""

from __future__ import annotations

import functools
import itertools
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .gf import TOP, FieldTower
from .linalg import SubspaceBasis, nullspace, rref

# binom(24, 4); larger tables are never written to disk
DISK_CACHE_LIMIT = 10626


def _perm_parity(perm) -> int:
    perm = list(perm)
    parity = 0
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                parity ^= 1
    return parity


@functools.lru_cache(maxsize=None)
def signed_permutations(k: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    return tuple((perm, _perm_parity(perm)) for perm in itertools.permutations(range(k)))


class IndexTable:
    """All k-subsets of ``range(n)`` in lexicographic order, with inverse lookup."""

    def __init__(self, n: int, k: int, subsets: np.ndarray | None = None):
        if not 0 <= k <= n:
            raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
        self.n, self.k = n, k
        if subsets is None:
            subsets = np.array(list(itertools.combinations(range(n), k)), dtype=np.int64).reshape(math.comb(n, k), k)
        subsets.setflags(write=False)
        self.subsets = subsets
        self._lookup = None

    def __len__(self):
        return self.subsets.shape[0]

    def lookup(self, subset) -> int:
        if self._lookup is None:
            self._lookup = {tuple(int(x) for x in s): i for i, s in enumerate(self.subsets)}
        return self._lookup[tuple(sorted(int(x) for x in subset))]

    @staticmethod
    def validate(n: int, k: int, subsets: np.ndarray) -> bool:
        """True iff ``subsets`` is exactly the lexicographic list of k-subsets of range(n)."""
        if subsets.shape != (math.comb(n, k), k):
            return False
        if k == 0 or len(subsets) == 0:
            return True
        if subsets.min() < 0 or subsets.max() >= n:
            return False
        if k > 1 and not (np.diff(subsets, axis=1) > 0).all():
            return False
        # strictly increasing rows in lexicographic order: compare as base-n numbers
        weights = n ** np.arange(k - 1, -1, -1, dtype=np.int64)
        keys = subsets @ weights
        return bool((np.diff(keys) > 0).all())

    @classmethod
    def get(cls, n: int, k: int) -> "IndexTable":
        return _cached_table(n, k)


def _cache_dir() -> Path | None:
    d = os.environ.get("FINGEO_CACHE_DIR")
    return Path(d) if d else None


@functools.lru_cache(maxsize=None)
def _cached_table(n: int, k: int) -> IndexTable:
    d = _cache_dir()
    size = math.comb(n, k)
    if d is None or size > DISK_CACHE_LIMIT:
        return IndexTable(n, k)
    path = d / f"subsets_n{n}_k{k}.npy"
    if path.exists():
        try:
            arr = np.load(path, allow_pickle=False).astype(np.int64)
            if IndexTable.validate(n, k, arr):
                return IndexTable(n, k, arr)
        except (OSError, ValueError):
            pass
    table = IndexTable(n, k)
    try:
        d.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=d, suffix=".npy")
        with os.fdopen(fd, "wb") as fh:
            np.save(fh, table.subsets)
        os.replace(tmp, path)
    except OSError:
        pass
    return table


@dataclass(frozen=True, eq=False)
class PluckerVector:
    """A vector of the k-th exterior power of F^n in subset coordinates."""

    tower: FieldTower
    n: int
    k: int
    coords: np.ndarray
    level: str = TOP

    @property
    def table(self) -> IndexTable:
        return IndexTable.get(self.n, self.k)

    def is_zero(self) -> bool:
        return not self.coords.any()

    def canonical(self) -> "PluckerVector":
        nz = np.flatnonzero(self.coords)
        if nz.size == 0:
            return self
        lead = int(self.coords[nz[0]])
        c = self.tower.vmul(self.coords, self.tower.inv(lead)) if lead != 1 else self.coords
        return PluckerVector(self.tower, self.n, self.k, c, self.level)

    def proportional(self, other: "PluckerVector") -> bool:
        a, b = self.canonical(), other.canonical()
        return a.n == b.n and a.k == b.k and bool((a.coords == b.coords).all())

    def __eq__(self, other):
        if not isinstance(other, PluckerVector):
            return NotImplemented
        return (self.tower, self.n, self.k) == (other.tower, other.n, other.k) and bool((self.coords == other.coords).all())

    def __hash__(self):
        return hash((self.tower, self.n, self.k, self.coords.tobytes()))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "field": self.tower.to_config(),
            "coordinates": [self.tower.coeffs(int(x)) for x in self.coords],
        }


# --------------------------------------------------------------------------
# minors and wedges
# --------------------------------------------------------------------------


def batch_det(tower: FieldTower, mats) -> np.ndarray:
    """Determinants of a stack of k x k matrices by simultaneous elimination."""
    A = np.array(mats, dtype=np.int64)
    N, k = A.shape[0], A.shape[1]
    det = np.ones(N, dtype=np.int64)
    alive = np.ones(N, dtype=bool)
    idx = np.arange(N)
    for col in range(k):
        nz = A[:, col:, col] != 0
        has = nz.any(axis=1)
        alive &= has
        piv = col + nz.argmax(axis=1)
        swap = has & (piv != col)
        if swap.any():
            rows_p = A[idx[swap], piv[swap]].copy()
            A[idx[swap], piv[swap]] = A[idx[swap], col]
            A[idx[swap], col] = rows_p
            det[swap] = tower.vneg(det[swap])
        p = np.where(has, A[:, col, col], 1)
        det = tower.vmul(det, np.where(alive, p, 0))
        if col + 1 < k:
            f = tower.vmul(A[:, col + 1 :, col], tower.vinv(p)[:, None])  # (N, rows below)
            A[:, col + 1 :, :] = tower.vsub(A[:, col + 1 :, :], tower.vmul(f[:, :, None], A[:, col, None, :]))
    return np.where(alive, det, 0)


def minors(tower: FieldTower, B, subsets: np.ndarray) -> np.ndarray:
    """All k x k minors of the k x n matrix ``B`` on the given column subsets."""
    B = np.asarray(B, dtype=np.int64)
    k = B.shape[0]
    N = subsets.shape[0]
    if k == 0:
        return np.ones(N, dtype=np.int64)
    if k > 4:
        return batch_det(tower, np.transpose(B[:, subsets], (1, 0, 2)))
    out = np.zeros(N, dtype=np.int64)
    for perm, odd in signed_permutations(k):
        term = B[0, subsets[:, perm[0]]]
        for l in range(1, k):
            term = tower.vmul(term, B[l, subsets[:, perm[l]]])
        out = tower.vsub(out, term) if odd else tower.vadd(out, term)
    return out


def wedge(tower: FieldTower, vectors) -> PluckerVector:
    """v_1 ^ ... ^ v_k, unscaled; the zero vector iff the inputs are dependent."""
    V = np.asarray(vectors, dtype=np.int64)
    k, n = V.shape
    return PluckerVector(tower, n, k, minors(tower, V, IndexTable.get(n, k).subsets))


def plucker(w: SubspaceBasis) -> PluckerVector:
    """Canonically scaled Plücker coordinates of ``w``."""
    if w.dim == 0:
        raise ValueError("Plücker coordinates of the zero subspace")
    v = wedge(w.tower, w.rows)
    return PluckerVector(w.tower, v.n, v.k, v.coords, w.level).canonical()


def wedge_products(tower: FieldTower, blocks, n: int) -> np.ndarray:
    """Rows ``b_0[j_0] ^ ... ^ b_{t-1}[j_{t-1}]`` for every choice of one row per block.

    Row order is lexicographic in ``(j_0, ..., j_{t-1})``; columns are the
    t-subsets of ``range(n)``.
    """
    blocks = [np.asarray(b, dtype=np.int64) for b in blocks]
    t = len(blocks)
    subsets = IndexTable.get(n, t).subsets
    rows = math.prod(b.shape[0] for b in blocks)
    out = np.zeros((rows, subsets.shape[0]), dtype=np.int64)
    for perm, odd in signed_permutations(t):
        term = blocks[0][:, subsets[:, perm[0]]]
        for l in range(1, t):
            nxt = blocks[l][:, subsets[:, perm[l]]]
            term = tower.vmul(term[:, None, :], nxt[None, :, :]).reshape(-1, subsets.shape[0])
        out = tower.vsub(out, term) if odd else tower.vadd(out, term)
    return out


def outer_rows(tower: FieldTower, factors) -> np.ndarray:
    """Row-wise tensor product: ``out[b, (i_0, ..., i_{t-1})] = prod_l factors[l][b, i_l]``.

    The multi-index is flattened lexicographically with ``i_0`` most significant.
    """
    out = np.asarray(factors[0], dtype=np.int64)
    for F in factors[1:]:
        F = np.asarray(F, dtype=np.int64)
        out = tower.vmul(out[:, :, None], F[:, None, :]).reshape(out.shape[0], -1)
    return out


# --------------------------------------------------------------------------
# forms
# --------------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def complementary_subsets(n: int, k: int) -> np.ndarray:
    """Row i is the complement of the i-th k-subset of range(n)."""
    subsets = IndexTable.get(n, k).subsets
    mask = np.ones((len(subsets), n), dtype=bool)
    mask[np.arange(len(subsets))[:, None], subsets] = False
    out = np.nonzero(mask)[1].reshape(len(subsets), n - k)
    out.setflags(write=False)
    return out


def hodge_form(c: SubspaceBasis, k: int) -> np.ndarray:
    """Coefficients of ``x_1 ^ ... ^ x_k -> x_1 ^ ... ^ x_k ^ c_1 ^ ... ^ c_{n-k}`` on k-subsets.

    The value on ``plucker``-coordinates is the n x n determinant of the
    stacked bases, by Laplace expansion along the first k rows.
    """
    n = c.n
    if c.dim != n - k:
        raise ValueError(f"hodge_form needs an (n-k)-dimensional subspace, got dim {c.dim} with n={n}, k={k}")
    tw = c.tower
    subsets = IndexTable.get(n, k).subsets
    vals = minors(tw, c.rows, complementary_subsets(n, k))
    parity = (subsets.sum(axis=1) - k * (k - 1) // 2) % 2
    return np.where(parity == 1, tw.vneg(vals), vals)


def evaluate(tower: FieldTower, form, vec) -> int:
    """Pairing of a form with a vector in the same subset coordinates."""
    form, vec = np.asarray(form, dtype=np.int64), np.asarray(vec, dtype=np.int64)
    return int(tower.vsum(tower.vmul(form, vec)))


def _insertion_matrix(tower: FieldTower, coords, n: int, k: int, dual: bool) -> np.ndarray:
    """Matrix of ``x -> x ^ v`` (dual=False, v in degree k) or of the contraction
    ``x -> f(x ^ .)`` (dual=True, f a form on degree k)."""
    coords = np.asarray(coords, dtype=np.int64)
    src = IndexTable.get(n, k if not dual else k - 1)
    dst = IndexTable.get(n, k + 1 if not dual else k)
    out = np.zeros((n, len(src)), dtype=np.int64) if dual else np.zeros((n, len(dst)), dtype=np.int64)
    for s_idx, s in enumerate(src.subsets):
        sset = set(int(x) for x in s)
        for i in range(n):
            if i in sset:
                continue
            sign = sum(1 for x in sset if x < i) % 2
            merged = dst.lookup(sset | {i})
            if dual:
                val = int(coords[merged])
                out[i, s_idx] = tower.neg(val) if sign else val
            else:
                val = int(coords[s_idx])
                if val:
                    val = tower.neg(val) if sign else val
                    out[i, merged] = tower.add(int(out[i, merged]), val)
    return out


def form_kernel(tower: FieldTower, form, n: int, k: int) -> SubspaceBasis:
    """``{x : f(x, v_2, ..., v_k) = 0 for all v}`` for the alternating form with coefficients ``form``."""
    if k == 0:
        raise ValueError("kernel of a 0-form")
    M = _insertion_matrix(tower, form, n, k, dual=True)
    return rref(tower, nullspace(tower, M.T, n), TOP, n)


def wedge_kernel(v: PluckerVector) -> SubspaceBasis:
    """``{x in F^n : x ^ v = 0}``."""
    if v.k == v.n:
        return rref(v.tower, np.eye(v.n, dtype=np.int64), v.level, v.n)
    M = _insertion_matrix(v.tower, v.coords, v.n, v.k, dual=False)
    return rref(v.tower, nullspace(v.tower, M.T, v.n), v.level, v.n)


def is_decomposable(v: PluckerVector) -> tuple[bool, SubspaceBasis | None]:
    """Whether ``v`` is a pure wedge; the witness is the subspace it represents."""
    if v.is_zero():
        raise ValueError("decomposability of the zero vector")
    K = wedge_kernel(v)
    if K.dim != v.k:
        return False, None
    if not plucker(K).proportional(v):
        raise AssertionError("wedge kernel of the right dimension does not reproduce the vector")
    return True, K
