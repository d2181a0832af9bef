"""Exact dense linear algebra over a level of a :class:`~fingeo.gf.FieldTower`.

Matrices are numpy ``int64`` arrays of element encodings.  Subspaces are
stored by their row space in reduced row echelon form, so two
:class:`SubspaceBasis` values are equal exactly when their matrices are.

Linear algebra over GF(q) runs on the embedded copy inside GF(q^t): row
reduction of a matrix with GF(q) entries never leaves GF(q), so ranks,
kernels and same-level meets agree with the computation done over GF(q).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .gf import SUB, TOP, EnumerationCapError, FieldTower, ENUMERATION_CAP


def _as_matrix(M, n: int | None = None) -> np.ndarray:
    A = np.array(M, dtype=np.int64)
    if A.ndim == 1:
        A = A.reshape(1, -1) if A.size else np.zeros((0, n or 0), dtype=np.int64)
    if A.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    return A


# --------------------------------------------------------------------------
# elimination kernels
# --------------------------------------------------------------------------


def row_reduce(tower: FieldTower, M, full: bool = True, stop_at: int | None = None):
    """Gaussian elimination with the table kernel.

    Returns ``(R, pivots)``.  With ``full`` the rows of ``R`` are the reduced
    row echelon form; otherwise only an echelon form (enough for rank).
    Elimination stops early once ``stop_at`` pivots are found.
    """
    A = _as_matrix(M).copy()
    m, n = A.shape
    pivots: list[int] = []
    r = 0
    for col in range(n):
        if r == m or (stop_at is not None and r >= stop_at):
            break
        nz = np.flatnonzero(A[r:, col])
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            A[[r, pr]] = A[[pr, r]]
        piv = int(A[r, col])
        if piv != 1:
            A[r, col:] = tower.vmul(A[r, col:], tower.inv(piv))
        if full:
            rows = np.flatnonzero(A[:, col])
            rows = rows[rows != r]
        else:
            rows = r + 1 + np.flatnonzero(A[r + 1 :, col])
        if rows.size:
            f = A[rows, col]
            A[rows, col:] = tower.vsub(A[rows, col:], tower.vmul(f[:, None], A[r, col:][None, :]))
        pivots.append(col)
        r += 1
    return A[:r], pivots


def _mul_bit_matrices(tower: FieldTower) -> np.ndarray:
    """``out[a, s, j]`` = coefficient j of ``a * X**s``: multiplication by ``a`` as a GF(2) matrix."""
    cache = getattr(tower, "_mulbits", None)
    if cache is not None:
        return cache
    k = tower.degree
    a = np.arange(tower.order, dtype=np.int64)
    out = np.zeros((tower.order, k, k), dtype=np.uint8)
    for s in range(k):
        prod = tower.vmul(a, np.int64(1 << s))
        for j in range(k):
            out[:, s, j] = (prod >> j) & 1
    tower._mulbits = out
    return out


def rank_gf2_packed(tower: FieldTower, M, stop_at: int | None = None) -> int:
    """Rank over GF(2^k) via bit-packed elimination of the GF(2) expansion.

    Each entry ``a`` is replaced by the k x k matrix of ``x -> x*a`` over GF(2);
    the GF(2)-rank of the result is k times the GF(2^k)-rank.
    """
    if tower.p != 2:
        raise ValueError("packed elimination needs characteristic 2")
    A = _as_matrix(M)
    m, n = A.shape
    if m == 0 or n == 0:
        return 0
    k = tower.degree
    bits = _mul_bit_matrices(tower)[A]  # (m, n, k, k)
    B = bits.transpose(0, 2, 1, 3).reshape(m * k, n * k)
    nbits = n * k
    pad = (-nbits) % 64
    if pad:
        B = np.concatenate([B, np.zeros((m * k, pad), dtype=np.uint8)], axis=1)
    W = np.packbits(B, axis=1, bitorder="little").view(np.uint64).copy()
    limit = None if stop_at is None else stop_at * k
    rows_total = W.shape[0]
    r = 0
    for col in range(nbits):
        if r == rows_total or (limit is not None and r >= limit):
            break
        w, b = divmod(col, 64)
        colbits = (W[r:, w] >> np.uint64(b)) & np.uint64(1)
        nz = np.flatnonzero(colbits)
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            W[[r, pr]] = W[[pr, r]]
        below = r + 1 + np.flatnonzero((W[r + 1 :, w] >> np.uint64(b)) & np.uint64(1))
        if below.size:
            W[below, w:] ^= W[r, w:]
        r += 1
    if r % k:
        raise AssertionError("GF(2) rank of an expanded matrix must be a multiple of k")
    return r // k


def rank(tower: FieldTower, M, stop_at: int | None = None, method: str = "auto") -> int:
    """Rank of ``M``; ``method`` is ``"auto"``, ``"table"`` or ``"packed"``."""
    A = _as_matrix(M)
    if A.size == 0:
        return 0
    if method == "auto":
        method = "packed" if tower.p == 2 and tower.degree > 1 else "table"
    if method == "packed":
        return rank_gf2_packed(tower, A, stop_at=stop_at)
    if method != "table":
        raise ValueError(f"unknown rank method {method!r}")
    # eliminate on the thinner orientation
    if A.shape[0] > A.shape[1]:
        A = A.T
    return len(row_reduce(tower, A, full=False, stop_at=stop_at)[1])


def matmul(tower: FieldTower, A, B) -> np.ndarray:
    A, B = _as_matrix(A), _as_matrix(B)
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"shape mismatch {A.shape} @ {B.shape}")
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for l in range(A.shape[1]):
        col = A[:, l]
        if not col.any():
            continue
        out = tower.vadd(out, tower.vmul(col[:, None], B[l][None, :]))
    return out


def nullspace(tower: FieldTower, M, n: int | None = None) -> np.ndarray:
    """Basis (as rows) of ``{v : M @ v = 0}``."""
    A = _as_matrix(M, n)
    ncols = A.shape[1] if n is None else n
    if A.shape[0] == 0:
        return np.eye(ncols, dtype=np.int64)
    R, piv = row_reduce(tower, A)
    free = [j for j in range(ncols) if j not in set(piv)]
    out = np.zeros((len(free), ncols), dtype=np.int64)
    for i, f in enumerate(free):
        out[i, f] = 1
        for row, pc in enumerate(piv):
            out[i, pc] = tower.neg(int(R[row, f]))
    return out


def inverse(tower: FieldTower, M) -> np.ndarray:
    A = _as_matrix(M)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    R, piv = row_reduce(tower, np.hstack([A, np.eye(n, dtype=np.int64)]))
    if len(piv) < n or piv[n - 1] != n - 1:
        raise ValueError("matrix is singular")
    return R[:n, n:]


# --------------------------------------------------------------------------
# subspaces
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Row space of ``rows`` over the given tower level, in canonical RREF."""

    tower: FieldTower
    level: str
    n: int
    rows: np.ndarray
    pivots: tuple[int, ...]

    @property
    def dim(self) -> int:
        return self.rows.shape[0]

    def __eq__(self, other):
        if not isinstance(other, SubspaceBasis):
            return NotImplemented
        return (
            self.tower == other.tower
            and self.level == other.level
            and self.n == other.n
            and self.rows.shape == other.rows.shape
            and bool((self.rows == other.rows).all())
        )

    def __hash__(self):
        return hash((self.tower, self.level, self.n, self.rows.tobytes()))

    def __repr__(self):
        return f"SubspaceBasis(level={self.level!r}, n={self.n}, dim={self.dim})"

    def contains(self, v) -> bool:
        v = np.asarray(v, dtype=np.int64)
        if self.level == SUB and not all(self.tower.in_subfield(int(x)) for x in v):
            return False
        return rank(self.tower, np.vstack([self.rows, v[None, :]]), method="table") == self.dim

    def to_json(self) -> dict:
        return {
            "field": self.tower.to_config(),
            "level": self.level,
            "n": self.n,
            "rows": [[self.tower.coeffs(int(x)) for x in row] for row in self.rows],
        }


def rref(tower: FieldTower, M, level: str = TOP, n: int | None = None) -> SubspaceBasis:
    """Canonical basis of the row space of ``M``."""
    A = _as_matrix(M, n)
    ncols = A.shape[1] if A.shape[0] else (n or A.shape[1])
    if level == SUB and A.size and not np.isin(A, tower.subfield_elements()).all():
        raise ValueError("GF(q)-subspace given with entries outside GF(q)")
    if A.shape[0] == 0:
        R, piv = np.zeros((0, ncols), dtype=np.int64), []
    else:
        R, piv = row_reduce(tower, A)
    R = np.ascontiguousarray(R)
    R.setflags(write=False)
    return SubspaceBasis(tower, level, ncols, R, tuple(piv))


def zero_space(tower: FieldTower, n: int, level: str = TOP) -> SubspaceBasis:
    return rref(tower, np.zeros((0, n), dtype=np.int64), level, n)


def full_space(tower: FieldTower, n: int, level: str = TOP) -> SubspaceBasis:
    return rref(tower, np.eye(n, dtype=np.int64), level)


def _same(a: SubspaceBasis, b: SubspaceBasis):
    if a.tower != b.tower or a.n != b.n:
        raise ValueError("subspaces live in different ambient spaces")
    if a.level != b.level:
        raise ValueError("meet/join of subspaces over different tower levels")


def join(a: SubspaceBasis, b: SubspaceBasis) -> SubspaceBasis:
    _same(a, b)
    return rref(a.tower, np.vstack([a.rows, b.rows]), a.level, a.n)


def meet(a: SubspaceBasis, b: SubspaceBasis) -> SubspaceBasis:
    _same(a, b)
    tw = a.tower
    if a.dim == 0 or b.dim == 0:
        return zero_space(tw, a.n, a.level)
    # x A = y B  <=>  (x, y) [A; -B] = 0
    S = np.vstack([a.rows, tw.vneg(b.rows)])
    K = nullspace(tw, S.T)
    out = rref(tw, matmul(tw, K[:, : a.dim], a.rows) if K.shape[0] else np.zeros((0, a.n), dtype=np.int64), a.level, a.n)
    if out.dim + join(a, b).dim != a.dim + b.dim:
        raise AssertionError("modular law violated")
    return out


def annihilator(w: SubspaceBasis) -> SubspaceBasis:
    """Row space of ``{v : w.rows @ v = 0}`` (the dual under the standard pairing)."""
    return rref(w.tower, nullspace(w.tower, w.rows, w.n), w.level, w.n)


def complement(w: SubspaceBasis) -> SubspaceBasis:
    """Standard basis vectors at the non-pivot columns, in index order."""
    free = [j for j in range(w.n) if j not in set(w.pivots)]
    E = np.zeros((len(free), w.n), dtype=np.int64)
    for i, j in enumerate(free):
        E[i, j] = 1
    return rref(w.tower, E, w.level, w.n)


def random_complement(w: SubspaceBasis, rng: np.random.Generator) -> SubspaceBasis:
    """A complement of ``w`` drawn at random (only the row space is canonical)."""
    tw = w.tower
    pool = tw.subfield_elements() if w.level == SUB else np.arange(tw.order)
    need = w.n - w.dim
    while True:
        C = np.asarray(pool)[rng.integers(0, len(pool), size=(need, w.n))]
        if rank(tw, np.vstack([w.rows, C]), method="table") == w.n:
            return rref(tw, C, w.level, w.n)


def _decomposition(onto: SubspaceBasis, along: SubspaceBasis, onto_basis=None):
    _same(onto, along)
    tw = onto.tower
    B = onto.rows if onto_basis is None else _as_matrix(onto_basis)
    if onto.dim + along.dim != onto.n or rank(tw, np.vstack([B, along.rows]), method="table") != onto.n:
        raise ValueError("onto and along do not form a direct sum decomposition")
    return B, inverse(tw, np.vstack([B, along.rows]))


def project_coords(V, onto: SubspaceBasis, along: SubspaceBasis, onto_basis=None) -> np.ndarray:
    """Coordinates, in the basis of ``onto`` (its RREF rows unless ``onto_basis``
    is given), of the projections of the rows of ``V`` onto ``onto`` along ``along``."""
    B, Sinv = _decomposition(onto, along, onto_basis)
    return matmul(onto.tower, _as_matrix(V, onto.n), Sinv)[:, : B.shape[0]]


def project(v, onto: SubspaceBasis, along: SubspaceBasis) -> np.ndarray:
    """Projection of the vector ``v`` onto ``onto`` along ``along``, in ambient coordinates."""
    V = _as_matrix(v, onto.n)
    C = project_coords(V, onto, along)
    out = matmul(onto.tower, C, onto.rows)
    return out[0] if np.ndim(v) == 1 else out


# --------------------------------------------------------------------------
# enumeration (brute-force oracles)
# --------------------------------------------------------------------------


def level_elements(tower: FieldTower, level: str) -> list[int]:
    return tower.subfield_elements() if level == SUB else list(range(tower.order))


def span_vectors(tower: FieldTower, rows, level: str = TOP, cap: int = ENUMERATION_CAP) -> set[tuple[int, ...]]:
    """Every vector of the ``level``-span of ``rows``, by explicit enumeration."""
    R = _as_matrix(rows)
    els = level_elements(tower, level)
    if len(els) ** R.shape[0] > cap:
        raise EnumerationCapError("span too large to enumerate")
    out = set()
    for coeffs in itertools.product(els, repeat=R.shape[0]):
        v = np.zeros(R.shape[1], dtype=np.int64)
        for c, row in zip(coeffs, R):
            if c:
                v = tower.vadd(v, tower.vmul(np.int64(c), row))
        out.add(tuple(int(x) for x in v))
    return out


def gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def enumerate_subspaces(tower: FieldTower, n: int, k: int, level: str = SUB, cap: int = ENUMERATION_CAP) -> Iterator[SubspaceBasis]:
    """All k-dimensional subspaces of level^n, one RREF per pivot pattern and filling."""
    els = level_elements(tower, level)
    if gaussian_binomial(n, k, len(els)) > cap:
        raise EnumerationCapError("too many subspaces to enumerate")
    for piv in itertools.combinations(range(n), k):
        pset = set(piv)
        free = [(i, j) for i, pc in enumerate(piv) for j in range(pc + 1, n) if j not in pset]
        for fill in itertools.product(els, repeat=len(free)):
            R = np.zeros((k, n), dtype=np.int64)
            for i, pc in enumerate(piv):
                R[i, pc] = 1
            for (i, j), x in zip(free, fill):
                R[i, j] = x
            R.setflags(write=False)
            yield SubspaceBasis(tower, level, n, R, piv)
