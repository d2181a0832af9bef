"""Equation spaces of Schubert sections and the codimension of a linear set's
image on V_rt.

The codimension is computed along independent routes that check each other:

``span``
    dim_S, the rank of the c^t wedges b_0 ^ ... ^ b_{t-1} with b_i running
    over a basis of the projection of block U_i onto a complement of W*.
    This is the route of record.
``minors``
    the rank of the t x t minors of the matrix of Frobenius-twisted trace
    equations, expanded over the alpha monomials.
``formal``
    r^t minus the rank of the alpha monomials as polynomials of degree t in
    the GF(q)-coordinates of W (the span of the image over an algebraic
    closure, free of the identities x^q = x of small fields).
``points``
    r^t minus the rank of alpha(P) stacked over the points P of the linear set.
``schubert``
    binom(rt-m-1, t) minus the dimension of F_0 + ... + F_{t-1}, where F_i
    is the space of forms on the t-th exterior power of the complement that
    vanish on every t-subspace meeting the i-th projected block.  Each F_i
    annihilates the decomposable span, so this count is an upper bound for
    dim_S; the two agree when no other forms annihilate that span.

minor_rank <= formal deficit <= point deficit always holds, since each
route's forms vanish on the next route's vectors.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .exterior import IndexTable, hodge_form, minors, wedge_products
from .geometry import alpha_rows, normalize_rows, read_points, to_fixed
from .gf import ENUMERATION_CAP, SUB, TOP, EnumerationCapError, FieldTower
from .linalg import (
    SubspaceBasis,
    annihilator,
    complement,
    inverse,
    matmul,
    meet,
    nullspace,
    project_coords,
    random_complement,
    rank,
    rref,
    zero_space,
)
from .linset import LinearSet, LinearSetSpec

ROUTES = ("span", "minors", "formal", "points", "schubert")


@dataclass(frozen=True)
class FormSpace:
    """Span of linear-form coefficient vectors on an ambient of dimension ``ambient``."""

    basis: SubspaceBasis
    provenance: str
    note: str = ""

    @property
    def ambient(self) -> int:
        return self.basis.n

    @property
    def dim(self) -> int:
        return self.basis.dim


# --------------------------------------------------------------------------
# Schubert forms
# --------------------------------------------------------------------------


def omega_forms(a1: SubspaceBasis, n: int, k: int) -> FormSpace:
    """Forms on the k-th exterior power vanishing on every k-subspace meeting ``a1``.

    Spanned by the Hodge duals of the (n-k)-subspaces A_1 + <e_S>, S running
    over the (n-k-h)-subsets of the standard complement of A_1, in
    lexicographic order; generation stops once the rank reaches binom(n-h, k).
    """
    tw = a1.tower
    h = a1.dim
    ambient = math.comb(n, k)
    if h > n - k:
        return FormSpace(zero_space(tw, ambient, a1.level), "hodge-dual", f"h={h} exceeds n-k={n - k}: no such forms")
    target = math.comb(n - h, k)
    free = complement(a1).pivots
    rows = []
    current = zero_space(tw, ambient, a1.level)
    for S in IndexTable.get(len(free), n - k - h).subsets:
        E = np.zeros((len(S), n), dtype=np.int64)
        for i, s in enumerate(S):
            E[i, free[s]] = 1
        c = rref(tw, np.vstack([a1.rows, E]), a1.level, n)
        rows.append(hodge_form(c, k))
        if len(rows) >= target:
            current = rref(tw, np.array(rows), a1.level, ambient)
            if current.dim == target:
                break
    else:
        current = rref(tw, np.array(rows).reshape(-1, ambient), a1.level, ambient)
    return FormSpace(current, "hodge-dual")


# --------------------------------------------------------------------------
# trace equations and minors
# --------------------------------------------------------------------------


def dual_basis(tower: FieldTower) -> np.ndarray:
    """delta_l with Tr(delta_l xi^k) = [k = l]."""
    t = tower.t
    xs = [tower.pow(tower.xi, k) for k in range(t)]
    G = np.array([[tower.trace(tower.mul(a, b)) for b in xs] for a in xs], dtype=np.int64)
    Ginv = inverse(tower, G)
    return np.array(
        [tower.vsum(tower.vmul(Ginv[:, l], np.array(xs, dtype=np.int64))) for l in range(t)], dtype=np.int64
    )


def trace_equations(ls: LinearSet) -> np.ndarray:
    """rt-m-1 rows a_j in GF(q^t)^r with W = {x : Tr(sum_i a_ji x_i) = 0 for all j}."""
    tw, r, t = ls.tower, ls.r, ls.t
    Y = annihilator(ls.W).rows  # GF(q)-dual of W in reduced coordinates
    if Y.shape[0] == 0:
        return np.zeros((0, r), dtype=np.int64)
    delta = dual_basis(tw)
    Y = Y.reshape(-1, r, t)
    return tw.vsum(tw.vmul(Y, delta[None, None, :]), axis=2)


def solve_trace_equations(tower: FieldTower, a, r: int) -> SubspaceBasis:
    """GF(q)-subspace of GF(q)^{rt} cut out by Tr(sum_i a_ji x_i) = 0."""
    a = np.asarray(a, dtype=np.int64).reshape(-1, r)
    t = tower.t
    n = r * t
    if a.shape[0] == 0:
        return rref(tower, np.eye(n, dtype=np.int64), SUB, n)
    xs = np.array([tower.pow(tower.xi, k) for k in range(t)], dtype=np.int64)
    prod = tower.vmul(a[:, :, None], xs[None, None, :])  # (j, i, k)
    L = np.vectorize(tower.trace, otypes=[np.int64])(prod).reshape(a.shape[0], n)
    return rref(tower, nullspace(tower, L, n), SUB, n)


def twisted_blocks(tower: FieldTower, a) -> list[np.ndarray]:
    """F_i[s, j] = a_{js}^(q^i): the blocks U_i read through the trace functionals."""
    a = np.asarray(a, dtype=np.int64)
    return [tower.vfrob(a, i).T for i in range(tower.t)]


def minor_matrix(tower: FieldTower, a) -> np.ndarray:
    """r^t x binom(n, t) matrix; column J holds the coefficients, on the alpha
    monomials, of the t x t minor of M on the rows J."""
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[0]
    t = tower.t
    if n < t:
        return np.zeros((a.shape[1] ** t, 0), dtype=np.int64)
    return wedge_products(tower, twisted_blocks(tower, a), n)


def minor_forms(tower: FieldTower, a, r: int) -> FormSpace:
    """Span of the minor forms in the r^t-dimensional dual of the alpha coordinates."""
    Mm = minor_matrix(tower, a)
    amb = r**tower.t
    if Mm.shape[1] == 0:
        return FormSpace(zero_space(tower, amb), "minor", "fewer equations than t")
    return FormSpace(rref(tower, Mm.T, TOP, amb), "minor")


# --------------------------------------------------------------------------
# the formal and point routes
# --------------------------------------------------------------------------


def monomial_matrix(tower: FieldTower, factors) -> np.ndarray:
    """Coefficients of prod_i (sum_j z_j A_i[j, f(i)]) in the degree-t monomials of z.

    Rows are the functions f (lexicographic, f(0) most significant); columns
    are multisets of size t of range(k), lexicographic.
    """
    factors = [np.asarray(A, dtype=np.int64) for A in factors]
    k = factors[0].shape[0]
    cols = {(): 0}
    cur = np.ones((1, 1), dtype=np.int64)
    for A in factors:
        nxt_keys = sorted({tuple(sorted(u + (j,))) for u in cols for j in range(k)})
        nxt = {u: i for i, u in enumerate(nxt_keys)}
        out = np.zeros((cur.shape[0] * A.shape[1], len(nxt)), dtype=np.int64)
        for u, ui in cols.items():
            col = cur[:, ui]
            if not col.any():
                continue
            for j in range(k):
                contrib = tower.vmul(col[:, None], A[j][None, :]).reshape(-1)
                tgt = nxt[tuple(sorted(u + (j,)))]
                out[:, tgt] = tower.vadd(out[:, tgt], contrib)
        cur, cols = out, nxt
    return cur


def formal_evaluation_route(ls: LinearSet) -> int:
    """r^t minus the rank of the alpha monomials as polynomials on W."""
    tw, r, t = ls.tower, ls.r, ls.t
    F = to_fixed(tw, r, ls.W.rows)
    factors = [F[:, i * r : (i + 1) * r] for i in range(t)]
    return r**t - rank(tw, monomial_matrix(tw, factors))


@dataclass
class PointRoute:
    deficit: int
    exact: bool
    points_used: int
    exhaustive: bool


def point_evaluation_route(
    ls: LinearSet,
    cap: int = ENUMERATION_CAP,
    samples: int | None = None,
    rng: np.random.Generator | None = None,
    lower: int | None = None,
) -> PointRoute:
    """r^t minus the rank of alpha over the points of the linear set.

    Exhaustive when q^{m+1} <= cap and ``samples`` is None.  Otherwise random
    vectors of W are drawn; the result is an upper bound on the deficit and is
    exact once it meets ``lower`` (a known lower bound such as the minor rank).
    """
    tw, r, t = ls.tower, ls.r, ls.t
    full = r**t
    if samples is None:
        try:
            V = ls.vectors(cap)[1:]
        except EnumerationCapError:
            if lower is None:
                raise
            samples = 4 * full
        else:
            P = np.unique(normalize_rows(tw, read_points(tw, r, V)), axis=0)
            d = full - rank(tw, alpha_rows(tw, P))
            return PointRoute(d, True, len(P), True)
    rng = rng or np.random.default_rng(0)
    sub = np.array(tw.subfield_elements(), dtype=np.int64)
    rows = np.zeros((0, full), dtype=np.int64)
    best = full
    used = 0
    batch = max(16, full // 4)
    while used < samples:
        C = sub[rng.integers(0, len(sub), size=(batch, ls.rank))]
        X = read_points(tw, r, matmul(tw, C, ls.W.rows))
        X = X[X.any(axis=1)]
        used += len(X)
        rows = np.vstack([rows, alpha_rows(tw, X)])
        R = rref(tw, rows, TOP, full)
        rows = R.rows
        best = full - R.dim
        if lower is not None and best <= lower:
            break
    return PointRoute(best, lower is not None and best == lower, used, False)


# --------------------------------------------------------------------------
# the pipeline
# --------------------------------------------------------------------------


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class CodimReport:
    q: int
    r: int
    t: int
    m: int
    h: int
    c: int
    bound: int
    injective: bool
    dim_S: int | None = None
    dim_S_trials: list[int] = field(default_factory=list)
    pairwise: dict[str, int] = field(default_factory=dict)
    t3_prediction: int | None = None
    n_equations: int = 0
    minor_rank: int | None = None
    formal_deficit: int | None = None
    point_deficit: int | None = None
    point_exact: bool | None = None
    point_count: int | None = None
    schubert_codim: int | None = None
    invariants: list[Check] = field(default_factory=list)
    findings: list[str] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.invariants)

    def to_json(self, timings: bool = False) -> dict:
        d = asdict(self)
        d["invariants"] = [asdict(c) for c in self.invariants]
        d["version"] = __version__
        d["ok"] = self.ok
        if not timings:
            d.pop("timings")
        return d


def complement_coordinates(ws: SubspaceBasis, comp: SubspaceBasis, blocks) -> list[SubspaceBasis]:
    """Projections of the blocks onto ``comp`` along ``ws``, in coordinates of comp's basis."""
    n = comp.dim
    return [rref(ws.tower, project_coords(u.rows, comp, ws), TOP, n) for u in blocks]


def decomposable_rank(tower: FieldTower, bases, n: int, rng: np.random.Generator | None = None) -> int:
    """Rank of the wedges of one vector per basis, stopping at binom(n, t).

    With ``rng`` each basis is first replaced by a random basis of its span.
    """
    t = len(bases)
    mats = []
    for B in bases:
        B = B.rows if isinstance(B, SubspaceBasis) else np.asarray(B, dtype=np.int64)
        if rng is not None and B.shape[0]:
            c = B.shape[0]
            while True:
                G = rng.integers(0, tower.order, size=(c, c))
                if rank(tower, G, method="table") == c:
                    break
            B = matmul(tower, G, B)
        mats.append(B)
    if n < t or any(B.shape[0] == 0 for B in mats):
        return 0
    return rank(tower, wedge_products(tower, mats, n), stop_at=math.comb(n, t))


def schubert_forms(ubar: SubspaceBasis, t: int) -> np.ndarray:
    """Basis-spanning rows of the forms vanishing on all t-subspaces meeting ``ubar``.

    These are the t-th exterior power of the annihilator of ``ubar``, written
    as wedges of t annihilator rows (the pairing of the t-th exterior powers
    of a space and its dual is the subset-wise dot product).
    """
    A = annihilator(ubar).rows
    n = ubar.n
    if A.shape[0] < t:
        return np.zeros((0, math.comb(n, t)), dtype=np.int64)
    subsets = IndexTable.get(n, t).subsets
    return np.array([minors(ubar.tower, A[list(S)], subsets) for S in IndexTable.get(A.shape[0], t).subsets])


def schubert_sum_codim(tower: FieldTower, ubar, t: int) -> int:
    """binom(n, t) minus the dimension of the sum of the Schubert form spaces of the ``ubar``."""
    n = ubar[0].n
    F = np.vstack([schubert_forms(u, t) for u in ubar])
    return math.comb(n, t) - (rank(tower, F) if F.size else 0)


def t3_prediction(r: int, t: int, m1: int, c: int) -> int | None:
    if t == 3 and r > 2 and m1 <= 3 * r - 3 - c:
        N = 3 * r - m1
        return math.comb(N, 3) - 3 * math.comb(N - c, 3)
    return None


def codim_pipeline(
    source: LinearSet | LinearSetSpec,
    routes=ROUTES,
    complement_trials: int = 3,
    seed: int = 0,
    cap: int = ENUMERATION_CAP,
    point_samples: int | None = None,
) -> CodimReport:
    ls = LinearSet.from_spec(source) if isinstance(source, LinearSetSpec) else source
    unknown = set(routes) - set(ROUTES)
    if unknown:
        raise ValueError(f"unknown routes {sorted(unknown)}; choose from {ROUTES}")
    tw, r, t = ls.tower, ls.r, ls.t
    m1 = ls.rank
    N = r * t - m1
    rng = np.random.default_rng(seed)
    clock = {}

    def timed(name, fn, *a, **kw):
        t0 = time.perf_counter()
        out = fn(*a, **kw)
        clock[name] = round(time.perf_counter() - t0, 4)
        return out

    ws = ls.W_star
    blocks = ls.blocks.blocks()
    hs = [meet(u, ws).dim for u in blocks]
    h = hs[0]
    comp = complement(ws)
    ubar = complement_coordinates(ws, comp, blocks)
    cs = [u.dim for u in ubar]
    c = cs[0]
    rep = CodimReport(
        q=tw.q, r=r, t=t, m=m1 - 1, h=h, c=c, bound=math.comb(N, t) if N >= t else 0,
        injective=m1 > r * t - t - c, t3_prediction=t3_prediction(r, t, m1, c), n_equations=N,
    )
    inv = rep.invariants
    inv.append(Check("c equal across blocks", len(set(cs)) == 1, f"dims {cs}"))
    inv.append(Check("h equal across blocks", len(set(hs)) == 1, f"dims {hs}"))
    inv.append(Check("c = r - h", c == r - h, f"c={c}, r-h={r - h}"))
    rep.pairwise = {f"{i},{j}": meet(ubar[i], ubar[j]).dim for i in range(t) for j in range(i + 1, t)}

    if "span" in routes:
        rep.dim_S = timed("span", decomposable_rank, tw, ubar, N)
        for k in range(complement_trials):
            comp_k = random_complement(ws, rng)
            ub = complement_coordinates(ws, comp_k, blocks)
            rep.dim_S_trials.append(decomposable_rank(tw, ub, N, rng=rng))
        inv.append(Check("complement independence", all(d == rep.dim_S for d in rep.dim_S_trials),
                         f"{rep.dim_S} vs trials {rep.dim_S_trials}"))
        inv.append(Check("dim_S <= bound", rep.dim_S <= rep.bound, f"{rep.dim_S} <= {rep.bound}"))
        if rep.injective:
            inv.append(Check("dim_S = bound when injective", rep.dim_S == rep.bound, f"{rep.dim_S} vs {rep.bound}"))
        if rep.t3_prediction is not None:
            inv.append(Check("t=3 closed form", rep.dim_S == rep.t3_prediction, f"{rep.dim_S} vs {rep.t3_prediction}"))

    if "schubert" in routes:
        rep.schubert_codim = timed("schubert", schubert_sum_codim, tw, ubar, t) if N >= t else 0
        if rep.dim_S is not None:
            inv.append(Check("dim_S <= Schubert-sum count", rep.dim_S <= rep.schubert_codim,
                             f"{rep.dim_S} <= {rep.schubert_codim}"))
            if rep.dim_S != rep.schubert_codim:
                rep.findings.append(
                    f"Schubert-sum count {rep.schubert_codim} exceeds dim_S {rep.dim_S}: "
                    "the decomposable span has annihilating forms outside the sum of the Schubert form spaces"
                )

    a = None
    if "minors" in routes or "points" in routes:
        a = trace_equations(ls)
        inv.append(Check("trace equations round trip", solve_trace_equations(tw, a, r) == ls.W, f"{a.shape[0]} equations"))

    if "minors" in routes:
        Mm = timed("minors", minor_matrix, tw, a)
        rep.minor_rank = rank(tw, Mm) if Mm.size else 0
        if rep.dim_S is not None and rep.minor_rank != rep.dim_S:
            rep.findings.append(f"minor rank {rep.minor_rank} differs from dim_S {rep.dim_S}")

    if "formal" in routes:
        rep.formal_deficit = timed("formal", formal_evaluation_route, ls)
        if rep.minor_rank is not None:
            inv.append(Check("minor rank <= formal deficit", rep.minor_rank <= rep.formal_deficit,
                             f"{rep.minor_rank} <= {rep.formal_deficit}"))
        if rep.dim_S is not None and rep.formal_deficit != rep.dim_S:
            rep.findings.append(f"formal deficit {rep.formal_deficit} differs from dim_S {rep.dim_S}")

    if "points" in routes:
        pr = timed("points", point_evaluation_route, ls, cap, point_samples, rng, rep.minor_rank)
        rep.point_deficit, rep.point_exact, rep.point_count = pr.deficit, pr.exact, pr.points_used
        if "minors" in routes and a.shape[0] >= t:
            Mm_cols = minor_matrix(tw, a)
            sample = ls.vectors(cap)[1:][:64] if tw.q**m1 <= cap else None
            if sample is not None and len(sample):
                vals = matmul(tw, alpha_rows(tw, read_points(tw, r, sample)), Mm_cols)
                inv.append(Check("minor forms vanish on the linear set", not vals.any(), f"{len(sample)} points"))
        if rep.minor_rank is not None and pr.exact:
            inv.append(Check("minor rank <= point deficit", rep.minor_rank <= rep.point_deficit,
                             f"{rep.minor_rank} <= {rep.point_deficit}"))
        if rep.formal_deficit is not None and pr.exact:
            inv.append(Check("formal deficit <= point deficit", rep.formal_deficit <= rep.point_deficit,
                             f"{rep.formal_deficit} <= {rep.point_deficit}"))
        if rep.dim_S is not None and rep.point_deficit != rep.dim_S:
            rep.findings.append(
                f"point deficit {rep.point_deficit} differs from dim_S {rep.dim_S} "
                f"({'exhaustive' if pr.exhaustive else 'sampled'}, q={tw.q})"
            )
    rep.timings = clock
    return rep
