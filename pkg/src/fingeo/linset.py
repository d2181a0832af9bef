"""Linear sets of PG(r-1, q^t) and their point weights.

The block parameters h and c are computed here as well.

A linear set is given by a GF(q)-subspace W of GF(q)^{rt} (reduced
coordinates, see :mod:`fingeo.geometry`).  :class:`LinearSetSpec` describes W
parametrically: variables ranging over subfields GF(q^s) (optionally with
trace zero), and r coordinate expressions built from Frobenius twists of them.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .expr import Expression, parse_expression
from .geometry import BlockDecomposition, field_reduce, normalize_rows, read_points, reduce_points, sigma_fix_check, to_fixed
from .gf import ENUMERATION_CAP, SUB, TOP, EnumerationCapError, FieldTower, _factor_prime_power, get_tower
from .linalg import SubspaceBasis, matmul, meet, nullspace, rank, rref

CONSTRAINTS = ("trace_zero",)


class SpecError(ValueError):
    """The specification is malformed or internally inconsistent."""


@dataclass(frozen=True)
class VarSpec:
    name: str
    degree: int = 1
    constraints: tuple[str, ...] = ()

    @property
    def dim(self) -> int:
        return self.degree - sum(1 for c in self.constraints if c == "trace_zero")

    def to_json(self) -> dict:
        d = {"name": self.name, "degree": self.degree}
        if self.constraints:
            d["constraints"] = list(self.constraints)
        return d


@dataclass(frozen=True)
class LinearSetSpec:
    q: int
    r: int
    t: int
    vars: tuple[VarSpec, ...]
    coords: tuple[str, ...]
    modulus: object = "auto"
    sub_modulus: object = "auto"
    diagnostic: bool = False

    @classmethod
    def from_json(cls, data) -> "LinearSetSpec":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            vs = tuple(
                VarSpec(v["name"], int(v.get("degree", 1)), tuple(v.get("constraints", ())))
                for v in data["vars"]
            )
            return cls(
                q=int(data["q"]),
                r=int(data["r"]),
                t=int(data["t"]),
                vars=vs,
                coords=tuple(data["coords"]),
                modulus=_freeze(data.get("modulus", "auto")),
                sub_modulus=_freeze(data.get("sub_modulus", "auto")),
                diagnostic=bool(data.get("diagnostic", False)),
            )
        except (KeyError, TypeError) as exc:
            raise SpecError(f"malformed linear set specification: {exc!r}") from exc

    @classmethod
    def load(cls, path) -> "LinearSetSpec":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def to_json(self) -> dict:
        d = {
            "q": self.q,
            "r": self.r,
            "t": self.t,
            "vars": [v.to_json() for v in self.vars],
            "coords": list(self.coords),
        }
        if self.modulus != "auto":
            d["modulus"] = list(self.modulus)
        if self.sub_modulus != "auto":
            d["sub_modulus"] = list(self.sub_modulus)
        if self.diagnostic:
            d["diagnostic"] = True
        return d

    @cached_property
    def tower(self) -> FieldTower:
        try:
            p, e = _factor_prime_power(self.q)
        except ValueError as exc:
            raise SpecError(str(exc)) from exc
        return get_tower(p, e, self.t, self.modulus, self.sub_modulus)

    @property
    def declared_rank(self) -> int:
        return sum(v.dim for v in self.vars)

    def expressions(self) -> list[Expression]:
        names = [v.name for v in self.vars]
        return [parse_expression(c, self.tower.p, self.t, names) for c in self.coords]


def _freeze(m):
    return m if m == "auto" else tuple(int(x) for x in m)


# --------------------------------------------------------------------------
# variable domains and W
# --------------------------------------------------------------------------


def _gfq_matrix(tower: FieldTower, fn) -> np.ndarray:
    """Matrix (columns = images of xi^k) of a GF(q)-linear map GF(q^t) -> GF(q^t)."""
    xs = [tower.pow(tower.xi, k) for k in range(tower.t)]
    return np.array([tower.expand(fn(x)) for x in xs], dtype=np.int64).T


def domain_basis(tower: FieldTower, degree: int, trace_zero: bool = False) -> list[int]:
    """GF(q)-basis of GF(q^degree) inside GF(q^t), optionally cut by the
    relative trace GF(q^degree) -> GF(q)."""
    if degree < 1 or tower.t % degree:
        raise SpecError(f"variable degree {degree} does not divide t={tower.t}")
    blocks = [_gfq_matrix(tower, lambda a: tower.sub(tower.frob(a, degree), a))]
    if trace_zero:
        blocks.append(_gfq_matrix(tower, lambda a: tower.sub_trace(a, degree)))
    K = nullspace(tower, np.vstack(blocks), tower.t)
    return [tower.combine(row) for row in rref(tower, K, SUB, tower.t).rows]


def _coordinate_vectors(spec: LinearSetSpec) -> np.ndarray:
    """One GF(q^t)^r vector per GF(q)-basis element of the parameter space."""
    tw = spec.tower
    exprs = spec.expressions()
    for i, e in enumerate(exprs):
        for term in e.terms:
            if term.coeff >= tw.order:
                raise SpecError(f"coefficient {term.coeff} in coordinate {i} is not an element of GF({tw.order})")
    out = []
    for v in spec.vars:
        bad = [c for c in v.constraints if c not in CONSTRAINTS]
        if bad:
            raise SpecError(f"unknown constraint {bad[0]!r} on variable {v.name!r}")
        for b in domain_basis(tw, v.degree, "trace_zero" in v.constraints):
            vec = []
            for e in exprs:
                acc = 0
                for term in e.terms:
                    if term.var == v.name:
                        acc = tw.add(acc, tw.mul(term.coeff, tw.frob(b, term.frob)))
                vec.append(acc)
            out.append(vec)
    return np.array(out, dtype=np.int64).reshape(-1, spec.r)


def build_W(spec: LinearSetSpec) -> SubspaceBasis:
    """The defining GF(q)-subspace of GF(q)^{rt}; checks the declared rank."""
    if len(spec.coords) != spec.r:
        raise SpecError(f"expected {spec.r} coordinate expressions, got {len(spec.coords)}")
    names = [v.name for v in spec.vars]
    if len(set(names)) != len(names):
        raise SpecError("duplicate variable names")
    tw = spec.tower
    X = _coordinate_vectors(spec)
    W = rref(tw, reduce_points(tw, X), SUB, spec.r * spec.t)
    if W.dim != spec.declared_rank:
        raise SpecError(
            f"declared rank {spec.declared_rank} (sum of variable dimensions) but the coordinates span "
            f"a subspace of dimension {W.dim}"
        )
    validate_rank(spec.r, spec.t, W.dim, spec.diagnostic)
    return W


def validate_rank(r: int, t: int, rank_: int, diagnostic: bool = False) -> None:
    if diagnostic:
        return
    if not r <= rank_ <= r * t - t:
        raise SpecError(
            f"rank m+1={rank_} outside the admissible range r <= m+1 <= rt-t = [{r}, {r * t - t}]; "
            "set \"diagnostic\": true to analyse it anyway"
        )


# --------------------------------------------------------------------------
# the linear set
# --------------------------------------------------------------------------


@dataclass
class LinearSetReport:
    rank: int
    point_count: int
    spectrum: dict[int, int]
    weights: dict[tuple[int, ...], int] = field(repr=False)
    vector_identity: bool = True
    minimal: bool | None = None

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "point_count": self.point_count,
            "spectrum": {str(k): v for k, v in sorted(self.spectrum.items())},
            "vector_identity": self.vector_identity,
            "minimal": self.minimal,
        }


@dataclass(frozen=True)
class BlockParams:
    h: tuple[int, ...]
    c: int
    proper: bool
    spans_block: bool
    bound_ok: bool

    def to_json(self) -> dict:
        return {"h": list(self.h), "c": self.c, "proper": self.proper, "spans_block": self.spans_block, "bound_ok": self.bound_ok}


class LinearSet:
    """A linear set of PG(r-1, q^t) with defining subspace W."""

    def __init__(self, tower: FieldTower, r: int, W: SubspaceBasis, spec: LinearSetSpec | None = None):
        if W.level != SUB or W.n != r * tower.t:
            raise ValueError("W must be a GF(q)-subspace of GF(q)^{rt}")
        self.tower, self.r, self.W, self.spec = tower, r, W, spec

    @classmethod
    def from_spec(cls, spec: LinearSetSpec) -> "LinearSet":
        return cls(spec.tower, spec.r, build_W(spec), spec)

    @property
    def t(self) -> int:
        return self.tower.t

    @property
    def rank(self) -> int:
        return self.W.dim

    @cached_property
    def blocks(self) -> BlockDecomposition:
        return BlockDecomposition(self.tower, self.r)

    @cached_property
    def W_star(self) -> SubspaceBasis:
        """GF(q^t)-span of W in fixed coordinates."""
        ws = rref(self.tower, to_fixed(self.tower, self.r, self.W.rows), TOP, self.r * self.t)
        if not sigma_fix_check(ws, self.blocks):
            raise AssertionError("extension of W is not sigma-invariant")
        if ws.dim != self.rank:
            raise AssertionError("extension of W changed dimension")
        return ws

    def vectors(self, cap: int = ENUMERATION_CAP) -> np.ndarray:
        """All vectors of W, as rows, in a deterministic order (zero first)."""
        k = self.rank
        q = self.tower.q
        if q**k > cap:
            raise EnumerationCapError(f"W has {q**k} vectors, over the cap {cap}")
        sub = np.array(self.tower.subfield_elements(), dtype=np.int64)
        grid = sub[np.indices((q,) * k).reshape(k, -1).T] if k else np.zeros((1, 0), dtype=np.int64)
        return matmul(self.tower, grid, self.W.rows)

    def points(self, cap: int = ENUMERATION_CAP) -> np.ndarray:
        return np.array(sorted(self.points_and_weights(cap).weights), dtype=np.int64).reshape(-1, self.r)

    def points_and_weights(self, cap: int = ENUMERATION_CAP) -> LinearSetReport:
        return points_and_weights(self, cap)

    def minimality_check(self, report: LinearSetReport | None = None) -> bool:
        return minimality_check(self, report)

    def block_params(self) -> BlockParams:
        return block_params(self)


def points_and_weights(ls: LinearSet, cap: int = ENUMERATION_CAP) -> LinearSetReport:
    """Points of the linear set with their weights.

    Weights come from the exact meet of W with the field-reduced point; the
    number of W-vectors reading to each point must equal q^weight - 1.
    """
    tw = ls.tower
    V = ls.vectors(cap)[1:]
    P = normalize_rows(tw, read_points(tw, ls.r, V)) if len(V) else np.zeros((0, ls.r), dtype=np.int64)
    counts = Counter(map(tuple, P.tolist()))
    weights = {}
    ok = True
    for pt in sorted(counts):
        w = meet(ls.W, field_reduce(tw, np.array(pt)).subspace).dim
        weights[pt] = w
        ok &= counts[pt] == tw.q**w - 1
    ok &= sum(tw.q**w - 1 for w in weights.values()) == tw.q**ls.rank - 1
    rep = LinearSetReport(ls.rank, len(weights), dict(Counter(weights.values())), weights, ok)
    rep.minimal = minimality_check(ls, rep)
    return rep


def minimality_check(ls: LinearSet, report: LinearSetReport | None = None) -> bool:
    """True iff the W-vectors over weight-1 points span W."""
    if report is None:
        report = points_and_weights(ls)
    tw = ls.tower
    # each weight-1 point meets W in a single GF(q)-line: take that line
    lines = [meet(ls.W, field_reduce(tw, np.array(pt)).subspace).rows for pt, w in report.weights.items() if w == 1]
    if not lines:
        return ls.rank == 0
    return rank(tw, np.vstack(lines)) == ls.rank


def block_params(ls: LinearSet) -> BlockParams:
    """Block intersections h_i = dim(U_i meet W*) with c = r - h, plus properness checks."""
    ws = ls.W_star
    hs = tuple(meet(u, ws).dim for u in ls.blocks.blocks())
    if len(set(hs)) != 1:
        raise AssertionError(f"block intersections differ across blocks: {hs}")
    h = hs[0]
    r, t, m1 = ls.r, ls.t, ls.rank
    spans = rank(ls.tower, ws.rows[:, :r]) == r if ws.dim else r == 0
    proper = spans and m1 <= r * t - t
    bound_ok = True
    if proper and t > 2:
        bound_ok = h * (t - 1) <= m1 - r
    elif proper and t == 2:
        bound_ok = h == m1 - r
    return BlockParams(hs, r - h, proper, spans, bound_ok)


# --------------------------------------------------------------------------
# ready-made specifications
# --------------------------------------------------------------------------


def canonical_spec(q: int, r: int, t: int) -> LinearSetSpec:
    """The canonical subgeometry PG(r-1, q) as a linear set of rank r."""
    return LinearSetSpec(q, r, t, tuple(VarSpec(f"x{i}", 1) for i in range(r)), tuple(f"x{i}" for i in range(r)))


def example_spec(which: int, q: int = 2) -> LinearSetSpec:
    """The two rank-9 linear sets of PG(5, q^4) with different codimensions."""
    if which == 1:
        vars_ = (VarSpec("x", 4), VarSpec("y", 4), VarSpec("z", 1))
        coords = ("x", "x^q", "y", "y^q", "y^q^2", "z")
    elif which == 2:
        vars_ = (VarSpec("x", 2), VarSpec("y", 4, ("trace_zero",)), VarSpec("z", 4))
        coords = ("x", "y", "y^q", "z", "z^q", "z^q^2")
    else:
        raise ValueError("example must be 1 or 2")
    return LinearSetSpec(q, 6, 4, vars_, coords)


def random_spec(tower: FieldTower, r: int, rank_: int, rng: np.random.Generator, twisted: bool = True) -> LinearSetSpec:
    """A random specification of the given rank (resampled until consistent).

    Every GF(q)-subspace of rank k arises as span of k vectors of GF(q^t)^r,
    so k variables over GF(q) with random coefficients reach all of them.
    With ``twisted`` one variable of degree t with random Frobenius powers is
    used when the rank allows it, so the parser sees twisted terms.
    """
    t = tower.t
    q = tower.q
    for _ in range(1000):
        vars_: list[VarSpec] = []
        terms: list[list[str]] = [[] for _ in range(r)]
        left = rank_
        if twisted and rank_ >= t and rng.random() < 0.5:
            vars_.append(VarSpec("y", t))
            left -= t
            for i in range(r):
                if rng.random() < 0.6:
                    terms[i].append(f"{int(rng.integers(1, tower.order))}*y^q^{int(rng.integers(0, t))}")
        for j in range(left):
            vars_.append(VarSpec(f"v{j}", 1))
            for i in range(r):
                a = int(rng.integers(0, tower.order))
                if a:
                    terms[i].append(f"{a}*v{j}")
        coords = tuple(" + ".join(ts) if ts else f"0*{vars_[0].name}" for ts in terms)
        spec = LinearSetSpec(q, r, t, tuple(vars_), coords, tower.modulus, tower.sub_modulus, diagnostic=True)
        try:
            W = build_W(spec)
        except SpecError:
            continue
        if W.dim == rank_:
            return LinearSetSpec(q, r, t, tuple(vars_), coords, tower.modulus, tower.sub_modulus)
    raise RuntimeError("could not draw a consistent random specification")
