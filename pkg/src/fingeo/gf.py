"""Finite field towers GF(p) <= GF(q) <= GF(q^t).

Every element lives in one absolute representation: a polynomial over GF(p)
of degree < e*t, reduced modulo a single irreducible of degree e*t.  The
polynomial is packed into an integer whose base-p digits are the
coefficients (little-endian), so ``0 <= value < q**t``.  The intermediate
field GF(q) is the embedded copy cut out by ``x**q == x``.

Scalar methods on :class:`FieldTower` take and return these integers.  The
``v``-prefixed methods do the same on numpy integer arrays and are what the
elimination kernels use.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

SUB = "q"
TOP = "qt"
LEVELS = (SUB, TOP)

ENUMERATION_CAP = 2**20
TABLE_CAP = 2**16
_ADD_TABLE_CAP = 1024


class TowerMismatchError(ValueError):
    """Raised when elements of two different towers are combined."""


class EnumerationCapError(ValueError):
    """Raised when an exhaustive enumeration would exceed the configured cap."""


# --------------------------------------------------------------------------
# polynomials over GF(p), little-endian coefficient tuples
# --------------------------------------------------------------------------


def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    """Remainder of ``a`` modulo the monic polynomial ``m`` over GF(p)."""
    a = _trim([x % p for x in a])
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        f = a[-1]
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - f * mi) % p
        _trim(a)
    return a


def poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def is_irreducible(m: Sequence[int], p: int) -> bool:
    """Trial-divide the monic ``m`` by every monic polynomial of degree <= deg/2."""
    d = len(m) - 1
    if d < 1 or m[-1] % p != 1:
        return False
    if d == 1:
        return True
    if m[0] % p == 0:
        return False
    for k in range(1, d // 2 + 1):
        for low in itertools.product(range(p), repeat=k):
            if not poly_mod(m, list(low) + [1], p):
                return False
    return True


def least_irreducible(p: int, d: int) -> tuple[int, ...]:
    """Monic irreducible of degree ``d`` whose low coefficients, read as a
    base-p integer (little-endian), are smallest."""
    for n in range(p**d):
        low = [(n // p**i) % p for i in range(d)]
        cand = tuple(low) + (1,)
        if is_irreducible(cand, p):
            return cand
    raise ValueError(f"no irreducible polynomial of degree {d} over GF({p})")


def _factor_prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise ValueError(f"q={q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            e, r = 0, q
            while r % p == 0:
                r //= p
                e += 1
            if r != 1:
                raise ValueError(f"q={q} is not a prime power")
            return p, e
    raise AssertionError


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# --------------------------------------------------------------------------
# the tower
# --------------------------------------------------------------------------


class FieldTower:
    """The chain GF(p) <= GF(q) <= GF(q^t) with q = p^e.

    Parameters
    ----------
    p : int
        Characteristic.
    e : int
        ``q = p**e``.
    t : int
        Degree of the top field over GF(q).
    modulus : sequence of int or "auto"
        Monic irreducible of degree ``e*t`` over GF(p), little-endian.
    sub_modulus : sequence of int or "auto"
        Monic irreducible of degree ``e`` over GF(p) defining GF(q); its root
        inside the top field is the image of the subfield generator.
    """

    def __init__(self, p: int, e: int = 1, t: int = 1, modulus="auto", sub_modulus="auto"):
        if p < 2 or _prime_factors(p) != [p]:
            raise ValueError(f"p={p} is not prime")
        if e < 1 or t < 1:
            raise ValueError("e and t must be positive")
        self.p, self.e, self.t = p, e, t
        self.q = p**e
        self.degree = e * t
        self.order = self.q**t

        if isinstance(modulus, str):
            modulus = least_irreducible(p, self.degree)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != self.degree + 1 or not is_irreducible(modulus, p):
            raise ValueError(f"modulus {list(modulus)} is not a monic irreducible of degree {self.degree} over GF({p})")
        if isinstance(sub_modulus, str):
            sub_modulus = least_irreducible(p, e)
        sub_modulus = tuple(int(c) % p for c in sub_modulus)
        if len(sub_modulus) != e + 1 or not is_irreducible(sub_modulus, p):
            raise ValueError(f"sub_modulus {list(sub_modulus)} is not a monic irreducible of degree {e} over GF({p})")
        self.modulus = modulus
        self.sub_modulus = sub_modulus
        self._key = (p, e, t, modulus, sub_modulus)

        self._pw = [p**i for i in range(self.degree + 1)]
        self._build_tables()
        # generator of the top field over GF(p); (1, xi, ..., xi^(t-1)) is
        # the GF(q)-basis used for field reduction
        self.xi = self.from_coeffs([0, 1]) if self.degree > 1 else self.from_coeffs([-modulus[0]])
        self.beta = self._find_sub_root()
        self._sub_set = frozenset(a for a in range(self.order) if self.frob(a) == a)
        if len(self._sub_set) != self.q:
            raise AssertionError("Frobenius fixes the wrong number of elements")
        self._expand_table = None

    # ---- identity ---------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, FieldTower) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"FieldTower(p={self.p}, e={self.e}, t={self.t}, modulus={list(self.modulus)})"

    @classmethod
    def from_q(cls, q: int, t: int, **kw) -> "FieldTower":
        p, e = _factor_prime_power(q)
        return get_tower(p, e, t, **kw)

    @classmethod
    def from_config(cls, cfg: dict) -> "FieldTower":
        modulus = cfg.get("modulus", "auto")
        sub_modulus = cfg.get("sub_modulus", "auto")
        if "p" in cfg:
            p, e = int(cfg["p"]), int(cfg.get("e", 1))
        else:
            p, e = _factor_prime_power(int(cfg["q"]))
        return get_tower(p, e, int(cfg.get("t", 1)), modulus=modulus, sub_modulus=sub_modulus)

    def to_config(self) -> dict:
        return {
            "p": self.p,
            "e": self.e,
            "t": self.t,
            "modulus": list(self.modulus),
            "sub_modulus": list(self.sub_modulus),
        }

    # ---- encoding ---------------------------------------------------------

    def coeffs(self, a: int) -> list[int]:
        """Little-endian GF(p) coefficients of length e*t."""
        return [(a // self._pw[i]) % self.p for i in range(self.degree)]

    def from_coeffs(self, c: Sequence[int]) -> int:
        c = list(c)
        if len(c) > self.degree:
            c = poly_mod(c, self.modulus, self.p)
        return sum((int(x) % self.p) * self._pw[i] for i, x in enumerate(c))

    def check(self, a: int) -> int:
        if not 0 <= a < self.order:
            raise ValueError(f"{a} is not an element encoding of GF({self.q}^{self.t})")
        return a

    # ---- generic polynomial path (reference) -------------------------------

    def mul_generic(self, a: int, b: int) -> int:
        """Schoolbook product; any characteristic."""
        return self.from_coeffs(poly_mod(poly_mul(self.coeffs(a), self.coeffs(b), self.p), self.modulus, self.p))

    def mul_packed(self, a: int, b: int) -> int:
        """Carry-less product on packed words; characteristic 2 only."""
        if self.p != 2:
            raise ValueError("packed multiplication needs characteristic 2")
        mod = sum(c << i for i, c in enumerate(self.modulus))
        d = self.degree
        out = 0
        while b:
            if b & 1:
                out ^= a
            b >>= 1
            a <<= 1
            if a >> d & 1:
                a ^= mod
        return out

    def _pow_generic(self, a: int, n: int) -> int:
        out, base = 1, a
        while n:
            if n & 1:
                out = self.mul_generic(out, base)
            base = self.mul_generic(base, base)
            n >>= 1
        return out

    # ---- tables ------------------------------------------------------------

    def _build_tables(self) -> None:
        n = self.order
        self.has_tables = n <= TABLE_CAP
        if not self.has_tables:
            return
        g = self._primitive_element()
        self.generator = g
        exp = [0] * (2 * (n - 1) + 1)
        log = [0] * n
        x = 1
        step = self.mul_packed if self.p == 2 else self.mul_generic
        for i in range(n - 1):
            exp[i] = x
            log[x] = i
            x = step(x, g)
        for i in range(n - 1, len(exp)):
            exp[i] = exp[i - (n - 1)]
        self._exp, self._log = exp, log
        self.exp_arr = np.array(exp, dtype=np.int64)
        self.log_arr = np.array(log, dtype=np.int64)
        digits = np.array([[(a // self._pw[i]) % self.p for i in range(self.degree)] for a in range(n)], dtype=np.int64)
        pw = np.array(self._pw[: self.degree], dtype=np.int64)
        self.neg_arr = (((-digits) % self.p) * pw).sum(axis=1)
        self._neg = self.neg_arr.tolist()
        self._add_arr = None
        if self.p != 2 and n <= _ADD_TABLE_CAP:
            self._add_arr = (((digits[:, None, :] + digits[None, :, :]) % self.p) * pw).sum(axis=2)

    def _primitive_element(self) -> int:
        n = self.order - 1
        if n == 1:
            return 1
        factors = _prime_factors(n)
        for g in range(2, self.order):
            if all(self._pow_generic(g, n // f) != 1 for f in factors):
                return g
        raise AssertionError("no primitive element")

    def _find_sub_root(self) -> int:
        """Smallest-encoded root in the top field of the subfield modulus."""
        for b in range(self.order):
            acc = 0
            for c in reversed(self.sub_modulus):
                acc = self.add(self.mul(acc, b), c % self.p)
            if acc == 0:
                return b
        raise AssertionError("subfield modulus has no root in the top field")

    # ---- scalar arithmetic -------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self._add_arr is not None:
            return int(self._add_arr[a, b])
        p, out = self.p, 0
        for pw in self._pw[: self.degree]:
            out += (((a // pw) + (b // pw)) % p) * pw
        return out

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        if self.has_tables:
            return self._neg[a]
        return self.from_coeffs([-c for c in self.coeffs(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.has_tables:
            return self._exp[self._log[a] + self._log[b]]
        return self.mul_packed(a, b) if self.p == 2 else self.mul_generic(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        if self.has_tables:
            return self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)]
        return self._pow_generic(a, self.order - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            return self.pow(self.inv(a), -n)
        if a == 0:
            return 1 if n == 0 else 0
        if self.has_tables:
            return self._exp[(self._log[a] * n) % (self.order - 1)]
        return self._pow_generic(a, n)

    def frob(self, a: int, i: int = 1) -> int:
        """a ** (q ** i); the exponent is reduced mod t."""
        return self.pow(a, self.q ** (i % self.t))

    def trace(self, a: int) -> int:
        """Relative trace GF(q^t) -> GF(q)."""
        out, x = 0, a
        for _ in range(self.t):
            out = self.add(out, x)
            x = self.frob(x)
        return out

    def norm(self, a: int) -> int:
        """Relative norm GF(q^t) -> GF(q)."""
        return self.pow(a, (self.order - 1) // (self.q - 1))

    def sub_trace(self, a: int, s: int) -> int:
        """Trace from GF(q^s) down to GF(q), for ``a`` in GF(q^s) and s | t."""
        out, x = 0, a
        for _ in range(s):
            out = self.add(out, x)
            x = self.frob(x)
        return out

    def in_subfield(self, a: int) -> bool:
        return a in self._sub_set

    def in_level(self, a: int, s: int) -> bool:
        """Membership of ``a`` in the intermediate field GF(q^s)."""
        return self.frob(a, s) == a if s < self.t else True

    def embed(self, sub_coeffs: Sequence[int]) -> int:
        """GF(q) element with GF(p)-coefficients ``sub_coeffs`` in the basis of powers of beta."""
        out, bp = 0, 1
        for c in sub_coeffs:
            out = self.add(out, self.mul(c % self.p, bp))
            bp = self.mul(bp, self.beta)
        return out

    # ---- GF(q)-expansion over (1, xi, ..., xi^(t-1)) --------------------------

    def subfield_elements(self) -> list[int]:
        return sorted(self._sub_set)

    def _expansion(self) -> np.ndarray:
        if self._expand_table is None:
            if self.order > TABLE_CAP:
                raise EnumerationCapError("expansion table needs q^t <= 2^16")
            basis = [self.pow(self.xi, k) for k in range(self.t)]
            sub = self.subfield_elements()
            table = np.full((self.order, self.t), -1, dtype=np.int64)
            for cs in itertools.product(sub, repeat=self.t):
                acc = 0
                for c, b in zip(cs, basis):
                    acc = self.add(acc, self.mul(c, b))
                table[acc] = cs
            if (table < 0).any():
                raise AssertionError("power basis of xi does not span the top field over GF(q)")
            self._expand_table = table
        return self._expand_table

    def expand(self, a: int) -> tuple[int, ...]:
        """GF(q)-coordinates of ``a`` in the power basis of xi."""
        return tuple(int(x) for x in self._expansion()[a])

    def vexpand(self, a: np.ndarray) -> np.ndarray:
        return self._expansion()[np.asarray(a)]

    def combine(self, cs: Sequence[int]) -> int:
        acc, b = 0, 1
        for c in cs:
            acc = self.add(acc, self.mul(c, b))
            b = self.mul(b, self.xi)
        return acc

    # ---- vectorized arithmetic -----------------------------------------------

    def _require_tables(self):
        if not self.has_tables:
            raise EnumerationCapError("array arithmetic needs q^t <= 2^16")

    def vadd(self, a, b):
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        if self._add_arr is not None:
            return self._add_arr[a, b]
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for pw in self._pw[: self.degree]:
            out += (((a // pw) + (b // pw)) % self.p) * pw
        return out

    def vneg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return a
        self._require_tables()
        return self.neg_arr[a]

    def vsub(self, a, b):
        return self.vadd(a, self.vneg(b))

    def vmul(self, a, b):
        self._require_tables()
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        out = self.exp_arr[self.log_arr[a] + self.log_arr[b]]
        out[(a == 0) | (b == 0)] = 0
        return out

    def vinv(self, a):
        self._require_tables()
        a = np.asarray(a, dtype=np.int64)
        if (a == 0).any():
            raise ZeroDivisionError("inverse of zero in a finite field")
        return self.exp_arr[(self.order - 1 - self.log_arr[a]) % (self.order - 1)]

    def vpow(self, a, n: int):
        self._require_tables()
        a = np.asarray(a, dtype=np.int64)
        if n == 0:
            return np.ones_like(a)
        out = self.exp_arr[(self.log_arr[a] * n) % (self.order - 1)]
        out[a == 0] = 0
        return out

    def vfrob(self, a, i: int = 1):
        return self.vpow(a, self.q ** (i % self.t))

    def vsum(self, a, axis: int = 0):
        """Field sum along ``axis``."""
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return np.bitwise_xor.reduce(a, axis=axis)
        a = np.moveaxis(a, axis, 0)
        out = np.zeros(a.shape[1:], dtype=np.int64)
        for row in a:
            out = self.vadd(out, row)
        return out

    # ---- elements --------------------------------------------------------------

    def element(self, value, level: str | None = None) -> "FieldElement":
        if isinstance(value, (list, tuple)):
            value = self.from_coeffs(value)
        value = self.check(int(value))
        if level is None:
            level = SUB if value in self._sub_set else TOP
        return FieldElement(self, value, level)

    def level_size(self, level: str) -> int:
        if level not in LEVELS:
            raise ValueError(f"unknown level {level!r}")
        return self.q if level == SUB else self.order


@functools.lru_cache(maxsize=None)
def _cached_tower(p, e, t, modulus, sub_modulus):
    return FieldTower(p, e, t, modulus=modulus, sub_modulus=sub_modulus)


def get_tower(p: int, e: int = 1, t: int = 1, modulus="auto", sub_modulus="auto") -> FieldTower:
    """Shared, immutable tower instance for the given parameters."""
    if not isinstance(modulus, str):
        modulus = tuple(modulus)
    if not isinstance(sub_modulus, str):
        sub_modulus = tuple(sub_modulus)
    return _cached_tower(p, e, t, modulus, sub_modulus)


# --------------------------------------------------------------------------
# element wrapper
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FieldElement:
    """An element of the top field tagged with the tower level it is asserted to lie in.

    Arithmetic results are tagged ``"q"`` only when every operand is, which
    never over-claims membership; :meth:`is_subfield` gives the exact answer.
    """

    tower: FieldTower
    value: int
    level: str = TOP

    def __post_init__(self):
        if self.level not in LEVELS:
            raise ValueError(f"unknown level {self.level!r}")
        if self.level == SUB and not self.tower.in_subfield(self.value):
            raise ValueError(f"element {self.coeffs} tagged GF(q) does not satisfy x^q = x")

    @property
    def coeffs(self) -> list[int]:
        return self.tower.coeffs(self.value)

    def is_subfield(self) -> bool:
        return self.tower.in_subfield(self.value)

    def _other(self, other) -> "FieldElement":
        if isinstance(other, int):
            return self.tower.element(self.tower.from_coeffs([other]))
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.tower != self.tower:
            raise TowerMismatchError(f"cannot combine elements of {self.tower!r} and {other.tower!r}")
        return other

    def _lvl(self, *others) -> str:
        return SUB if all(x.level == SUB for x in (self, *others)) else TOP

    def _new(self, value, level):
        return FieldElement(self.tower, value, level)

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self._new(self.tower.add(self.value, o.value), self._lvl(o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self._new(self.tower.sub(self.value, o.value), self._lvl(o))

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self._new(self.tower.mul(self.value, o.value), self._lvl(o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __neg__(self):
        return self._new(self.tower.neg(self.value), self.level)

    def __pow__(self, n: int):
        return self._new(self.tower.pow(self.value, n), self.level)

    def inverse(self) -> "FieldElement":
        return self._new(self.tower.inv(self.value), self.level)

    def frobenius(self, i: int = 1) -> "FieldElement":
        return self._new(self.tower.frob(self.value, i), self.level)

    def trace(self) -> "FieldElement":
        return self._new(self.tower.trace(self.value), SUB)

    def norm(self) -> "FieldElement":
        return self._new(self.tower.norm(self.value), SUB)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.tower == other.tower and self.value == other.value
        if isinstance(other, int):
            return self.value == self.tower.from_coeffs([other])
        return NotImplemented

    def __hash__(self):
        return hash((self.tower, self.value))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"FieldElement({self.coeffs}, level={self.level!r})"


def arith(a: FieldElement, b: FieldElement | None, op: str) -> FieldElement:
    """Dispatch one of ``add``, ``mul``, ``inv``, ``neg``, ``pow`` (``b`` is an int exponent for pow)."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inverse()
    if op == "neg":
        return -a
    if op == "pow":
        return a ** int(b)
    raise ValueError(f"unknown operation {op!r}")


def frobenius(a: FieldElement, i: int) -> FieldElement:
    return a.frobenius(i)


def trace(a: FieldElement) -> FieldElement:
    return a.trace()


def norm(a: FieldElement) -> FieldElement:
    return a.norm()


def enumerate_field(tower: FieldTower, level: str = TOP, cap: int = ENUMERATION_CAP) -> Iterator[FieldElement]:
    """Every element of GF(q) or GF(q^t) once, lexicographic on coefficient lists."""
    size = tower.level_size(level)
    if size > cap:
        raise EnumerationCapError(f"enumerating {size} elements exceeds the cap of {cap}")
    values = tower.subfield_elements() if level == SUB else range(tower.order)
    for v in sorted(values, key=tower.coeffs):
        yield FieldElement(tower, v, SUB if level == SUB else (SUB if tower.in_subfield(v) else TOP))
