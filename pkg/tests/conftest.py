from __future__ import annotations

import itertools

import numpy as np
import pytest

from fingeo.gf import get_tower


def poly_mulmod(a, b, mod, p):
    """Schoolbook product of coefficient lists reduced modulo ``mod`` (oracle)."""
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    d = len(mod) - 1
    for k in range(len(out) - 1, d - 1, -1):
        f = out[k]
        if f:
            for i, m in enumerate(mod):
                out[k - d + i] = (out[k - d + i] - f * m) % p
    out = out[:d] + [0] * max(0, d - len(out))
    return out[:d]


def all_vectors(elements, n):
    return [np.array(v, dtype=np.int64) for v in itertools.product(elements, repeat=n)]


@pytest.fixture(scope="session")
def gf4():
    return get_tower(2, 1, 2)


@pytest.fixture(scope="session")
def gf16():
    return get_tower(2, 1, 4)


@pytest.fixture(scope="session")
def gf2():
    return get_tower(2, 1, 1)


@pytest.fixture(scope="session")
def gf3():
    return get_tower(3, 1, 1)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20261018)
