import numpy as np
import pytest

from rsrde.galois import RsCode, encode


@pytest.fixture(scope="session")
def rs15():
    return RsCode.create(15, 9)


@pytest.fixture(scope="session")
def rs31():
    return RsCode.create(31, 25)


@pytest.fixture(scope="session")
def rs255():
    return RsCode.create(255, 239)


def corrupt(code, rng, v, e):
    """Random codeword plus a received word with ``v`` errors outside ``e``
    erased positions. Returns ``(codeword, received, erasures)``."""
    cw = encode(rng.integers(0, code.field.m, code.k), code)
    pos = rng.permutation(code.n)[: v + e]
    err, era = pos[:v], pos[v:]
    r = cw.copy()
    r[err] ^= rng.integers(1, code.field.m, v)
    # erased symbols may hold anything
    r[era] = rng.integers(0, code.field.m, e)
    return cw, r, era
