"""Binary extension fields and Reed-Solomon errors-and-erasures decoding.

Field elements are plain integers in polynomial (bit-vector) representation.
The hot loops (encoding, syndrome evaluation, Berlekamp-Massey, Chien search
and Forney's formula) are compiled with numba so that a frame with a few
hundred decoding attempts costs well under a millisecond.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba as nb
import numpy as np

# Conventional primitive polynomials, keyed by bit width.
PRIMITIVE_POLYNOMIALS = {
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x89,
    8: 0x11D,
    9: 0x211,
    10: 0x409,
}


@dataclass(frozen=True, eq=False)
class Field:
    """GF(2**b) with log/antilog tables.

    ``exp`` has length ``2 * (m - 1)`` so that ``exp[log[a] + log[b]]`` never
    needs a modulo. ``log[0]`` is set to -1 and must never be used.
    """

    b: int
    primitive_polynomial: int
    exp: np.ndarray = field(repr=False)
    log: np.ndarray = field(repr=False)

    @classmethod
    def from_bits(cls, b: int, primitive_polynomial: int | None = None) -> "Field":
        if primitive_polynomial is None:
            if b not in PRIMITIVE_POLYNOMIALS:
                raise ValueError(f"no default primitive polynomial for b={b}")
            primitive_polynomial = PRIMITIVE_POLYNOMIALS[b]
        if primitive_polynomial >> b != 1:
            raise ValueError("primitive polynomial must have degree b")
        m = 1 << b
        exp = np.zeros(2 * (m - 1), dtype=np.int64)
        log = np.full(m, -1, dtype=np.int64)
        x = 1
        for i in range(m - 1):
            if log[x] != -1:
                raise ValueError(f"{primitive_polynomial:#x} is not primitive")
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & m:
                x ^= primitive_polynomial
        exp[m - 1:] = exp[: m - 1]
        exp.setflags(write=False)
        log.setflags(write=False)
        return cls(b, primitive_polynomial, exp, log)

    @property
    def m(self) -> int:
        return 1 << self.b

    def alpha_pow(self, e: int) -> int:
        return int(self.exp[e % (self.m - 1)])

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        nz = (a != 0) & (b != 0)
        out = self.exp[(self.log[np.where(nz, a, 1)] + self.log[np.where(nz, b, 1)])]
        return np.where(nz, out, 0)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in GF(2^b)")
        return int(self.exp[(self.m - 1 - self.log[a]) % (self.m - 1)])

    def div(self, a: int, b: int) -> int:
        return int(self.mul(a, self.inv(b)))

    def poly_eval(self, coeffs, x: int) -> int:
        """Evaluate sum(coeffs[i] * x**i)."""
        acc = 0
        for c in reversed(list(coeffs)):
            acc = int(self.mul(acc, x)) ^ int(c)
        return acc


def clmul_mod(a: int, b: int, poly: int, b_bits: int) -> int:
    """Carry-less product of ``a`` and ``b`` reduced modulo ``poly``.

    Slow reference used to check the tables.
    """
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> b_bits:
            a ^= poly
    return r


@dataclass(frozen=True, eq=False)
class RsCode:
    """Narrow-sense (n, k) Reed-Solomon code over ``field``.

    Codeword position ``i`` carries the coefficient of ``x**i``; the
    generator roots are alpha**1 ... alpha**(n-k). Encoding is systematic
    with the message in positions ``n-k .. n-1``.
    """

    n: int
    k: int
    field: Field
    generator: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        m = self.field.m
        if not 0 < self.k < self.n <= m - 1:
            raise ValueError(f"need 0 < k < n <= {m - 1}, got n={self.n}, k={self.k}")
        g = _generator_poly(self.nroots, self.field.exp, self.field.log)
        g.setflags(write=False)
        object.__setattr__(self, "generator", g)

    @classmethod
    def create(cls, n: int, k: int, b: int | None = None,
               primitive_polynomial: int | None = None) -> "RsCode":
        if b is None:
            b = int(n).bit_length()
        return cls(n, k, Field.from_bits(b, primitive_polynomial))

    @property
    def nroots(self) -> int:
        return self.n - self.k

    @property
    def d_min(self) -> int:
        return self.n - self.k + 1

    @property
    def generator_roots(self) -> np.ndarray:
        return self.field.exp[1: self.nroots + 1].copy()

    def syndromes(self, word) -> np.ndarray:
        word = np.ascontiguousarray(word, dtype=np.int64)
        out = np.zeros(self.nroots, dtype=np.int64)
        _syndromes(word, self.nroots, self.field.exp, self.field.log, out)
        return out

    def is_codeword(self, word) -> bool:
        return not self.syndromes(word).any()


def encode(message, code: RsCode) -> np.ndarray:
    message = np.ascontiguousarray(message, dtype=np.int64)
    if message.shape != (code.k,):
        raise ValueError(f"message must have length {code.k}, got {message.shape}")
    if message.min(initial=0) < 0 or message.max(initial=0) >= code.field.m:
        raise ValueError("message symbols outside the field")
    out = np.zeros(code.n, dtype=np.int64)
    _encode(message, code.generator, code.field.exp, code.field.log, out)
    return out


def decode_errors_erasures(received, erasures, code: RsCode) -> np.ndarray | None:
    """Bounded-distance errors-and-erasures decoding.

    ``erasures`` is any iterable of positions. Returns the unique codeword
    ``c`` with ``2 * d(received, c) + len(erasures) < d_min`` (distance over
    unerased positions), or None when there is no such codeword.
    """
    received = np.ascontiguousarray(received, dtype=np.int64)
    if received.shape != (code.n,):
        raise ValueError(f"received word must have length {code.n}")
    mask = np.zeros(code.n, dtype=np.bool_)
    pos = np.fromiter(erasures, dtype=np.int64)
    if pos.size:
        if pos.min() < 0 or pos.max() >= code.n:
            raise ValueError("erasure position out of range")
        if np.unique(pos).size != pos.size:
            raise ValueError("duplicate erasure positions")
        mask[pos] = True
    out = np.zeros(code.n, dtype=np.int64)
    ok = _decode(received, mask, code.nroots, code.field.exp, code.field.log, out)
    return out if ok else None


def decode_patterns(ranked, patterns, code: RsCode):
    """Run one decoding attempt per erasure pattern.

    ``ranked[i, k-1]`` is the k-th most likely symbol at position ``i``;
    ``patterns[a, i] == 0`` erases position ``i`` in attempt ``a`` and
    ``patterns[a, i] == k`` uses ``ranked[i, k-1]`` as the hard decision.
    Returns ``(words, ok)`` with one row / flag per attempt.
    """
    ranked = np.ascontiguousarray(ranked, dtype=np.int64)
    patterns = np.ascontiguousarray(patterns, dtype=np.int8)
    words = np.zeros((patterns.shape[0], code.n), dtype=np.int64)
    ok = np.zeros(patterns.shape[0], dtype=np.bool_)
    _decode_batch(ranked, patterns, code.nroots, code.field.exp, code.field.log, words, ok)
    return words, ok


# ---------------------------------------------------------------------------
# compiled kernels

@nb.njit(cache=True, nogil=True)
def _mul(a, b, exp, log):
    # branch-free: log[0] == -1 keeps the index in range, the select discards it
    r = exp[log[a] + log[b]]
    return r if (a != 0 and b != 0) else 0


@nb.njit(cache=True, nogil=True)
def _div(a, b, exp, log):
    q = exp.shape[0] // 2
    r = exp[log[a] - log[b] + q]
    return r if a != 0 else 0


@nb.njit(cache=True, nogil=True)
def _poly_eval(p, deg, x, exp, log):
    acc = 0
    for i in range(deg, -1, -1):
        acc = _mul(acc, x, exp, log) ^ p[i]
    return acc


@nb.njit(cache=True)
def _generator_poly(nroots, exp, log):
    g = np.zeros(nroots + 1, dtype=np.int64)
    g[0] = 1
    for j in range(1, nroots + 1):
        root = exp[j]
        # g <- g * (x + root)
        for i in range(j, 0, -1):
            g[i] = g[i - 1] ^ _mul(g[i], root, exp, log)
        g[0] = _mul(g[0], root, exp, log)
    return g


@nb.njit(cache=True, nogil=True)
def _encode(msg, gen, exp, log, out):
    nroots = gen.shape[0] - 1
    k = msg.shape[0]
    rem = np.zeros(nroots, dtype=np.int64)
    # LFSR division of msg(x) * x^nroots by the monic generator
    for i in range(k - 1, -1, -1):
        fb = msg[i] ^ rem[nroots - 1]
        for j in range(nroots - 1, 0, -1):
            rem[j] = rem[j - 1] ^ _mul(fb, gen[j], exp, log)
        rem[0] = _mul(fb, gen[0], exp, log)
    for j in range(nroots):
        out[j] = rem[j]
    for i in range(k):
        out[nroots + i] = msg[i]


@nb.njit(cache=True, nogil=True)
def _syndromes(word, nroots, exp, log, out):
    n = word.shape[0]
    for j in range(nroots):
        lx = j + 1
        acc = 0
        for i in range(n - 1, -1, -1):
            if acc != 0:
                acc = exp[log[acc] + lx]
            acc ^= word[i]
        out[j] = acc


@nb.njit(cache=True, nogil=True)
def _decode(r, erased, nroots, exp, log, out):
    n = r.shape[0]
    q = exp.shape[0] // 2
    e = 0
    for i in range(n):
        if erased[i]:
            e += 1
    if e > nroots:
        return False

    synd = np.zeros(nroots, dtype=np.int64)
    _syndromes(r, nroots, exp, log, synd)
    clean = True
    for j in range(nroots):
        if synd[j] != 0:
            clean = False
            break
    if clean:
        for i in range(n):
            out[i] = r[i]
        return True

    # erasure locator prod (1 + alpha^i x)
    gamma = np.zeros(nroots + 1, dtype=np.int64)
    gamma[0] = 1
    deg = 0
    for i in range(n):
        if erased[i]:
            xi = exp[i % q]
            deg += 1
            for j in range(deg, 0, -1):
                gamma[j] ^= _mul(gamma[j - 1], xi, exp, log)

    # Forney syndromes: coefficients e..nroots-1 of gamma(x) S(x)
    nseq = nroots - e
    seq = np.zeros(nseq, dtype=np.int64)
    for j in range(e, nroots):
        acc = 0
        for i in range(0, e + 1):
            acc ^= _mul(gamma[i], synd[j - i], exp, log)
        seq[j - e] = acc

    # Berlekamp-Massey on the modified syndromes
    c = np.zeros(nseq + 1, dtype=np.int64)
    bpoly = np.zeros(nseq + 1, dtype=np.int64)
    tmp = np.zeros(nseq + 1, dtype=np.int64)
    c[0] = 1
    bpoly[0] = 1
    L = 0
    shift = 1
    bd = 1
    for idx in range(nseq):
        d = seq[idx]
        for i in range(1, L + 1):
            d ^= _mul(c[i], seq[idx - i], exp, log)
        if d == 0:
            shift += 1
            continue
        coef = _div(d, bd, exp, log)
        if 2 * L <= idx:
            for i in range(nseq + 1):
                tmp[i] = c[i]
            for i in range(nseq + 1 - shift):
                c[i + shift] ^= _mul(coef, bpoly[i], exp, log)
            L = idx + 1 - L
            for i in range(nseq + 1):
                bpoly[i] = tmp[i]
            bd = d
            shift = 1
        else:
            for i in range(nseq + 1 - shift):
                c[i + shift] ^= _mul(coef, bpoly[i], exp, log)
            shift += 1

    if 2 * L > nseq:
        return False
    top = 0
    for i in range(nseq + 1):
        if c[i] != 0:
            top = i
    if top != L:
        return False

    # errata locator psi = sigma * gamma
    ndeg = L + e
    psi = np.zeros(ndeg + 1, dtype=np.int64)
    for i in range(L + 1):
        if c[i] == 0:
            continue
        for j in range(e + 1):
            psi[i + j] ^= _mul(c[i], gamma[j], exp, log)

    # evaluator omega = S(x) psi(x) mod x^nroots
    omega = np.zeros(nroots, dtype=np.int64)
    for i in range(nroots):
        acc = 0
        for j in range(min(i, ndeg) + 1):
            acc ^= _mul(psi[j], synd[i - j], exp, log)
        omega[i] = acc

    for i in range(n):
        out[i] = r[i]
    found = 0
    for i in range(n):
        xinv = exp[(q - i % q) % q]
        if _poly_eval(psi, ndeg, xinv, exp, log) != 0:
            continue
        found += 1
        # formal derivative: odd-degree terms only
        dval = 0
        xinv2 = _mul(xinv, xinv, exp, log)
        pw = 1
        for j in range(1, ndeg + 1, 2):
            dval ^= _mul(psi[j], pw, exp, log)
            pw = _mul(pw, xinv2, exp, log)
        if dval == 0:
            return False
        num = _poly_eval(omega, nroots - 1, xinv, exp, log)
        out[i] ^= _div(num, dval, exp, log)
    if found != ndeg:
        return False

    _syndromes(out, nroots, exp, log, synd)
    for j in range(nroots):
        if synd[j] != 0:
            return False
    return True


@nb.njit(cache=True, nogil=True)
def _decode_batch(ranked, patterns, nroots, exp, log, words, ok):
    na, n = patterns.shape
    r = np.zeros(n, dtype=np.int64)
    erased = np.zeros(n, dtype=np.bool_)
    for a in range(na):
        for i in range(n):
            k = patterns[a, i]
            if k == 0:
                erased[i] = True
                r[i] = 0
            else:
                erased[i] = False
                r[i] = ranked[i, k - 1]
        ok[a] = _decode(r, erased, nroots, exp, log, words[a])
