"""Channel models and the soft information derived from them.

Two channels are supported: the m-ary symmetric channel (m-SC) and binary
antipodal signalling over AWGN. Both produce a :class:`ReliabilityMatrix`
(symbol posteriors per codeword position) which :func:`build_error_model`
turns into the top-``ell`` error-pattern source used by the exponent
machinery.

BPSK convention: bit 0 -> +1, bit 1 -> -1; symbol ``a`` expands to bits
``(a >> 0) & 1, (a >> 1) & 1, ...`` (little-endian over the polynomial basis).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MscChannel:
    p: float
    m: int

    def __post_init__(self):
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"p must lie in (0, 1], got {self.p}")
        if self.m < 2:
            raise ValueError("alphabet size must be at least 2")
        if not self.p > (1.0 - self.p) / (self.m - 1):
            raise ValueError("need p > (1-p)/(m-1) so the received symbol is the hard decision")

    @property
    def cross_prob(self) -> float:
        return (1.0 - self.p) / (self.m - 1)


@dataclass(frozen=True)
class AwgnBpskChannel:
    """BPSK over AWGN at ``snr_db`` = Eb/N0 per information bit.

    Coded bits carry unit energy, so Eb = 1/rate and the per-dimension
    noise variance is ``1 / (2 * rate * 10**(snr_db/10))``.
    """

    snr_db: float
    bits_per_symbol: int
    rate: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.rate <= 1.0:
            raise ValueError("code rate must lie in (0, 1]")
        if self.bits_per_symbol < 1:
            raise ValueError("bits_per_symbol must be positive")

    @property
    def noise_variance(self) -> float:
        if math.isinf(self.snr_db) and self.snr_db > 0:
            return 0.0
        return 1.0 / (2.0 * self.rate * 10.0 ** (self.snr_db / 10.0))


@dataclass(frozen=True, eq=False)
class ReliabilityMatrix:
    """``pi[i, a] = Pr(c_i = a | r_i)``; ``ranking[i]`` lists symbols by
    decreasing posterior (ties: lower symbol first)."""

    pi: np.ndarray
    ranking: np.ndarray

    @classmethod
    def from_posteriors(cls, pi) -> "ReliabilityMatrix":
        pi = np.asarray(pi, dtype=float)
        ranking = np.argsort(-pi, axis=1, kind="stable")
        return cls(pi, ranking)

    @property
    def n(self) -> int:
        return self.pi.shape[0]

    @property
    def m(self) -> int:
        return self.pi.shape[1]

    def hard_decision(self) -> np.ndarray:
        return self.ranking[:, 0].copy()


@dataclass(frozen=True, eq=False)
class ErrorPatternModel:
    """Independent non-identical source over ``{0, 1, ..., ell}``.

    ``P[i, j]`` (j >= 1) is the posterior of the j-th most likely symbol at
    position ``i`` and ``P[i, 0]`` the probability that none of the top
    ``ell`` is correct. Rows are stored in codeword order;
    ``position_order`` lists positions from least to most reliable.
    ``ranked[i, j-1]`` is the symbol that letter ``j`` stands for.
    """

    ell: int
    P: np.ndarray
    position_order: np.ndarray
    ranked: np.ndarray

    @property
    def n(self) -> int:
        return self.P.shape[0]


def symbol_bits(m: int, b: int) -> np.ndarray:
    """``(m, b)`` 0/1 matrix, little-endian bit expansion of every symbol."""
    sym = np.arange(m)[:, None]
    return (sym >> np.arange(b)[None, :]) & 1


def bpsk_modulate(codeword, b: int) -> np.ndarray:
    cw = np.asarray(codeword, dtype=np.int64)
    bits = (cw[:, None] >> np.arange(b)[None, :]) & 1
    return (1.0 - 2.0 * bits).reshape(-1)


def transmit_msc(codeword, channel: MscChannel, rng: np.random.Generator) -> np.ndarray:
    cw = np.asarray(codeword, dtype=np.int64)
    flip = rng.random(cw.shape[0]) >= channel.p
    # uniform over the m-1 other symbols: add a nonzero offset modulo m
    offset = rng.integers(1, channel.m, size=cw.shape[0])
    return np.where(flip, (cw + offset) % channel.m, cw)


def transmit_awgn_bpsk(codeword, channel: AwgnBpskChannel, rng: np.random.Generator) -> np.ndarray:
    x = bpsk_modulate(codeword, channel.bits_per_symbol)
    sigma = math.sqrt(channel.noise_variance)
    return x + sigma * rng.standard_normal(x.shape[0])


def reliability_from_awgn(observations, channel: AwgnBpskChannel) -> ReliabilityMatrix:
    """Symbol posteriors as the normalised product of per-bit posteriors."""
    b = channel.bits_per_symbol
    y = np.asarray(observations, dtype=float)
    if y.ndim != 1 or y.shape[0] % b:
        raise ValueError(f"observation length must be a multiple of {b}")
    y = y.reshape(-1, b)
    signs = 1.0 - 2.0 * symbol_bits(1 << b, b)
    corr = y @ signs.T
    var = channel.noise_variance
    if var == 0.0:
        best = corr == corr.max(axis=1, keepdims=True)
        pi = best / best.sum(axis=1, keepdims=True)
    else:
        # log p(y | +-1) = const +- y / var, summed over bits
        loglik = corr / var
        loglik -= loglik.max(axis=1, keepdims=True)
        pi = np.exp(loglik)
        pi /= pi.sum(axis=1, keepdims=True)
    return ReliabilityMatrix.from_posteriors(pi)


def reliability_from_msc(received, channel: MscChannel) -> ReliabilityMatrix:
    r = np.asarray(received, dtype=np.int64)
    pi = np.full((r.shape[0], channel.m), channel.cross_prob)
    pi[np.arange(r.shape[0]), r] = channel.p
    return ReliabilityMatrix.from_posteriors(pi)


def build_error_model(rel: ReliabilityMatrix, ell: int) -> ErrorPatternModel:
    if not 1 <= ell < rel.m:
        raise ValueError(f"need 1 <= ell < {rel.m}, got {ell}")
    ranked = np.ascontiguousarray(rel.ranking[:, :ell])
    top = np.take_along_axis(rel.pi, ranked, axis=1)
    P = np.empty((rel.n, ell + 1))
    P[:, 1:] = top
    # summing the tail keeps precision when the top posterior is close to 1
    rest = np.take_along_axis(rel.pi, rel.ranking[:, ell:], axis=1)
    P[:, 0] = rest.sum(axis=1)
    order = np.argsort(P[:, 1], kind="stable")
    return ErrorPatternModel(ell, P, order, ranked)


def error_pattern(codeword, model: ErrorPatternModel) -> np.ndarray:
    """Letter of the source at each position: j if the j-th ranked symbol is
    the transmitted one, 0 if none of the top ``ell`` is."""
    cw = np.asarray(codeword, dtype=np.int64)
    hit = model.ranked == cw[:, None]
    x = np.where(hit.any(axis=1), hit.argmax(axis=1) + 1, 0)
    return x.astype(np.int8)
