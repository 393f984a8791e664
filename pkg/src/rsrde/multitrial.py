"""Erasure-pattern sets and the multiple-trial decoder built on them.

A pattern holds one letter per codeword position: 0 erases the position,
``k >= 1`` decodes with the k-th most likely symbol. Deterministic sets
(plain hard decision, GMD, SED) depend only on the reliability order; random
sets are drawn from the per-position reproduction distribution ``Q``.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field

import numpy as np

from .channels import AwgnBpskChannel, ErrorPatternModel, MscChannel, bpsk_modulate
from .galois import RsCode, decode_patterns

RESAMPLE_RETRIES = 32


@dataclass(frozen=True, eq=False)
class ErasurePatternSet:
    patterns: np.ndarray
    strategy: str
    params: dict = field(default_factory=dict)
    rng_seed: object = None

    def __post_init__(self):
        pats = np.ascontiguousarray(self.patterns, dtype=np.int8)
        if pats.ndim != 2:
            raise ValueError("patterns must be a 2-d array")
        pats.setflags(write=False)
        object.__setattr__(self, "patterns", pats)

    def __len__(self):
        return self.patterns.shape[0]

    @property
    def n(self) -> int:
        return self.patterns.shape[1]


@dataclass(frozen=True, eq=False)
class CandidateList:
    """Distinct decoded codewords, in the order of the first pattern that
    produced each."""

    words: np.ndarray
    pattern_index: np.ndarray

    def __len__(self):
        return self.words.shape[0]

    def contains(self, codeword) -> bool:
        return bool(np.any(np.all(self.words == np.asarray(codeword)[None, :], axis=1)))


def _erase(order, n, counts):
    pats = np.ones((len(counts), n), dtype=np.int8)
    for a, e in enumerate(counts):
        pats[a, order[:e]] = 0
    return pats


def hd_patterns(model: ErrorPatternModel) -> ErasurePatternSet:
    """The single all-ones pattern: conventional hard-decision decoding."""
    return ErasurePatternSet(np.ones((1, model.n), dtype=np.int8), "HD")


def gmd_patterns(model: ErrorPatternModel, code: RsCode) -> ErasurePatternSet:
    """Erase 0, 2, 4, ... least reliable positions, stopping below d_min."""
    d = code.d_min
    top = d - 1 if d % 2 else d - 2
    counts = list(range(0, top + 1, 2))
    return ErasurePatternSet(_erase(model.position_order, model.n, counts), "GMD")


@functools.lru_cache(maxsize=16)
def _sed_keep(l: int, f: int) -> np.ndarray:
    # (count, l) letters over the l least reliable positions, 0 = erased
    rows = []
    for size in range(0, f + 1, 2):
        for combo in itertools.combinations(range(l), size):
            row = np.ones(l, dtype=np.int8)
            row[list(combo)] = 0
            rows.append(row)
    out = np.array(rows, dtype=np.int8).reshape(-1, l)
    out.setflags(write=False)
    return out


def sed_patterns(model: ErrorPatternModel, l: int, f: int) -> ErasurePatternSet:
    """Every even-size subset (at most f) of the l least reliable positions."""
    if not (0 <= f <= l <= model.n) or f % 2:
        raise ValueError(f"need even f <= l <= n, got l={l}, f={f}")
    keep = _sed_keep(l, f)
    pats = np.ones((keep.shape[0], model.n), dtype=np.int8)
    pats[:, model.position_order[:l]] = keep
    return ErasurePatternSet(pats, "SED", {"l": l, "f": f})


def _letters(u, cdf):
    # u: (count, N), cdf: (N, K) -> smallest k with u < cdf[:, k]
    k = (u[:, :, None] >= cdf[None, :, :]).sum(axis=2)
    return np.minimum(k, cdf.shape[1] - 1).astype(np.int8)


def sample_patterns(Q, count: int, rng_seed, model: ErrorPatternModel,
                    d_min: int | None = None, strategy: str = "RDE",
                    retries: int = RESAMPLE_RETRIES) -> ErasurePatternSet:
    """``count`` patterns with independent letters per position drawn from ``Q``.

    ``Q`` rows are in codeword order. With ``d_min`` given, patterns erasing
    ``d_min`` or more positions are redrawn up to ``retries`` times and then
    trimmed to their ``d_min - 1`` least reliable erasures.
    ``rng_seed`` is anything :func:`numpy.random.default_rng` accepts.
    """
    Q = np.asarray(Q, dtype=float)
    if Q.shape[0] != model.n:
        raise ValueError(f"Q must have {model.n} rows")
    if np.any(Q < -1e-12) or np.any(np.abs(Q.sum(axis=1) - 1.0) > 1e-9):
        raise ValueError("rows of Q must be probability vectors")
    rng = np.random.default_rng(rng_seed)
    cdf = np.cumsum(Q, axis=1)
    pats = _letters(rng.random((count, model.n)), cdf)
    if d_min is not None:
        for _ in range(retries):
            bad = np.flatnonzero((pats == 0).sum(axis=1) >= d_min)
            if bad.size == 0:
                break
            pats[bad] = _letters(rng.random((bad.size, model.n)), cdf)
        bad = np.flatnonzero((pats == 0).sum(axis=1) >= d_min)
        if bad.size:
            order = model.position_order
            for a in bad:
                zeros = order[pats[a, order] == 0]
                pats[a, zeros[d_min - 1:]] = 1
    return ErasurePatternSet(pats, strategy, {"count": count}, rng_seed)


def run_attempts(ranked, pattern_set: ErasurePatternSet, code: RsCode) -> CandidateList:
    """Decode once per pattern and collect the distinct successes."""
    words, ok = decode_patterns(ranked, pattern_set.patterns, code)
    idx = np.flatnonzero(ok)
    if idx.size == 0:
        return CandidateList(np.zeros((0, code.n), dtype=np.int64), idx)
    rows = np.ascontiguousarray(words[idx])
    keys = rows.view(np.dtype((np.void, rows.dtype.itemsize * rows.shape[1]))).ravel()
    _, first = np.unique(keys, return_index=True)
    keep = idx[np.sort(first)]
    return CandidateList(words[keep], keep)


def ml_select(candidates: CandidateList, observations, channel):
    """Most likely candidate, or None for an empty list.

    AWGN/BPSK: smallest squared Euclidean distance to the observations.
    m-SC: smallest Hamming distance to the received word. Ties keep the
    candidate from the earliest pattern.
    """
    if len(candidates) == 0:
        return None
    obs = np.asarray(observations)
    if isinstance(channel, AwgnBpskChannel):
        b = channel.bits_per_symbol
        x = bpsk_modulate(candidates.words.reshape(-1), b).reshape(len(candidates), -1)
        cost = np.sum((obs[None, :] - x) ** 2, axis=1)
    elif isinstance(channel, MscChannel):
        cost = np.sum(candidates.words != obs[None, :], axis=1)
    else:
        raise TypeError(f"unsupported channel {type(channel).__name__}")
    return candidates.words[int(np.argmin(cost))]


def min_distortion(x, pattern_set: ErasurePatternSet, delta) -> float:
    """min over patterns of sum_i delta[x_i, x_hat_i]."""
    x = np.asarray(x, dtype=np.int64)
    delta = np.asarray(delta, dtype=float)
    if x.shape[0] != pattern_set.n:
        raise ValueError("error pattern and erasure patterns differ in length")
    return float(delta[x[None, :], pattern_set.patterns].sum(axis=1).min())


def write_patterns(pattern_set: ErasurePatternSet, handle) -> None:
    """One pattern per line, one digit per letter."""
    if pattern_set.patterns.size and pattern_set.patterns.max() > 9:
        raise ValueError("the text format holds letters 0-9 only")
    for row in pattern_set.patterns:
        handle.write("".join(map(str, row.tolist())) + "\n")


def read_patterns(handle, strategy: str = "file") -> ErasurePatternSet:
    rows = [line.strip() for line in handle if line.strip()]
    if not rows:
        raise ValueError("no patterns found")
    if len({len(r) for r in rows}) != 1:
        raise ValueError("patterns differ in length")
    pats = np.array([[int(c) for c in r] for r in rows], dtype=np.int8)
    return ErasurePatternSet(pats, strategy)
