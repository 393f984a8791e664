"""Arimoto's alternating iteration for the rate-distortion exponent.

For a source letter distribution ``p`` and parameters ``s >= 0``, ``t <= 0``
the iteration alternates

    w[j, k] ∝ q[k] 2^(t delta[j, k])                       (normalised over k)
    q[k]    ∝ (sum_j p[j] 2^(-s t delta[j, k]) w[j, k]^(1+s))^(1/(1+s))

and the fixed point yields the exponent, rate and distortion (all in bits)
through the tilted source ``p~[j] ∝ p[j] (sum_k q[k] 2^(t delta[j, k]))^-s``.

For independent, non-identical components the iteration factorises: each
position is run on its own and F, R and D add up. Everything is done in the
log domain so that large ``|t|`` or ``s`` cannot underflow.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

LN2 = np.log(2.0)
PROB_FLOOR = 1e-300


class ArimotoConvergenceError(RuntimeError):
    def __init__(self, message, position=None, iterations=None):
        super().__init__(message)
        self.position = position
        self.iterations = iterations


@dataclass(frozen=True)
class RdeParams:
    s: float
    t: float
    tol: float = 1e-12
    max_iter: int = 100_000

    def __post_init__(self):
        if not self.s >= 0.0:
            raise ValueError(f"s must be nonnegative, got {self.s}")
        if not self.t <= 0.0:
            raise ValueError(f"t must be nonpositive, got {self.t}")


@dataclass(frozen=True, eq=False)
class RdePoint:
    """One point of the exponent surface, unnormalised (summed over positions).

    ``Q[i]`` is the reproduction distribution at position ``i``; ``W[i, j, k]``
    the test channel and ``p_tilde[i]`` the tilted source. ``F_i``, ``R_i`` and
    ``D_i`` keep the per-position contributions.
    """

    s: float
    t: float
    F: float
    R: float
    D: float
    Q: np.ndarray = field(repr=False)
    W: np.ndarray = field(repr=False)
    p_tilde: np.ndarray = field(repr=False)
    F_i: np.ndarray = field(repr=False)
    R_i: np.ndarray = field(repr=False)
    D_i: np.ndarray = field(repr=False)
    iterations: int = 0


def _lse(a, axis):
    m = np.max(a, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(a - m), axis=axis, keepdims=True)) + m
    return np.squeeze(out, axis=axis)


def _log_rows(P):
    P = np.atleast_2d(np.asarray(P, dtype=float))
    return np.log(np.maximum(P, PROB_FLOOR))


def _log_w(logq, tdl):
    # logq: (G, K); tdl: (J, K) holding t * delta * ln 2
    a = logq[:, None, :] + tdl[None, :, :]
    lz = _lse(a, axis=2)
    return a - lz[:, :, None], lz


def _log_q_update(logP, logw, tdl, s):
    a = logP[:, :, None] - s * tdl[None, :, :] + (1.0 + s) * logw
    lq = _lse(a, axis=1) / (1.0 + s)
    return lq - _lse(lq, axis=1)[:, None]


def arimoto_step(p_vec, delta, s, t, q_prev):
    """One update ``q -> (q_next, w)`` for a single source component."""
    delta = np.asarray(delta, dtype=float)
    q_prev = np.asarray(q_prev, dtype=float)
    if np.any(q_prev <= 0) or not np.isclose(q_prev.sum(), 1.0):
        raise ValueError("q_prev must be an all-positive probability vector")
    tdl = t * delta * LN2
    logw, _ = _log_w(np.log(q_prev)[None, :], tdl)
    lq = _log_q_update(_log_rows(p_vec), logw, tdl, s)
    return np.exp(lq[0]), np.exp(logw[0])


def iterate_rows(P, delta, s, t, tol=1e-12, max_iter=100_000, q0=None):
    """Run the iteration on every row of ``P`` at once.

    Returns ``(log_q, iterations)``. Raises :class:`ArimotoConvergenceError`
    naming the first row still moving after ``max_iter`` steps.
    """
    delta = np.asarray(delta, dtype=float)
    logP = _log_rows(P)
    G = logP.shape[0]
    K = delta.shape[1]
    tdl = t * delta * LN2
    if q0 is None:
        lq = np.full((G, K), -np.log(K))
    else:
        lq = np.log(np.broadcast_to(np.asarray(q0, dtype=float), (G, K)))
    q = np.exp(lq)
    for it in range(1, max_iter + 1):
        logw, _ = _log_w(lq, tdl)
        lq = _log_q_update(logP, logw, tdl, s)
        q_new = np.exp(lq)
        change = np.max(np.abs(q_new - q), axis=1)
        q = q_new
        if np.all(change < tol):
            return lq, it
    bad = int(np.argmax(change >= tol))
    raise ArimotoConvergenceError(
        f"no convergence after {max_iter} iterations (s={s}, t={t}, row {bad})",
        position=bad, iterations=max_iter)


def evaluate_rows(P, delta, s, t, log_q):
    """Exponent, rate and distortion per row from a (converged) ``log_q``.

    Returns ``(F_i, R_i, D_i, W, p_tilde)``.
    """
    delta = np.asarray(delta, dtype=float)
    logP = _log_rows(P)
    tdl = t * delta * LN2
    logw, lz = _log_w(log_q, tdl)
    lpt = logP - s * lz
    lpt = lpt - _lse(lpt, axis=1)[:, None]
    pt = np.exp(lpt)
    F = np.sum(pt * (lpt - logP), axis=1) / LN2
    ljoint = lpt[:, :, None] + logw
    joint = np.exp(ljoint)
    lmarg = _lse(ljoint, axis=1)
    with np.errstate(invalid="ignore"):
        rterm = np.where(joint > 0, joint * (logw - lmarg[:, None, :]), 0.0)
    R = np.sum(rterm, axis=(1, 2)) / LN2
    D = np.sum(joint * delta[None, :, :], axis=(1, 2))
    # clip round-off below zero; both are nonnegative quantities
    return np.maximum(F, 0.0), np.maximum(R, 0.0), D, np.exp(logw), pt


def arimoto_rde_single(p_vec, delta, params: RdeParams) -> RdePoint:
    p_vec = np.asarray(p_vec, dtype=float)
    if p_vec.ndim != 1 or np.any(p_vec < 0) or not np.isclose(p_vec.sum(), 1.0):
        raise ValueError("p_vec must be a probability vector")
    P = p_vec[None, :]
    lq, it = iterate_rows(P, delta, params.s, params.t, params.tol, params.max_iter)
    F, R, D, W, pt = evaluate_rows(P, delta, params.s, params.t, lq)
    return RdePoint(params.s, params.t, float(F[0]), float(R[0]), float(D[0]),
                    np.exp(lq), W, pt, F, R, D, it)


def source_rows(model) -> np.ndarray:
    """``P`` matrix of an :class:`ErrorPatternModel` or a plain array."""
    P = getattr(model, "P", model)
    P = np.atleast_2d(np.asarray(P, dtype=float))
    if np.any(P < 0) or np.any(np.abs(P.sum(axis=1) - 1.0) > 1e-9):
        raise ValueError("source rows must be probability vectors")
    return P


def unique_rows(P, grid=1e-12):
    """Distinct rows of ``P`` up to a ``grid`` quantisation.

    Returns ``(representatives, inverse)`` with ``P ≈ representatives[inverse]``.
    Representatives come in lexicographic order of their quantised keys.
    """
    key = np.round(P / grid).astype(np.int64)
    order = np.lexsort(key.T[::-1])
    ks = key[order]
    start = np.ones(len(order), dtype=bool)
    start[1:] = np.any(ks[1:] != ks[:-1], axis=1)
    group = np.cumsum(start) - 1
    inverse = np.empty(len(order), dtype=np.int64)
    inverse[order] = group
    return P[order[start]], inverse


def factored_rde(model, delta, params: RdeParams) -> RdePoint:
    """Exponent of an independent non-identical source, position by position."""
    P = source_rows(model)
    reps, inv = unique_rows(P)
    try:
        lq, it = iterate_rows(reps, delta, params.s, params.t, params.tol, params.max_iter)
    except ArimotoConvergenceError as exc:
        pos = int(np.flatnonzero(inv == exc.position)[0])
        raise ArimotoConvergenceError(
            f"position {pos}: {exc}", position=pos, iterations=exc.iterations) from None
    F, R, D, W, pt = evaluate_rows(reps, delta, params.s, params.t, lq)
    Ft, Rt, Dt = weighted_totals(inv, F, R, D)
    return RdePoint(params.s, params.t, Ft, Rt, Dt, np.exp(lq)[inv], W[inv], pt[inv],
                    F[inv], R[inv], D[inv], it)


def weighted_totals(inverse, *values):
    """Sum per-group values weighted by group multiplicity.

    Groups are reduced in a fixed order, and a source of identical rows gives
    exactly ``N * value``.
    """
    counts = np.bincount(inverse).astype(float)
    return tuple(float(np.dot(counts, v)) for v in values)
