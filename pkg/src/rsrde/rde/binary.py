"""Closed-form exponent for mBM-1 on a binary source.

With the mBM-1 distortion (erase: 1, wrong hard decision: 2, right hard
decision: 0) and a binary component ``Pr(x = 1) = p`` the Arimoto fixed
point is available in closed form. Three regimes occur depending on where
the unconstrained optimum of the reproduction probability lands:

* ``p <= 2^t / (1 + 2^t)``: always erase; D = 1, R = 0, F = 0.
* ``p >= 1 / (1 + 2^(t(2s+1)))``: never erase; R = 0.
* otherwise an interior optimum with ``u = Pr~(x = 1)`` in closed form.

From these follow the maximum exponent reachable with ``2^R`` attempts and
the minimum number of attempts for a target exponent on the m-SC.
All logarithms are base 2; ``N``, ``R``, ``D`` and ``F`` are unnormalised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba as nb
import numpy as np
from scipy.optimize import brentq
from scipy.special import expit

from .arimoto import LN2, PROB_FLOOR, RdePoint, _log_w, source_rows, unique_rows, weighted_totals
from .distortion import mbm_distortion


def _xlog2(x, y):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x > 0, x * np.log2(np.where(x > 0, x, 1.0) / y), 0.0)


def binary_entropy(u, ubar=None):
    """H(u) in bits. ``ubar`` may pass ``1 - u`` computed more accurately."""
    u = np.asarray(u, dtype=float)
    ubar = 1.0 - u if ubar is None else np.asarray(ubar, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.where(u > 0, u * np.log2(np.where(u > 0, u, 1.0)), 0.0) \
            - np.where(ubar > 0, ubar * np.log2(np.where(ubar > 0, ubar, 1.0)), 0.0)
    return h if h.ndim else float(h)


def kl_binary(u, p, ubar=None, pbar=None):
    """D_KL(u || p) in bits between Bernoulli(u) and Bernoulli(p)."""
    u = np.asarray(u, dtype=float)
    p = np.asarray(p, dtype=float)
    ubar = 1.0 - u if ubar is None else np.asarray(ubar, dtype=float)
    pbar = 1.0 - p if pbar is None else np.asarray(pbar, dtype=float)
    d = _xlog2(u, np.maximum(p, PROB_FLOOR)) + _xlog2(ubar, np.maximum(pbar, PROB_FLOOR))
    d = np.maximum(d, 0.0)
    return d if d.ndim else float(d)


@dataclass(frozen=True)
class AnalyticCase:
    case_id: int
    u: float
    q1_star: float
    D: float
    R: float
    F: float


def binary_components(p, pbar, s, t):
    """Vectorised closed form over components with ``Pr(x=1) = p``.

    Returns a dict of arrays: ``case``, ``u``, ``ubar``, ``q1``, ``D``, ``R``, ``F``.
    """
    p = np.asarray(p, dtype=float)
    pbar = np.asarray(pbar, dtype=float)
    lp = np.log(np.maximum(p, PROB_FLOOR))
    lpb = np.log(np.maximum(pbar, PROB_FLOOR))
    c1 = expit(t * LN2)
    case1 = p <= c1
    case2 = ~case1 & (pbar <= expit(t * (2.0 * s + 1.0) * LN2))
    case3 = ~case1 & ~case2

    # interior optimum: log-odds of u are ((s t ln2 + ln p) - ln pbar) / (1 + s)
    z3 = (s * t * LN2 + lp - lpb) / (1.0 + s)
    # never-erase optimum: log-odds of u are 2 t s ln2 + ln p - ln pbar
    z2 = 2.0 * t * s * LN2 + lp - lpb
    z = np.where(case3, z3, np.where(case2, z2, lp - lpb))
    u = expit(z)
    ubar = expit(-z)
    u = np.where(case1, p, u)
    ubar = np.where(case1, pbar, ubar)

    D = np.where(case1, 1.0, np.where(case2, 2.0 * ubar, c1 + ubar))
    R = np.where(case3, binary_entropy(u, ubar) - binary_entropy(c1), 0.0)
    F = np.where(case1, 0.0, kl_binary(u, p, ubar, pbar))
    with np.errstate(divide="ignore", invalid="ignore"):
        q1_3 = (1.0 - c1 - ubar) / (1.0 - 2.0 * c1)
    q1 = np.where(case1, 0.0, np.where(case2, 1.0, q1_3))
    case = np.where(case1, 1, np.where(case2, 2, 3))
    return {"case": case, "u": u, "ubar": ubar, "q1": q1, "D": D,
            "R": np.maximum(R, 0.0), "F": F}


def analytic_mbm1(p: float, s: float, t: float) -> AnalyticCase:
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if s < 0 or t > 0:
        raise ValueError("need s >= 0 and t <= 0")
    c = binary_components(p, 1.0 - p, s, t)
    return AnalyticCase(int(c["case"]), float(c["u"]), float(c["q1"]),
                        float(c["D"]), float(c["R"]), float(c["F"]))


def is_mbm1_binary(model, delta) -> bool:
    P = getattr(model, "P", model)
    delta = np.asarray(delta, dtype=float)
    return np.shape(P)[-1] == 2 and delta.shape == (2, 2) and np.array_equal(delta, mbm_distortion(1))


def closed_form_rde(model, s: float, t: float) -> RdePoint:
    """Same result as the factored Arimoto iteration for mBM-1 on a binary
    source, without iterating."""
    P = source_rows(model)
    if P.shape[1] != 2:
        raise ValueError("closed form needs a binary source (ell = 1)")
    reps, inv = unique_rows(P)
    c = binary_components(reps[:, 1], reps[:, 0], s, t)
    Q = np.column_stack([1.0 - c["q1"], c["q1"]])
    delta = mbm_distortion(1)
    tdl = t * delta * LN2
    with np.errstate(divide="ignore"):
        logw, lz = _log_w(np.log(Q), tdl)
    lpt = np.log(np.maximum(reps, PROB_FLOOR)) - s * lz
    pt = np.exp(lpt - np.log(np.sum(np.exp(lpt - lpt.max(axis=1, keepdims=True)), axis=1,
                                    keepdims=True)) - lpt.max(axis=1, keepdims=True))
    Ft, Rt, Dt = weighted_totals(inv, c["F"], c["R"], c["D"])
    return RdePoint(s, t, Ft, Rt, Dt, Q[inv], np.exp(logw)[inv], pt[inv],
                    c["F"][inv], c["R"][inv], c["D"][inv], 0)


@nb.njit(cache=True, nogil=True)
def _h2(u, ubar):
    h = 0.0
    if u > 0.0:
        h -= u * math.log2(u)
    if ubar > 0.0:
        h -= ubar * math.log2(ubar)
    return h


@nb.njit(cache=True, nogil=True)
def _expit(z):
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


@nb.njit(cache=True, nogil=True)
def binary_totals(p, pbar, weights, s, t):
    """``(F, R, D)`` summed over components, each counted ``weights[i]`` times.

    Scalar-loop twin of :func:`binary_components` for the inner loop of the
    (s, t) solver.
    """
    ln2 = math.log(2.0)
    c1 = _expit(t * ln2)
    c1bar = _expit(-t * ln2)
    c2 = _expit(t * (2.0 * s + 1.0) * ln2)
    hc1 = _h2(c1, c1bar)
    F = 0.0
    R = 0.0
    D = 0.0
    for i in range(p.shape[0]):
        w = weights[i]
        if p[i] <= c1:
            D += w
            continue
        lo = math.log(max(p[i], 1e-300)) - math.log(max(pbar[i], 1e-300))
        if pbar[i] <= c2:
            z = 2.0 * t * s * ln2 + lo
            ubar = _expit(-z)
            D += w * 2.0 * ubar
        else:
            z = (s * t * ln2 + lo) / (1.0 + s)
            ubar = _expit(-z)
            D += w * (c1 + ubar)
            r = _h2(_expit(z), ubar) - hc1
            if r > 0.0:
                R += w * r
        u = _expit(z)
        f = 0.0
        if u > 0.0:
            f += u * math.log2(u / max(p[i], 1e-300))
        if ubar > 0.0:
            f += ubar * math.log2(ubar / max(pbar[i], 1e-300))
        if f > 0.0:
            F += w * f
    return F, R, D


# ---------------------------------------------------------------------------
# m-SC exponent and attempt budget

def h_rate(u, D_bar):
    """h(u) = H(u) - H(u + D_bar - 1): per-component rate at tilted mass u."""
    return binary_entropy(u) - binary_entropy(np.asarray(u) + D_bar - 1.0)


def h_inverse(R_bar: float, D_bar: float) -> float:
    """The u in [1 - D_bar, 1 - D_bar/2) with h(u) = R_bar."""
    if not 0.0 < D_bar < 1.0:
        raise ValueError(f"D_bar must lie in (0, 1), got {D_bar}")
    top = binary_entropy(1.0 - D_bar)
    if not 0.0 < R_bar <= top:
        raise ValueError(f"R_bar must lie in (0, {top}], got {R_bar}")
    lo, hi = 1.0 - D_bar, 1.0 - D_bar / 2.0
    if R_bar == top:
        return lo
    return brentq(lambda u: h_rate(u, D_bar) - R_bar, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=500)


def g_inverse(F_bar: float, D_bar: float, p: float) -> float:
    """The u in [1 - D_bar, p] with D_KL(u || p) = F_bar."""
    lo = 1.0 - D_bar
    if not lo <= p < 1.0:
        raise ValueError(f"need 1 - D_bar <= p < 1, got D_bar={D_bar}, p={p}")
    top = kl_binary(lo, p)
    if not 0.0 <= F_bar <= top:
        raise ValueError(f"F_bar must lie in [0, {top}], got {F_bar}")
    if F_bar == 0.0:
        return p
    if F_bar == top:
        return lo
    return brentq(lambda u: kl_binary(u, p) - F_bar, lo, p, xtol=1e-15, rtol=1e-15, maxiter=500)


def rate_frontier(D: float, N: int, p: float):
    """``(R_lo, R_hi)``: the rates between which mBM-1 on the m-SC has a
    positive, increasing exponent at distortion D.

    Below ``R_lo`` (the rate-distortion rate) the exponent is zero; above
    ``R_hi`` it saturates. ``R_lo == R_hi`` when no rate gives a positive
    exponent (every error pattern exceeds D on average).
    """
    D_bar = D / N
    top = N * binary_entropy(1.0 - D_bar)
    if p <= 1.0 - D_bar:
        return top, top
    if p >= 1.0 - D_bar / 2.0:
        return 0.0, top
    return N * float(h_rate(p, D_bar)), top


def max_exponent(R: float, D: float, N: int, p: float) -> float:
    """Largest exponent of mBM-1 with ``2^R`` attempts on the m-SC(p).

    F = N D_KL(u || p) with u = h^-1(R/N). Rates below the rate-distortion
    rate give u > p, where the exponent is zero rather than D_KL(u || p).
    """
    D_bar = D / N
    top = N * binary_entropy(1.0 - D_bar)
    if not 0.0 < R <= top * (1.0 + 1e-12):
        raise ValueError(f"R must lie in (0, {top}], got {R}")
    u = h_inverse(min(R / N, top / N), D_bar)
    if u >= p:
        return 0.0
    return N * kl_binary(u, p)


def min_rate_for_exponent(F: float, D: float, N: int, p: float) -> float:
    """Smallest R such that ``2^R`` mBM-1 attempts reach exponent F."""
    D_bar = D / N
    if p < 1.0 - D_bar:
        raise ValueError(f"no positive exponent: p={p} < 1 - D/N = {1.0 - D_bar}")
    top_bar = float(kl_binary(1.0 - D_bar, p))
    if not 0.0 <= F <= N * top_bar * (1.0 + 1e-12):
        raise ValueError(f"F must lie in [0, {N * top_bar}], got {F}")
    u = g_inverse(min(F / N, top_bar), D_bar, p)
    return N * max(0.0, float(binary_entropy(u) - binary_entropy(u + D_bar - 1.0)))
