"""Finding the (s, t) pair for a target (R, D), and the rate-distortion baseline.

For a fixed ``t`` the distortion grows with ``s``, and along the curve of
constant distortion the rate grows as ``t`` decreases. The solver therefore
nests two one-dimensional root searches: an inner one on ``s`` to hit the
distortion and an outer one on ``t`` to hit the rate.

The exponent is zero for rates at or below the rate-distortion function
R(D); such targets return the ``s = 0`` point on the rate-distortion curve.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .arimoto import RdeParams, RdePoint, factored_rde, source_rows, unique_rows
from .binary import binary_totals, closed_form_rde, is_mbm1_binary

T_NEAR_ZERO = -1e-9
T_NEAR_ZERO_ITER = -1e-3
T_FLOOR = -2.0 ** 12
T_START = -0.25
S_CEIL = 2.0 ** 30


class InfeasibleTarget(ValueError):
    """Target (R, D) outside what the source admits.

    ``point``/``params`` hold the closest frontier point that was found
    (``None`` when even the distortion cannot be met).
    """

    def __init__(self, message, point: RdePoint | None = None, params: RdeParams | None = None):
        super().__init__(message)
        self.point = point
        self.params = params


@dataclass
class _Evaluator:
    rd: Callable[[float, float], tuple]
    full: Callable[[float, float], RdePoint]
    t_near_zero: float
    d_min: float
    d_max: float


def _evaluator(model, delta, method, tol, max_iter) -> _Evaluator:
    P = source_rows(model)
    delta = np.asarray(delta, dtype=float)
    # distortion range: perfect reproduction vs best constant reproduction
    expected = P @ delta
    d_min = float(np.sum(P @ delta.min(axis=1)))
    d_max = float(np.sum(expected.min(axis=1)))
    if method == "auto":
        method = "closed" if is_mbm1_binary(P, delta) else "arimoto"
    if method == "closed":
        if not is_mbm1_binary(P, delta):
            raise ValueError("closed-form evaluation needs ell = 1 and the mBM-1 distortion")
        reps, inv = unique_rows(P)
        w = np.bincount(inv).astype(float)
        p1 = np.ascontiguousarray(reps[:, 1])
        p0 = np.ascontiguousarray(reps[:, 0])

        def rd(s, t):
            _, R, D = binary_totals(p1, p0, w, s, t)
            return R, D

        return _Evaluator(rd, lambda s, t: closed_form_rde(P, s, t), T_NEAR_ZERO, d_min, d_max)
    if method != "arimoto":
        raise ValueError(f"unknown method {method!r}")

    def full(s, t):
        return factored_rde(P, delta, RdeParams(s, t, tol, max_iter))

    def rd(s, t):
        pt = full(s, t)
        return pt.R, pt.D

    return _Evaluator(rd, full, T_NEAR_ZERO_ITER, d_min, d_max)


def _s_for_distortion(ev: _Evaluator, t, D_target, xtol):
    """Smallest s >= 0 with D(s, t) = D_target, or None if D(0, t) > D_target."""
    R0, D0 = ev.rd(0.0, t)
    if D0 >= D_target:
        # round-off at the rate-distortion point counts as a hit
        return 0.0 if D0 <= D_target + 1e-12 * max(1.0, D_target) else None
    hi = 1.0
    while ev.rd(hi, t)[1] < D_target:
        hi *= 4.0
        if hi > S_CEIL:
            raise InfeasibleTarget(f"distortion {D_target} unreachable at t={t}")
    return brentq(lambda s: ev.rd(s, t)[1] - D_target, 0.0, hi, xtol=xtol, rtol=1e-15, maxiter=500)


def _t_on_rd_curve(ev: _Evaluator, D_target, xtol):
    """t with D(0, t) = D_target (the rate-distortion point), clipped to the
    near-zero end when the zero-rate distortion is already below target."""
    hi = ev.t_near_zero
    if ev.rd(0.0, hi)[1] <= D_target:
        return hi
    lo = -1.0
    while ev.rd(0.0, lo)[1] > D_target:
        lo *= 2.0
        if lo < T_FLOOR:
            raise InfeasibleTarget(f"distortion {D_target} below the reachable minimum {ev.d_min}")
    return brentq(lambda t: ev.rd(0.0, t)[1] - D_target, lo, hi, xtol=xtol, rtol=1e-15, maxiter=500)


def solve_st(model, delta, R_target: float, D_target: float, tol: float = 1e-9,
             method: str = "auto", arimoto_tol: float = 1e-12, max_iter: int = 100_000):
    """``(params, point)`` with R and D within ``tol`` (relative above 1) of the targets.

    ``method`` selects the evaluator: ``"closed"`` (mBM-1 on a binary source),
    ``"arimoto"`` (factored iteration, any distortion) or ``"auto"``.
    Raises :class:`InfeasibleTarget` if the distortion is below the reachable
    minimum or the rate exceeds the frontier at that distortion.
    """
    if R_target < 0:
        raise ValueError("R_target must be nonnegative")
    ev = _evaluator(model, delta, method, arimoto_tol, max_iter)
    if D_target <= ev.d_min:
        frontier = ev.full(0.0, T_FLOOR)
        raise InfeasibleTarget(
            f"D_target={D_target} is not above the minimum distortion {ev.d_min:.6g}",
            frontier, RdeParams(0.0, T_FLOOR))
    xtol = 1e-14
    t0 = _t_on_rd_curve(ev, D_target, xtol)

    def rate_at(t):
        s = _s_for_distortion(ev, t, D_target, xtol)
        if s is None:
            raise InfeasibleTarget(f"distortion {D_target} not reachable at t={t}")
        return s, ev.rd(s, t)[0]

    # start away from t = 0, where the iteration converges slowly
    hi = min(t0, T_START)
    s_hi, R_hi = rate_at(hi)
    if R_hi >= R_target:
        s0, R0 = rate_at(t0) if hi != t0 else (s_hi, R_hi)
        if R0 >= R_target:
            # at or below R(D): zero exponent, report the rate-distortion point
            return RdeParams(s0, t0), ev.full(s0, t0)
        lo, hi = hi, t0
    else:
        lo, s_lo, R_lo = hi, s_hi, R_hi
        while R_lo < R_target:
            hi = lo
            lo *= 2.0
            if lo < T_FLOOR:
                frontier = ev.full(s_lo, hi)
                raise InfeasibleTarget(
                    f"R_target={R_target} exceeds the frontier rate {R_lo:.6g} at D={D_target}",
                    frontier, RdeParams(s_lo, hi))
            s_lo, R_lo = rate_at(lo)
    t = brentq(lambda t: rate_at(t)[1] - R_target, lo, hi, xtol=xtol, rtol=1e-15, maxiter=500)
    s = _s_for_distortion(ev, t, D_target, xtol)
    point = ev.full(s, t)
    if abs(point.R - R_target) > tol * max(1.0, R_target) or \
            abs(point.D - D_target) > tol * max(1.0, D_target):
        raise InfeasibleTarget(
            f"solver stalled at R={point.R:.12g}, D={point.D:.12g} "
            f"(targets {R_target}, {D_target})", point, RdeParams(s, t))
    return RdeParams(s, t), point


def blahut_rd(model, delta, D_target: float, method: str = "auto",
              arimoto_tol: float = 1e-12, max_iter: int = 100_000):
    """``(R_min, Q)`` of the rate-distortion function at ``D_target``."""
    ev = _evaluator(model, delta, method, arimoto_tol, max_iter)
    if D_target < ev.d_min:
        raise ValueError(f"D_target={D_target} below the minimum distortion {ev.d_min:.6g}")
    if D_target >= ev.d_max:
        return 0.0, _constant_reproduction(model, delta)
    if D_target == ev.d_min:
        pt = ev.full(0.0, T_FLOOR)
        return pt.R, pt.Q
    t = _t_on_rd_curve(ev, D_target, 1e-14)
    pt = ev.full(0.0, t)
    if pt.D < D_target - 1e-9 * max(1.0, D_target):
        # near-zero slope end: effectively the zero-rate point
        return 0.0, _constant_reproduction(model, delta)
    return pt.R, pt.Q


def blahut_rd_at_rate(model, delta, R_target: float, method: str = "auto",
                      arimoto_tol: float = 1e-12, max_iter: int = 100_000):
    """Point on the rate-distortion curve with rate ``R_target``.

    Returns ``(D, Q, point)``; ``R_target`` beyond the source entropy is
    clipped to the minimum-distortion end.
    """
    if R_target < 0:
        raise ValueError("R_target must be nonnegative")
    ev = _evaluator(model, delta, method, arimoto_tol, max_iter)
    if R_target == 0:
        Q = _constant_reproduction(model, delta)
        return ev.d_max, Q, None
    hi = ev.t_near_zero
    if ev.rd(0.0, hi)[0] >= R_target:
        pt = ev.full(0.0, hi)
        return pt.D, pt.Q, pt
    lo = -1.0
    while ev.rd(0.0, lo)[0] < R_target:
        lo *= 2.0
        if lo < T_FLOOR:
            pt = ev.full(0.0, T_FLOOR)
            return pt.D, pt.Q, pt
    t = brentq(lambda t: ev.rd(0.0, t)[0] - R_target, lo, hi, xtol=1e-14, rtol=1e-15, maxiter=500)
    pt = ev.full(0.0, t)
    return pt.D, pt.Q, pt


def _constant_reproduction(model, delta):
    P = source_rows(model)
    k = np.argmin(P @ np.asarray(delta, dtype=float), axis=1)
    Q = np.zeros_like(P)
    Q[np.arange(P.shape[0]), k] = 1.0
    return Q


def rde_surface(model, delta, s_values, t_values, method: str = "auto",
                arimoto_tol: float = 1e-12, max_iter: int = 100_000):
    """Rows ``(s, t, R, D, F)`` over the grid, t varying fastest."""
    rows = []
    for s in s_values:
        for t in t_values:
            if method == "closed" or (method == "auto" and is_mbm1_binary(model, delta)):
                pt = closed_form_rde(model, s, t)
            else:
                pt = factored_rde(model, delta, RdeParams(s, t, arimoto_tol, max_iter))
            rows.append((float(s), float(t), pt.R, pt.D, pt.F))
    return rows


def write_surface_csv(rows, handle):
    w = csv.writer(handle, lineterminator="\n")
    w.writerow(["s", "t", "R", "D", "F"])
    for r in rows:
        w.writerow([repr(float(x)) for x in r])

