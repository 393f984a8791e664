"""Letter-by-letter distortion measures for top-``ell`` multi-trial decoding."""

from __future__ import annotations

import numpy as np


def mbm_distortion(ell: int) -> np.ndarray:
    """Distortion matrix ``delta[j, k]`` for mBM-``ell``.

    Rows are error letters (0 = none of the top ``ell`` symbols is right,
    j = the j-th is), columns erasure letters (0 = erase, k = use the k-th
    symbol). An erasure costs 1 and a wrong hard decision costs 2, so the
    total distortion of an attempt is ``2v + e``.
    """
    if ell < 1:
        raise ValueError(f"ell must be at least 1, got {ell}")
    j = np.arange(ell + 1)[:, None]
    k = np.arange(ell + 1)[None, :]
    delta = np.where(j == k, 0.0, 2.0)
    delta[:, 0] = 1.0
    return delta


def distortion(x, x_hat, delta) -> float:
    """Total distortion ``sum_i delta[x_i, x_hat_i]``."""
    x = np.asarray(x)
    x_hat = np.asarray(x_hat)
    delta = np.asarray(delta)
    if x.shape != x_hat.shape:
        raise ValueError("error and erasure patterns differ in length")
    if x.size and (x.min() < 0 or x.max() >= delta.shape[0]
                   or x_hat.min() < 0 or x_hat.max() >= delta.shape[1]):
        raise ValueError("letter outside the distortion alphabet")
    return float(delta[x, x_hat].sum())
