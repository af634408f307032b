"""Pure-numpy gain-table backends.

``dense_gains`` mirrors the compiled kernel's contract (a length-``2**n``
array of ``|h(v)|^2`` indexed by the control vector read as a big-endian
integer) using batched rank-k resolvent updates: configurations are grouped
by popcount and each group is evaluated with one vectorized k x k capacitance
solve against the all-alpha baseline.  ``dense_gains_direct`` is the naive
reference that factors every configuration independently.
"""

from __future__ import annotations

import itertools

import numpy as np

from .model import ModelParameters, channel_gain_batch, prepare_baseline

__all__ = ["dense_gains", "dense_gains_direct"]


def _positions(combs: np.ndarray, n: int) -> np.ndarray:
    """Table index of each flip set: v read as a big-endian integer."""
    return (np.int64(1) << (n - 1 - combs)).sum(axis=1)


def dense_gains(theta: ModelParameters, block: int = 4096) -> np.ndarray:
    """All squared gains via popcount-grouped batched capacitance solves."""
    n = theta.n_s
    base = prepare_baseline(theta, np.zeros(n, dtype=np.uint8))
    gains = np.empty(1 << n, dtype=np.float64)
    gains[0] = abs(base.h_ref) ** 2
    eye_cache = {}
    for k in range(1, n + 1):
        combs_iter = itertools.combinations(range(n), k)
        while True:
            chunk = list(itertools.islice(combs_iter, block))
            if not chunk:
                break
            combs = np.asarray(chunk, dtype=np.intp)
            pos = _positions(combs, n)
            d = base.delta[combs]  # (m, k)
            bf = base.b[combs]
            sf = base.s[combs]
            gxf = base.gx_ref[combs]
            psub = base.gw[combs[:, :, None], combs[:, None, :]]  # (m, k, k)
            if k not in eye_cache:
                eye_cache[k] = np.eye(k, dtype=np.complex128)
            cap = eye_cache[k][None] - psub * d[:, None, :]
            rhs = gxf + np.einsum("mij,mj->mi", psub, d * bf)
            sd = sf * d
            try:
                y = np.linalg.solve(cap, rhs[..., None])[..., 0]
                h = base.h_ref + (sd * bf).sum(axis=1) + (sd * y).sum(axis=1)
            except np.linalg.LinAlgError:
                h = np.empty(combs.shape[0], dtype=np.complex128)
                for row in range(combs.shape[0]):
                    try:
                        y_row = np.linalg.solve(cap[row], rhs[row])
                        h[row] = base.h_ref + sd[row] @ bf[row] + sd[row] @ y_row
                    except np.linalg.LinAlgError:
                        h[row] = np.nan
            gains[pos] = np.abs(h) ** 2
    return gains


def dense_gains_direct(theta: ModelParameters, block: int = 4096) -> np.ndarray:
    """All squared gains by independent dense solves (reference backend)."""
    n = theta.n_s
    gains = np.empty(1 << n, dtype=np.float64)
    shifts = n - 1 - np.arange(n)
    for start in range(0, 1 << n, block):
        idx = np.arange(start, min(start + block, 1 << n), dtype=np.int64)
        v = ((idx[:, None] >> shifts) & 1).astype(np.uint8)
        gains[idx] = np.abs(channel_gain_batch(theta, v)) ** 2
    return gains
