"""Vectorized numpy fallback for the pairwise force kernel.

Same contract as the compiled module's ``row_forces``: per-target-row
geometric sums of the two-element summand, plus the minimum pairwise squared
distance.  Targets are processed in fixed-size blocks to bound the (n, m)
intermediate arrays; each row's sum is produced by numpy reductions in a
deterministic order, so repeated calls give identical bytes.
"""

from __future__ import annotations

import numpy as np

BLOCK = 512


def row_forces(xp, dp, xq, dq, num_threads: int = 1):
    """Per-target-row force sums; see the compiled kernel for the contract.

    ``num_threads`` is accepted for interface parity and ignored.
    """
    xp = np.ascontiguousarray(xp, dtype=np.float64)
    dp = np.ascontiguousarray(dp, dtype=np.float64)
    xq = np.ascontiguousarray(xq, dtype=np.float64)
    dq = np.ascontiguousarray(dq, dtype=np.float64)
    if xp.ndim != 2 or xp.shape[1] != 3:
        raise ValueError("element arrays must have shape (N, 3)")
    n = xp.shape[0]
    m = xq.shape[0]
    rows = np.zeros((n, 3), dtype=np.float64)
    if n == 0 or m == 0:
        return rows, np.inf

    min_r2 = np.inf
    for start in range(0, n, BLOCK):
        stop = min(start + BLOCK, n)
        r = xp[start:stop, None, :] - xq[None, :, :]  # (b, m, 3)
        r2 = np.einsum("bmk,bmk->bm", r, r)
        block_min = float(r2.min())
        if block_min < min_r2:
            min_r2 = block_min
        inv_r2 = 1.0 / r2
        inv_r3 = inv_r2 / np.sqrt(r2)
        pq = dp[start:stop] @ dq.T  # (b, m)
        pr = np.einsum("bk,bmk->bm", dp[start:stop], r)
        qr = np.einsum("mk,bmk->bm", dq, r)
        b = (2.0 * pq - 3.0 * pr * qr * inv_r2) * inv_r3
        rows[start:stop] = -np.einsum("bm,bmk->bk", b, r)
    return rows, min_r2
