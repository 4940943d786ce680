"""Numpy implementation of the per-step voting kernel.

This is the fallback used when the compiled extension is unavailable. Both
implementations must agree bit-for-bit: samples are taken as
``idx = trunc(u * degree)`` (clamped to degree-1), so the sampled neighbour
indices depend only on the supplied uniforms, never on execution order.
"""

from __future__ import annotations

import numpy as np


def _combine(colours: np.ndarray, picks: np.ndarray, k: int, keep_own: bool,
             tie_u: np.ndarray) -> np.ndarray:
    c = colours[picks]
    if k == 3:
        return (c.sum(axis=1, dtype=np.int64) >= 2).astype(np.uint8)
    if k == 1:
        return np.ascontiguousarray(c[:, 0])
    s = c.sum(axis=1, dtype=np.int64)
    out = (s == 2).astype(np.uint8)
    tie = s == 1
    if keep_own:
        out[tie] = colours[tie]
    else:
        chosen = np.where(tie_u >= 0.5, c[:, 1], c[:, 0])
        out[tie] = chosen[tie]
    return out


def step_csr(indptr: np.ndarray, indices: np.ndarray, colours: np.ndarray,
             u: np.ndarray, k: int, keep_own: bool, tie_u: np.ndarray) -> np.ndarray:
    """One synchronous best-of-k step on a CSR graph.

    `u` has shape (n, k): the uniforms for each vertex's samples, consumed in
    vertex order. `tie_u` is consulted only for k=2 with the random tie rule.
    """
    deg = np.diff(indptr)
    idx = (u * deg[:, None]).astype(np.int64)
    np.minimum(idx, (deg - 1)[:, None], out=idx)
    picks = indices[indptr[:-1, None] + idx]
    return _combine(colours, picks, k, keep_own, tie_u)


def step_complete(n: int, colours: np.ndarray, u: np.ndarray, k: int,
                  keep_own: bool, tie_u: np.ndarray) -> np.ndarray:
    """One synchronous best-of-k step on the implicit complete graph K_n.

    A vertex samples uniformly among the other n-1 vertices: draw an index in
    [0, n-2] and shift it past the vertex itself.
    """
    m = n - 1
    idx = (u * m).astype(np.int64)
    np.minimum(idx, m - 1, out=idx)
    picks = idx + (idx >= np.arange(n, dtype=np.int64)[:, None])
    return _combine(colours, picks, k, keep_own, tie_u)
