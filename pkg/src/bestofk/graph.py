"""Undirected simple graphs: construction, generation, neighbour sampling.

Graphs are immutable after construction. Adjacency is stored in CSR form
(indptr/indices) with per-vertex neighbour lists sorted, except for complete
graphs, which are kept implicit so that K_n works at sizes where the n*(n-1)
adjacency would not fit in memory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EdgeListFormatError, GenerationError, InvalidParameterError
from .rng import make_rng

__all__ = [
    "Graph",
    "gen_complete",
    "gen_random_regular",
    "gen_gnp_min_degree",
    "load_edge_list",
    "sample_neighbor",
]

REGULAR_RETRY_BUDGET = 1000
GNP_RETRY_BUDGET = 100


@dataclass(frozen=True)
class Graph:
    """Static undirected simple graph with dense 0-based vertex indices.

    For `complete` graphs indptr/indices are None and adjacency is implicit.
    """

    n: int
    indptr: np.ndarray | None
    indices: np.ndarray | None
    complete: bool = False

    def __post_init__(self):
        if self.complete:
            return
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)

    @property
    def edge_count(self) -> int:
        if self.complete:
            return self.n * (self.n - 1) // 2
        return int(self.indices.size // 2)

    @property
    def degrees(self) -> np.ndarray:
        if self.complete:
            return np.full(self.n, self.n - 1, dtype=np.int64)
        return np.diff(self.indptr)

    def degree(self, v: int) -> int:
        if self.complete:
            return self.n - 1
        return int(self.indptr[v + 1] - self.indptr[v])

    @property
    def min_degree(self) -> int:
        return int(self.degrees.min())

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted neighbour indices of v (materialised on demand for K_n)."""
        if self.complete:
            out = np.arange(self.n, dtype=np.int64)
            return np.delete(out, v)
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        """Build a graph from an iterable of undirected (u, v) pairs.

        Rejects self-loops, duplicate edges, out-of-range endpoints, and
        graphs with an isolated vertex.
        """
        if n < 1:
            raise InvalidParameterError(f"vertex count must be positive, got {n}")
        seen: set[tuple[int, int]] = set()
        us, vs = [], []
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise InvalidParameterError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidParameterError(f"edge ({u}, {v}) out of range for n={n}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise InvalidParameterError(f"duplicate edge ({u}, {v})")
            seen.add(key)
            us.append(u)
            vs.append(v)
        src = np.concatenate([np.asarray(us, dtype=np.int64), np.asarray(vs, dtype=np.int64)])
        dst = np.concatenate([np.asarray(vs, dtype=np.int64), np.asarray(us, dtype=np.int64)])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        np.cumsum(indptr, out=indptr)
        if indptr.size > 1 and (np.diff(indptr) == 0).any():
            bad = int(np.nonzero(np.diff(indptr) == 0)[0][0])
            raise InvalidParameterError(f"vertex {bad} has degree 0")
        return cls(n=n, indptr=indptr, indices=dst)

    def check_invariants(self) -> None:
        """Exhaustively verify simplicity, symmetry, sortedness, degree >= 1."""
        if self.complete:
            assert self.n >= 2
            return
        n, indptr, indices = self.n, self.indptr, self.indices
        assert indptr.shape == (n + 1,) and indptr[0] == 0 and indptr[-1] == indices.size
        deg = np.diff(indptr)
        assert (deg >= 1).all(), "isolated vertex"
        assert ((indices >= 0) & (indices < n)).all(), "index out of range"
        fwd = set()
        for v in range(n):
            row = indices[indptr[v]:indptr[v + 1]]
            assert (np.diff(row) > 0).all(), f"row {v} not strictly sorted (dup or unsorted)"
            assert (row != v).all(), f"self-loop at {v}"
            for w in row.tolist():
                fwd.add((v, w))
        assert all((w, v) in fwd for v, w in fwd), "adjacency not symmetric"


def gen_complete(n: int) -> Graph:
    """The complete graph K_n (implicit adjacency)."""
    if n < 2:
        raise InvalidParameterError(f"complete graph needs n >= 2, got {n}")
    return Graph(n=n, indptr=None, indices=None, complete=True)


def gen_random_regular(n: int, d: int, seed: int) -> Graph:
    """Random d-regular graph via the pairing model with whole-graph rejection.

    Shuffles the n*d stub multiset, pairs consecutive stubs, and rejects the
    whole attempt on any loop or repeated edge. Deterministic given seed.
    """
    if d < 1:
        raise InvalidParameterError(f"degree must be positive, got {d}")
    if d >= n:
        raise InvalidParameterError(f"need d < n, got d={d}, n={n}")
    if (n * d) % 2 != 0:
        raise InvalidParameterError(f"n*d must be even, got n={n}, d={d}")
    rng = make_rng(seed)
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    for _ in range(REGULAR_RETRY_BUDGET):
        perm = rng.permutation(stubs)
        u, v = perm[0::2], perm[1::2]
        if (u == v).any():
            continue
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        key = lo * n + hi
        if np.unique(key).size != key.size:
            continue
        return Graph.from_edges(n, zip(lo.tolist(), hi.tolist()))
    raise GenerationError(
        f"no simple {d}-regular graph found in {REGULAR_RETRY_BUDGET} pairing attempts"
    )


def gen_gnp_min_degree(n: int, p: float, d_min: int, seed: int,
                       max_attempts: int = GNP_RETRY_BUDGET) -> tuple[Graph, int]:
    """G(n, p) sample resampled until min degree >= d_min.

    Each attempt derives a fresh stream from (seed, attempt). Returns the
    graph and the number of attempts used.
    """
    if not (0.0 < p <= 1.0):
        raise InvalidParameterError(f"p must be in (0, 1], got {p}")
    if d_min < 1:
        raise InvalidParameterError(f"d_min must be positive, got {d_min}")
    if n < 2 or d_min > n - 1:
        raise GenerationError(f"min degree {d_min} impossible on {n} vertices")
    for attempt in range(max_attempts):
        rng = make_rng(seed, attempt)
        us, vs = [], []
        for i in range(n - 1):
            hits = np.nonzero(rng.random(n - 1 - i) < p)[0]
            if hits.size:
                us.append(np.full(hits.size, i, dtype=np.int64))
                vs.append(hits.astype(np.int64) + i + 1)
        if not us:
            continue
        src = np.concatenate(us)
        dst = np.concatenate(vs)
        deg = np.bincount(src, minlength=n) + np.bincount(dst, minlength=n)
        if deg.min() >= d_min:
            return Graph.from_edges(n, zip(src.tolist(), dst.tolist())), attempt + 1
    raise GenerationError(
        f"no G({n},{p}) sample with min degree >= {d_min} in {max_attempts} attempts"
    )


def load_edge_list(path) -> Graph:
    """Parse an edge-list file: one `u v` pair per line, '#' comments ignored.

    Vertex count is max index + 1. Self-loops, duplicate edges (in either
    orientation) and isolated vertices are format errors.
    """
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    max_idx = -1
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise EdgeListFormatError(f"expected two fields, got {len(parts)}", lineno)
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListFormatError(f"non-integer endpoint in {parts!r}", lineno) from None
            if u < 0 or v < 0:
                raise EdgeListFormatError(f"negative vertex index in {parts!r}", lineno)
            if u == v:
                raise EdgeListFormatError(f"self-loop at vertex {u}", lineno)
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise EdgeListFormatError(f"duplicate edge ({u}, {v})", lineno)
            seen.add(key)
            edges.append((u, v))
            max_idx = max(max_idx, u, v)
    if not edges:
        raise EdgeListFormatError("no edges in file")
    n = max_idx + 1
    try:
        return Graph.from_edges(n, edges)
    except InvalidParameterError as exc:
        raise EdgeListFormatError(str(exc)) from None


def sample_neighbor(g: Graph, v: int, rng: np.random.Generator) -> int:
    """One uniform draw from adj(v); repeated calls resample with replacement."""
    deg = g.degree(v)
    idx = int(rng.random() * deg)
    if idx >= deg:
        idx = deg - 1
    if g.complete:
        return idx + 1 if idx >= v else idx
    return int(g.indices[g.indptr[v] + idx])
