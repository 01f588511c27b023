"""Immutable simple undirected graphs in compressed adjacency (CSR) form.

Vertices are the dense integers ``0..n-1``.  Every undirected edge is stored
twice, once in each endpoint's neighbor list, and each list is sorted.
Subgraph operations return the new graph together with ``kept``, the array of
original vertex ids in new-id order (new id ``i`` was vertex ``kept[i]``).
Because the relabelling is order preserving, the old->new direction is
``np.searchsorted(kept, old)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import (
    DuplicateEdge,
    EmptyGraph,
    OverlappingParts,
    PartialOverlap,
    SelfLoop,
    VertexOutOfRange,
)

INDEX = np.int64


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    offsets: np.ndarray
    neighbors: np.ndarray
    m: int
    meta: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.offsets.setflags(write=False)
        self.neighbors.setflags(write=False)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self.m == other.m
            and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.neighbors, other.neighbors)
        )

    __hash__ = None

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def neighbors_of(self, v: int) -> np.ndarray:
        return self.neighbors[self.offsets[v]:self.offsets[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors_of(u)
        i = np.searchsorted(nb, v)
        return bool(i < len(nb) and nb[i] == v)

    def sources(self) -> np.ndarray:
        """Row index of every stored adjacency entry (parallel to ``neighbors``)."""
        return np.repeat(np.arange(self.n, dtype=INDEX), self.degrees())

    def edge_array(self) -> np.ndarray:
        """All edges as an ``(m, 2)`` array with ``u < v``, sorted lexicographically."""
        src = self.sources()
        keep = src < self.neighbors
        return np.stack([src[keep], self.neighbors[keep]], axis=1)

    def edge_list(self) -> list[tuple[int, int]]:
        return [(int(u), int(v)) for u, v in self.edge_array()]

    def adjacency(self, dtype=np.float64):
        """Adjacency matrix as a ``scipy.sparse.csr_array``."""
        from scipy.sparse import csr_array

        data = np.ones(len(self.neighbors), dtype=dtype)
        return csr_array((data, self.neighbors, self.offsets), shape=(self.n, self.n))


@dataclass(frozen=True)
class DegreeStats:
    delta_max: int
    delta_min: int
    d_exact: Fraction

    @property
    def d_avg(self) -> float:
        return float(self.d_exact)


def _from_trusted_edges(n: int, u: np.ndarray, v: np.ndarray, meta=None) -> Graph:
    # u, v: validated simple edge endpoints, any order.
    src = np.concatenate([u, v]).astype(INDEX, copy=False)
    dst = np.concatenate([v, u]).astype(INDEX, copy=False)
    order = np.lexsort((dst, src))
    dst = dst[order]
    counts = np.bincount(src, minlength=n) if n else np.zeros(0, dtype=INDEX)
    offsets = np.zeros(n + 1, dtype=INDEX)
    np.cumsum(counts, out=offsets[1:])
    return Graph(n=int(n), offsets=offsets, neighbors=np.ascontiguousarray(dst), m=int(len(u)), meta=meta or {})


def _as_edge_array(edges) -> np.ndarray:
    arr = edges if isinstance(edges, np.ndarray) else np.asarray(list(edges))
    if arr.size == 0:
        return np.zeros((0, 2), dtype=INDEX)
    arr = np.asarray(arr, dtype=INDEX)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("edges must be a sequence of (u, v) pairs")
    return arr


def build_graph(n: int, edges: Iterable[tuple[int, int]] | np.ndarray, lenient: bool = False) -> Graph:
    """Build a canonical simple graph on ``n`` vertices.

    Strict mode raises on the first self-loop or repeated edge (in input
    order). With ``lenient=True`` those are dropped and counted in
    ``graph.meta["dropped_self_loops"]`` / ``["dropped_duplicates"]``.
    """
    n = int(n)
    if n < 0:
        raise VertexOutOfRange(f"negative vertex count {n}")
    arr = _as_edge_array(edges)
    if len(arr):
        bad = np.flatnonzero((arr < 0).any(axis=1) | (arr >= n).any(axis=1))
        if len(bad):
            i = int(bad[0])
            raise VertexOutOfRange(f"edge {tuple(int(t) for t in arr[i])} has an endpoint outside 0..{n - 1}", i)
    u = np.minimum(arr[:, 0], arr[:, 1])
    v = np.maximum(arr[:, 0], arr[:, 1])
    meta = {}

    loops = u == v
    if loops.any():
        if not lenient:
            i = int(np.flatnonzero(loops)[0])
            raise SelfLoop(int(u[i]), i)
        meta["dropped_self_loops"] = int(loops.sum())

    # Stable sort keeps input order among equal keys so the reported duplicate
    # is the second occurrence.
    order = np.lexsort((v, u))
    su, sv, sl = u[order], v[order], loops[order]
    dup = np.zeros(len(su), dtype=bool)
    dup[1:] = (su[1:] == su[:-1]) & (sv[1:] == sv[:-1])
    dup &= ~sl
    if dup.any():
        if not lenient:
            first = int(order[dup].min())
            raise DuplicateEdge(int(u[first]), int(v[first]), first)
        meta["dropped_duplicates"] = int(dup.sum())
    keep = ~(dup | sl)
    return _from_trusted_edges(n, su[keep], sv[keep], meta)


def vertex_set(G: Graph, S) -> np.ndarray:
    """Canonicalise ``S`` into a sorted, distinct, in-range index array."""
    arr = np.unique(np.asarray(list(S) if not isinstance(S, np.ndarray) else S, dtype=INDEX))
    if len(arr) and (arr[0] < 0 or arr[-1] >= G.n):
        raise VertexOutOfRange(f"vertex set leaves 0..{G.n - 1}")
    return arr


def _mask(G: Graph, S: np.ndarray) -> np.ndarray:
    mask = np.zeros(G.n, dtype=bool)
    mask[S] = True
    return mask


def _restrict(G: Graph, kept: np.ndarray, edge_keep) -> tuple[Graph, np.ndarray]:
    e = G.edge_array()
    e = e[edge_keep(e[:, 0], e[:, 1])]
    new_id = np.full(G.n, -1, dtype=INDEX)
    new_id[kept] = np.arange(len(kept), dtype=INDEX)
    H = _from_trusted_edges(len(kept), new_id[e[:, 0]], new_id[e[:, 1]])
    return H, kept


def induced_subgraph(G: Graph, S) -> tuple[Graph, np.ndarray]:
    """``G[S]``: keep every edge with both endpoints in ``S``."""
    kept = vertex_set(G, S)
    mask = _mask(G, kept)
    return _restrict(G, kept, lambda a, b: mask[a] & mask[b])


def bipartite_between(G: Graph, A, B) -> tuple[Graph, np.ndarray]:
    """Subgraph on ``A | B`` keeping only edges with one end in each of ``A`` and ``B``."""
    A = vertex_set(G, A)
    B = vertex_set(G, B)
    if len(np.intersect1d(A, B)):
        raise OverlappingParts("A and B must be disjoint")
    in_a, in_b = _mask(G, A), _mask(G, B)
    kept = np.union1d(A, B)
    return _restrict(G, kept, lambda a, b: (in_a[a] & in_b[b]) | (in_b[a] & in_a[b]))


def edge_counts(G: Graph, A, B) -> tuple[int, int, int]:
    """Return ``(e(A), e(B), e(A, B))``. With ``A == B`` all three equal ``e(A)``."""
    A = vertex_set(G, A)
    B = vertex_set(G, B)
    same = np.array_equal(A, B)
    if not same and len(np.intersect1d(A, B)):
        raise PartialOverlap("A and B overlap without being equal")
    in_a, in_b = _mask(G, A), _mask(G, B)
    e = G.edge_array()
    a0, a1 = in_a[e[:, 0]], in_a[e[:, 1]]
    b0, b1 = in_b[e[:, 0]], in_b[e[:, 1]]
    e_a = int(np.count_nonzero(a0 & a1))
    if same:
        return e_a, e_a, e_a
    e_b = int(np.count_nonzero(b0 & b1))
    e_ab = int(np.count_nonzero((a0 & b1) | (b0 & a1)))
    return e_a, e_b, e_ab


def degree_stats(G: Graph) -> DegreeStats:
    if G.n == 0:
        raise EmptyGraph("degree statistics need at least one vertex")
    deg = G.degrees()
    return DegreeStats(int(deg.max()), int(deg.min()), Fraction(2 * G.m, G.n))


def drop_isolated(G: Graph) -> tuple[Graph, np.ndarray]:
    return induced_subgraph(G, np.flatnonzero(G.degrees() > 0))
