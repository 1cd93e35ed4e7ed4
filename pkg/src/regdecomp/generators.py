"""Seeded random graph generators with ground-truth labels.

Randomness uses numpy's PCG64. Every independent unit of work draws
from its own child stream keyed by the user seed: one stream per block
pair ``(u, v)`` for block models and one per arriving node for
preferential attachment. Output therefore does not depend on chunk
sizes or evaluation order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph

__all__ = ["SBMParams", "PlantedParams", "sbm", "planted_partition",
           "preferential_attachment"]

_ROW_CHUNK = 1 << 22  # pair draws per chunk


@dataclass(frozen=True)
class SBMParams:
    block_sizes: tuple
    link_probs: np.ndarray

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.block_sizes)
        probs = np.asarray(self.link_probs, dtype=np.float64)
        k = len(sizes)
        if k == 0 or min(sizes) <= 0:
            raise ValueError("block_sizes must be a nonempty list of positive integers")
        if probs.shape != (k, k):
            raise ValueError(f"link_probs must be {k}x{k}, got {probs.shape}")
        if not np.array_equal(probs, probs.T):
            raise ValueError("link_probs must be symmetric")
        if probs.min() < 0 or probs.max() > 1:
            raise ValueError("link probabilities must lie in [0, 1]")
        object.__setattr__(self, "block_sizes", sizes)
        object.__setattr__(self, "link_probs", probs)

    @property
    def n(self) -> int:
        return sum(self.block_sizes)


@dataclass(frozen=True)
class PlantedParams:
    """Two equal blocks, intra-block probability a/n, inter-block b/n."""

    n: int
    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError("a and b must be positive")
        if self.a > self.n or self.b > self.n:
            raise ValueError("a/n and b/n must not exceed 1")

    def to_sbm(self) -> SBMParams:
        if self.n % 2:
            raise ValueError(f"planted partition needs an even n, got {self.n}")
        h = self.n // 2
        p, q = self.a / self.n, self.b / self.n
        return SBMParams((h, h), np.array([[p, q], [q, p]]))


def _block_edges(rng, p, rows, cols, same_block):
    """Bernoulli(p) coin per pair in a rows x cols block (i < j if diagonal)."""
    nr, nc = len(rows), len(cols)
    step = max(1, _ROW_CHUNK // max(nc, 1))
    found = []
    for lo in range(0, nr, step):
        hi = min(nr, lo + step)
        hits = rng.random((hi - lo, nc)) < p
        if same_block:
            hits &= np.arange(lo, hi)[:, None] < np.arange(nc)[None, :]
        i, j = np.nonzero(hits)
        found.append(np.column_stack([rows[i + lo], cols[j]]))
    return np.concatenate(found) if found else np.empty((0, 2), dtype=np.int64)


def sbm(params: SBMParams, seed: int) -> tuple[Graph, np.ndarray]:
    """Undirected stochastic block model.

    Nodes are numbered block by block; returns the graph and the
    length-n array of 0-based block labels.
    """
    sizes = params.block_sizes
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    labels = np.repeat(np.arange(len(sizes)), sizes)
    parts = []
    for u in range(len(sizes)):
        for v in range(u, len(sizes)):
            p = params.link_probs[u, v]
            if p == 0:
                continue
            rng = np.random.default_rng([seed, u, v])
            rows = np.arange(offsets[u], offsets[u + 1])
            cols = np.arange(offsets[v], offsets[v + 1])
            parts.append(_block_edges(rng, p, rows, cols, u == v))
    edges = np.concatenate(parts) if parts else np.empty((0, 2), dtype=np.int64)
    return Graph.from_edges(edges, params.n), labels


def planted_partition(params: PlantedParams, seed: int) -> tuple[Graph, np.ndarray]:
    return sbm(params.to_sbm(), seed)


def preferential_attachment(n: int, links_per_node: int = 3,
                            seed: int = 0) -> Graph:
    """Barabasi-Albert style growth from a triangle.

    Each arriving node links to ``links_per_node`` distinct existing
    nodes chosen with probability proportional to current degree
    (sequential draws without replacement).
    """
    if n < 3:
        raise ValueError("preferential attachment needs n >= 3")
    if not 1 <= links_per_node <= 3:
        raise ValueError("links_per_node must be between 1 and 3 (seed is a triangle)")
    m = links_per_node
    n_edges = 3 + m * (n - 3)
    edges = np.empty((n_edges, 2), dtype=np.int64)
    edges[:3] = [(0, 1), (1, 2), (0, 2)]
    # each edge contributes both endpoints: uniform pick = degree-proportional pick
    ends = np.empty(2 * n_edges, dtype=np.int64)
    ends[:6] = edges[:3].ravel()
    filled, e = 6, 3
    for node in range(3, n):
        rng = np.random.default_rng([seed, node])
        chosen: list[int] = []
        while len(chosen) < m:
            t = int(ends[rng.integers(filled)])
            if t not in chosen:
                chosen.append(t)
        for t in chosen:
            edges[e] = (t, node)
            ends[filled:filled + 2] = (t, node)
            e += 1
            filled += 2
    return Graph.from_edges(edges, n)
