"""Sparse unweighted graphs, edge-list ingestion and hop distances.

Adjacency is stored in CSR form (``indptr``/``indices``) with neighbours
sorted ascending, which makes every BFS tie-break deterministic.
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components, shortest_path

logger = logging.getLogger(__name__)

UNREACHABLE = -1

__all__ = [
    "UNREACHABLE",
    "EdgeListParseError",
    "UnreachableError",
    "Graph",
    "DistanceMatrix",
    "parse_edge_list",
    "read_edge_list",
    "write_edge_list",
    "giant_component",
    "is_connected",
    "bfs_tree",
    "sssp_distances",
    "distance_matrix",
]


class EdgeListParseError(ValueError):
    def __init__(self, lineno: int, line: str):
        self.lineno = lineno
        self.line = line
        super().__init__(f"line {lineno}: expected two node IDs, got {line!r}")


class UnreachableError(ValueError):
    """A target cannot be reached from a reference node."""

    def __init__(self, ref, target):
        self.ref = ref
        self.target = target
        super().__init__(
            f"node {target!r} is unreachable from reference {ref!r}; "
            "restrict refs and targets to one connected component"
        )


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple graph over dense indices ``0..node_count-1``.

    For undirected graphs each edge appears in both endpoints' rows.
    ``original_ids[i]`` is the external ID of internal node ``i``.
    """

    indptr: np.ndarray
    indices: np.ndarray
    directed: bool = False
    original_ids: tuple = ()
    _id_index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.original_ids:
            object.__setattr__(
                self, "original_ids", tuple(str(i) for i in range(self.node_count))
            )
        if len(self.original_ids) != self.node_count:
            raise ValueError("original_ids must have one entry per node")

    @classmethod
    def from_edges(cls, edges, node_count: int, directed: bool = False,
                   original_ids: Sequence | None = None) -> "Graph":
        """Build a graph from an ``(E, 2)`` array of internal index pairs.

        Self-loops are dropped and parallel edges collapsed.
        """
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        u, v = edges[:, 0], edges[:, 1]
        if edges.size and (edges.min() < 0 or edges.max() >= node_count):
            raise ValueError("edge endpoint out of range")
        keep = u != v
        u, v = u[keep], v[keep]
        if not directed:
            u, v = np.concatenate([u, v]), np.concatenate([v, u])
        key = np.unique(u * node_count + v)
        src, dst = np.divmod(key, node_count)
        indptr = np.zeros(node_count + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=node_count), out=indptr[1:])
        return cls(indptr, dst.astype(np.int64), directed,
                   tuple(original_ids) if original_ids is not None else ())

    @property
    def node_count(self) -> int:
        return len(self.indptr) - 1

    @property
    def edge_count(self) -> int:
        """Number of edges (unordered pairs for undirected graphs)."""
        nnz = len(self.indices)
        return nnz if self.directed else nnz // 2

    def neighbors(self, node: int) -> np.ndarray:
        return self.indices[self.indptr[node]:self.indptr[node + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def edges(self) -> np.ndarray:
        """``(E, 2)`` array of edges; undirected edges listed once with u < v."""
        src = np.repeat(np.arange(self.node_count), self.degrees())
        out = np.column_stack([src, self.indices])
        if not self.directed:
            out = out[out[:, 0] < out[:, 1]]
        return out

    def to_csr(self) -> sp.csr_matrix:
        n = self.node_count
        data = np.ones(len(self.indices), dtype=np.float64)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(n, n))

    def reverse(self) -> "Graph":
        if not self.directed:
            return self
        e = self.edges()
        return Graph.from_edges(e[:, ::-1], self.node_count, True, self.original_ids)

    def index_of(self, external_id) -> int:
        if self._id_index is None:
            object.__setattr__(
                self, "_id_index", {v: i for i, v in enumerate(self.original_ids)}
            )
        return self._id_index[str(external_id)]

    def subgraph(self, nodes) -> "Graph":
        """Induced subgraph; node order follows ``nodes``."""
        nodes = np.asarray(nodes, dtype=np.int64)
        remap = np.full(self.node_count, -1, dtype=np.int64)
        remap[nodes] = np.arange(len(nodes))
        e = self.edges()
        e = remap[e]
        e = e[(e >= 0).all(axis=1)]
        ids = [self.original_ids[i] for i in nodes]
        return Graph.from_edges(e, len(nodes), self.directed, ids)


def parse_edge_list(lines: Iterable[str] | str, directed: bool = False,
                    return_stats: bool = False):
    """Parse a SNAP-style edge list.

    Lines starting with ``#`` and blank lines are skipped. Node IDs are
    arbitrary tokens and receive dense indices in first-appearance order.
    Self-loops and duplicate edges are dropped (and counted).

    Raises
    ------
    EdgeListParseError
        If a data line does not hold exactly two tokens.
    """
    if isinstance(lines, str):
        lines = lines.splitlines()
    index: dict[str, int] = {}
    pairs = []
    stats = {"edge_lines": 0, "comments": 0, "self_loops": 0, "duplicates": 0}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            stats["comments"] += 1
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise EdgeListParseError(lineno, raw.rstrip("\n"))
        stats["edge_lines"] += 1
        a, b = (index.setdefault(t, len(index)) for t in tokens)
        if a == b:
            stats["self_loops"] += 1
            continue
        pairs.append((a, b))
    n = len(index)
    graph = Graph.from_edges(np.array(pairs, dtype=np.int64).reshape(-1, 2), n,
                             directed, list(index))
    stats["duplicates"] = len(pairs) - graph.edge_count
    logger.info("parsed %d nodes, %d edges (dropped %d self-loops, %d duplicates)",
                n, graph.edge_count, stats["self_loops"], stats["duplicates"])
    if return_stats:
        return graph, stats
    return graph


def read_edge_list(path, directed: bool = False, return_stats: bool = False):
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh, directed=directed, return_stats=return_stats)


def write_edge_list(graph: Graph, path, header: str | None = None) -> None:
    ids = graph.original_ids
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        for u, v in graph.edges():
            fh.write(f"{ids[u]} {ids[v]}\n")


def giant_component(graph: Graph, mode: str = "weak") -> tuple[Graph, np.ndarray]:
    """Largest weakly or strongly connected component.

    Returns the induced subgraph and the array mapping its node indices
    to indices of ``graph``. Ties go to the component holding the
    smallest node index.
    """
    if graph.node_count == 0:
        raise ValueError("graph is empty")
    if mode not in ("weak", "strong"):
        raise ValueError(f"mode must be 'weak' or 'strong', got {mode!r}")
    if mode == "strong" and not graph.directed:
        raise ValueError("strong components require a directed graph")
    _, comp = connected_components(graph.to_csr(), directed=graph.directed,
                                   connection=mode)
    sizes = np.bincount(comp)
    # first index of each component label -> order by (size desc, min index)
    first = np.full(len(sizes), graph.node_count, dtype=np.int64)
    np.minimum.at(first, comp, np.arange(graph.node_count))
    best = min(range(len(sizes)), key=lambda c: (-sizes[c], first[c]))
    kept = np.flatnonzero(comp == best)
    return graph.subgraph(kept), kept


def bfs_tree(graph: Graph, source: int) -> tuple[np.ndarray, np.ndarray]:
    """Level-synchronous BFS from ``source`` along out-edges.

    Returns ``(dist, parent)``. Unreached nodes get ``UNREACHABLE`` in
    both arrays; the source is its own parent. Each node's parent is the
    smallest-index node on the previous level adjacent to it.
    """
    n = graph.node_count
    if not 0 <= source < n:
        raise IndexError(f"source {source} out of range for {n} nodes")
    dist = np.full(n, UNREACHABLE, dtype=np.int64)
    parent = np.full(n, UNREACHABLE, dtype=np.int64)
    dist[source] = 0
    parent[source] = source
    indptr, indices = graph.indptr, graph.indices
    frontier = np.array([source], dtype=np.int64)
    level = 0
    while frontier.size:
        level += 1
        starts, ends = indptr[frontier], indptr[frontier + 1]
        lengths = ends - starts
        total = int(lengths.sum())
        if total == 0:
            break
        offsets = np.repeat(starts - np.cumsum(lengths) + lengths, lengths)
        nbr = indices[offsets + np.arange(total)]
        src = np.repeat(frontier, lengths)
        fresh = dist[nbr] == UNREACHABLE
        nbr, src = nbr[fresh], src[fresh]
        if nbr.size == 0:
            break
        order = np.lexsort((src, nbr))
        nbr, src = nbr[order], src[order]
        first = np.ones(nbr.size, dtype=bool)
        first[1:] = nbr[1:] != nbr[:-1]
        frontier = nbr[first]
        dist[frontier] = level
        parent[frontier] = src[first]
    return dist, parent


def sssp_distances(graph: Graph, source: int) -> np.ndarray:
    """Hop distances from ``source``; ``UNREACHABLE`` (-1) where no path exists."""
    return bfs_tree(graph, source)[0]


def is_connected(graph: Graph) -> bool:
    """Connectivity in the natural mode: strong if directed, else plain."""
    if graph.node_count == 0:
        return False
    if (sssp_distances(graph, 0) == UNREACHABLE).any():
        return False
    if graph.directed:
        return not (sssp_distances(graph.reverse(), 0) == UNREACHABLE).any()
    return True


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Hop counts from reference nodes (rows) to target nodes (columns)."""

    entries: np.ndarray
    reference_ids: np.ndarray
    target_ids: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def to_csv(self, path, graph: Graph | None = None) -> None:
        """Header row of target IDs, first column of reference IDs."""
        name = (lambda i: graph.original_ids[i]) if graph is not None else str
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([""] + [name(t) for t in self.target_ids])
            for r, row in zip(self.reference_ids, self.entries):
                w.writerow([name(r)] + row.tolist())


_BLOCK_ROWS = 256


def distance_matrix(graph: Graph, refs, targets=None,
                    dtype=np.int32) -> DistanceMatrix:
    """Shortest-path hop counts ``entries[i, j] = dist(refs[i], targets[j])``.

    One BFS per reference, run in blocks to bound memory. For directed
    graphs the distance runs from reference to target.

    Raises
    ------
    UnreachableError
        Naming the first (reference, target) pair with no path.
    """
    refs = np.asarray(refs, dtype=np.int64).ravel()
    targets = (np.arange(graph.node_count) if targets is None
               else np.asarray(targets, dtype=np.int64).ravel())
    csr = graph.to_csr()
    out = np.empty((len(refs), len(targets)), dtype=dtype)
    for lo in range(0, len(refs), _BLOCK_ROWS):
        block = refs[lo:lo + _BLOCK_ROWS]
        d = shortest_path(csr, method="D", directed=graph.directed,
                          unweighted=True, indices=block)[:, targets]
        bad = np.argwhere(~np.isfinite(d))
        if bad.size:
            i, j = bad[0]
            ids = graph.original_ids
            raise UnreachableError(ids[block[i]], ids[targets[j]])
        out[lo:lo + len(block)] = d
    return DistanceMatrix(out, refs, targets)
