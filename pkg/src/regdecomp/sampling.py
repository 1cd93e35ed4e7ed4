"""Reference-node selection: uniform, or biased toward high betweenness."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .graph import UNREACHABLE, Graph, bfs_tree, is_connected

__all__ = ["ReferenceSet", "uniform_references", "betweenness_references",
           "shortest_path", "path_frequencies", "top_frequency_nodes"]


@dataclass(frozen=True, eq=False)
class ReferenceSet:
    nodes: np.ndarray
    strategy: str
    seed: int | None = None
    num_pairs: int | None = None
    frequencies: np.ndarray | None = field(default=None, repr=False)

    def __len__(self):
        return len(self.nodes)

    def provenance(self) -> dict:
        rec = {"strategy": self.strategy, "seed": self.seed, "size": len(self.nodes)}
        if self.num_pairs is not None:
            rec["num_pairs"] = self.num_pairs
            rec["frequencies"] = self.frequencies.tolist()
        return rec

    def save(self, csv_path, graph: Graph, json_path=None) -> None:
        """One-column CSV of external IDs, plus an optional JSON provenance file."""
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["node_id"])
            for v in self.nodes:
                w.writerow([graph.original_ids[v]])
        if json_path is not None:
            with open(json_path, "w", encoding="utf-8") as fh:
                json.dump(self.provenance(), fh, indent=2, sort_keys=True)


def uniform_references(graph: Graph, m: int, seed: int) -> ReferenceSet:
    """``m`` distinct nodes drawn uniformly without replacement."""
    n = graph.node_count
    if not 1 <= m <= n:
        raise ValueError(f"m must be in [1, {n}], got {m}")
    rng = np.random.default_rng(seed)
    return ReferenceSet(rng.choice(n, size=m, replace=False), "uniform", seed)


def shortest_path(parent: np.ndarray, target: int) -> list[int]:
    """Walk a BFS parent array back from ``target`` to the root."""
    if parent[target] == UNREACHABLE:
        raise ValueError(f"node {target} not reached")
    path = [target]
    while parent[path[-1]] != path[-1]:
        path.append(int(parent[path[-1]]))
    return path[::-1]


def path_frequencies(graph: Graph, pairs) -> np.ndarray:
    """Per-node count of appearances on one BFS shortest path per pair.

    Endpoints count. BFS trees are cached per source.
    """
    counts = np.zeros(graph.node_count, dtype=np.int64)
    parents: dict[int, np.ndarray] = {}
    for s, t in pairs:
        s, t = int(s), int(t)
        if s not in parents:
            parents[s] = bfs_tree(graph, s)[1]
        counts[shortest_path(parents[s], t)] += 1
    return counts


def top_frequency_nodes(counts: np.ndarray, m: int) -> np.ndarray:
    """Up to ``m`` nodes with nonzero count: count descending, index ascending."""
    seen = np.flatnonzero(counts)
    return seen[np.lexsort((seen, -counts[seen]))][:m]


def betweenness_references(graph: Graph, num_pairs: int, m: int,
                           seed: int) -> ReferenceSet:
    """Most frequent nodes on shortest paths between random node pairs.

    Pairs are uniform over ordered pairs of distinct nodes. Returns up to
    ``m`` nodes ordered by decreasing frequency, then increasing index.
    """
    if num_pairs < 1 or m < 1:
        raise ValueError("num_pairs and m must be positive")
    n = graph.node_count
    if n < 2 or not is_connected(graph):
        raise ValueError("betweenness sampling needs a connected graph "
                         "(strongly connected if directed)")
    rng = np.random.default_rng(seed)
    src = rng.integers(n, size=num_pairs)
    dst = rng.integers(n - 1, size=num_pairs)
    dst += dst >= src  # uniform over nodes other than the source
    counts = path_frequencies(graph, zip(src, dst))
    order = top_frequency_nodes(counts, m)
    return ReferenceSet(order, "betweenness", seed, num_pairs, counts[order])
