"""Regular decomposition of a reference-by-target distance matrix.

Distances ``D[i, j]`` from reference ``i`` to target ``j`` are modelled as
independent Poisson counts whose mean depends only on the reference and
the target's group. For a labeling ``z`` the fitted means are the
group-conditional row averages, and the negative log-likelihood (dropping
the ``log D!`` constant) splits into per-target costs::

    cost[j, v] = sum_i means[i, v] - D[i, j] * log(means[i, v])

A local update reassigns every target to its cheapest group; restarts
from random labelings guard against poor local optima. Labels are
0-based throughout.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.optimize import linear_sum_assignment

from .graph import Graph
from .validation import (EmptyGroupError, check_distances, check_labels,
                         check_positive_int, check_seed)

logger = logging.getLogger(__name__)

__all__ = [
    "RDConfig",
    "RDModel",
    "KneeResult",
    "estimate_means",
    "node_costs",
    "total_cost",
    "local_update",
    "initial_labels",
    "regular_decomposition",
    "classify",
    "classify_many",
    "select_k",
    "misclassification_rate",
    "expand_partition",
]

DEFAULT_EPSILON_FLOOR = 1e-6


@dataclass(frozen=True)
class RDConfig:
    k: int = 2
    s_max: int = 100
    t_max: int = 30
    epsilon_floor: float = DEFAULT_EPSILON_FLOOR
    early_stop: bool = True

    def __post_init__(self):
        check_positive_int(self.k, "k")
        check_positive_int(self.s_max, "s_max")
        check_positive_int(self.t_max, "t_max")
        if not 0 < self.epsilon_floor < 1:
            raise ValueError("epsilon_floor must lie in (0, 1)")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(eq=False)
class RDModel:
    labels: np.ndarray
    means: np.ndarray
    cost: float
    config: RDConfig
    seed: int
    restarts_run: int
    iterations_used: int
    restart_costs: np.ndarray = field(repr=False, default=None)

    @property
    def k(self) -> int:
        return self.means.shape[1]

    @property
    def group_sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k)


@dataclass(eq=False)
class KneeResult:
    k_star: int
    costs: np.ndarray
    models: list
    monotone: bool
    tau: float


def _one_hot(labels: np.ndarray, k: int) -> np.ndarray:
    R = np.zeros((len(labels), k))
    R[np.arange(len(labels)), labels] = 1.0
    return R


def _means(D, labels, k, floor):
    sizes = np.bincount(labels, minlength=k)
    if (sizes == 0).any():
        raise EmptyGroupError(f"groups {np.flatnonzero(sizes == 0).tolist()} are empty")
    return np.maximum((D @ _one_hot(labels, k)) / sizes, floor)


def _costs(D, means):
    return means.sum(axis=0) - D.T @ np.log(means)


def estimate_means(D, labels, k: int | None = None,
                   epsilon_floor: float = DEFAULT_EPSILON_FLOOR) -> np.ndarray:
    """Group-conditional row averages of ``D`` (m x k), floored at ``epsilon_floor``.

    Raises ``EmptyGroupError`` if some group in ``0..k-1`` has no targets.
    """
    D = check_distances(D)
    z, k = check_labels(labels, D.shape[1], k)
    return _means(D, z, k, epsilon_floor)


def node_costs(D, means) -> np.ndarray:
    """Per-target, per-group cost matrix (n x k)."""
    D = check_distances(D)
    means = np.asarray(means, dtype=np.float64)
    if means.ndim != 2 or means.shape[0] != D.shape[0]:
        raise ValueError(f"means must have {D.shape[0]} rows, got shape {means.shape}")
    if (means <= 0).any():
        raise ValueError("means must be positive")
    return _costs(D, means)


def total_cost(D, labels, k: int | None = None,
               epsilon_floor: float = DEFAULT_EPSILON_FLOOR) -> float:
    """Negative log-likelihood of ``labels`` with means refitted from ``D``."""
    D = check_distances(D)
    z, k = check_labels(labels, D.shape[1], k)
    return _total_cost(D, z, k, epsilon_floor)


def _total_cost(D, z, k, floor):
    costs = _costs(D, _means(D, z, k, floor))
    return float(costs[np.arange(len(z)), z].sum())


def _local_update(D, z, k, floor):
    """Returns ``(new_labels, costs, repaired)``."""
    costs = _costs(D, _means(D, z, k, floor))
    new = np.argmin(costs, axis=1)
    sizes = np.bincount(new, minlength=k)
    repaired = False
    if (sizes == 0).any():
        # donate the worst-fitting target of a group with >1 member, once per node
        repaired = True
        own = costs[np.arange(len(new)), new]
        moved = np.zeros(len(new), dtype=bool)
        for g in np.flatnonzero(sizes == 0):
            eligible = ~moved & (sizes[new] > 1)
            j = int(np.argmax(np.where(eligible, own, -np.inf)))
            sizes[new[j]] -= 1
            new[j] = g
            sizes[g] = 1
            moved[j] = True
    return new, costs, repaired


def local_update(D, labels, k: int | None = None,
                 epsilon_floor: float = DEFAULT_EPSILON_FLOOR,
                 return_repaired: bool = False):
    """One averaging + reassignment step.

    Each target moves to its cheapest group (ties to the smallest group
    index). If a group ends up empty, it receives the not-yet-moved
    target with the highest cost under its new group, taken only from
    groups with more than one member; empty groups are filled in
    increasing index order.
    """
    D = check_distances(D)
    z, k = check_labels(labels, D.shape[1], k, require_nonempty=True)
    new, _, repaired = _local_update(D, z, k, epsilon_floor)
    return (new, repaired) if return_repaired else new


def initial_labels(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """Uniform random labeling, redrawn until every group is nonempty."""
    if n < k:
        raise ValueError(f"cannot split {n} targets into {k} nonempty groups")
    while True:
        z = rng.integers(k, size=n)
        if len(np.unique(z)) == k:
            return z


def _restart(D, config, seed, s):
    rng = np.random.default_rng([seed, s])
    z = initial_labels(rng, D.shape[1], config.k)
    t = 0
    for t in range(1, config.t_max + 1):
        new, _, _ = _local_update(D, z, config.k, config.epsilon_floor)
        if config.early_stop and np.array_equal(new, z):
            z = new
            break
        z = new
    return _total_cost(D, z, config.k, config.epsilon_floor), z, t


def regular_decomposition(D, config: RDConfig | None = None, seed: int = 0,
                          n_jobs: int | None = None) -> RDModel:
    """Best of ``config.s_max`` randomly started local-update runs.

    Restart ``s`` draws from the child stream ``default_rng([seed, s])``,
    so the result is the same for any ``n_jobs``. Cost ties go to the
    earliest restart.
    """
    config = config or RDConfig()
    seed = check_seed(seed)
    D = check_distances(D)
    n = D.shape[1]
    if n < config.k:
        raise ValueError(f"need at least k={config.k} targets, got {n}")
    if n_jobs is None or n_jobs == 1:
        results = [_restart(D, config, seed, s) for s in range(config.s_max)]
    else:
        from joblib import Parallel, delayed
        results = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(_restart)(D, config, seed, s) for s in range(config.s_max))
    costs = np.array([r[0] for r in results])
    best = int(np.argmin(costs))
    cost, z, iters = results[best]
    logger.debug("k=%d best restart %d cost %.6g", config.k, best, cost)
    return RDModel(labels=z,
                   means=_means(D, z, config.k, config.epsilon_floor),
                   cost=cost, config=config, seed=seed,
                   restarts_run=config.s_max, iterations_used=iters,
                   restart_costs=costs)


def classify_many(X, means) -> np.ndarray:
    """Cheapest group for each row of ``X`` (n x m distances to the references)."""
    X = check_distances(X, "X")
    means = np.asarray(means, dtype=np.float64)
    if means.ndim != 2 or X.shape[1] != means.shape[0]:
        raise ValueError(f"X has {X.shape[1]} reference columns, means has "
                         f"{means.shape[0] if means.ndim == 2 else '?'} rows")
    return np.argmin(means.sum(axis=0) - X @ np.log(means), axis=1)


def classify(dist_to_refs, means) -> int:
    """Group of one node given its distances to the m reference nodes."""
    x = np.asarray(dist_to_refs, dtype=np.float64).reshape(1, -1)
    return int(classify_many(x, means)[0])


def select_k(D, k_max: int, config: RDConfig | None = None, seed: int = 0,
             tau: float = 0.02, n_jobs: int | None = None) -> KneeResult:
    """Knee of the cost curve L(1..k_max).

    ``k*`` is the smallest k whose next drop ``L(k) - L(k+1)`` is below
    ``tau`` times the total drop ``L(1) - L(k_max)``; ``k_max`` if none is.
    """
    config = config or RDConfig()
    D = check_distances(D)
    k_max = check_positive_int(k_max, "k_max")
    if k_max > D.shape[1]:
        raise ValueError(f"k_max={k_max} exceeds the {D.shape[1]} targets")
    models = [regular_decomposition(D, replace(config, k=k), seed, n_jobs)
              for k in range(1, k_max + 1)]
    costs = np.array([m.cost for m in models])
    scale = max(costs[0] - costs[-1], 1e-9 * max(abs(costs[0]), 1.0))
    drops = -np.diff(costs) / scale
    below = np.flatnonzero(drops < tau)
    k_star = int(below[0]) + 1 if below.size else k_max
    monotone = bool((np.diff(costs) <= 0).all())
    if not monotone:
        logger.warning("cost curve is not monotone in k; consider more restarts")
    return KneeResult(k_star, costs, models, monotone, tau)


def _best_matching_exhaustive(C):
    K = C.shape[0]
    perms = np.array(list(itertools.permutations(range(K))))
    return int(C[np.arange(K), perms].sum(axis=1).max())


def _best_matching_hungarian(C):
    rows, cols = linear_sum_assignment(C, maximize=True)
    return int(C[rows, cols].sum())


def misclassification_rate(labels, true_labels) -> float:
    """Fraction of mismatches under the best relabeling of ``labels``.

    Exhaustive over permutations for up to 8 groups, Hungarian matching
    on the confusion matrix beyond that.
    """
    z = np.asarray(labels, dtype=np.int64)
    t = np.asarray(true_labels, dtype=np.int64)
    if z.shape != t.shape or z.ndim != 1:
        raise ValueError("labelings must be vectors of equal length")
    if z.size == 0:
        return 0.0
    K = int(max(z.max(), t.max())) + 1
    C = np.zeros((K, K), dtype=np.int64)
    np.add.at(C, (z, t), 1)
    agree = _best_matching_exhaustive(C) if K <= 8 else _best_matching_hungarian(C)
    return 1.0 - agree / z.size


def expand_partition(graph: Graph, labels) -> np.ndarray:
    """Give unlabeled neighbours of labeled nodes the majority neighbour label.

    ``labels`` has one entry per graph node, ``-1`` for unlabeled. A single
    pass: only originally labeled nodes vote, and they keep their labels.
    Ties go to the smallest group. For directed graphs a labeled node
    passes its label along its out-edges.
    """
    z = np.asarray(labels, dtype=np.int64)
    if z.shape != (graph.node_count,):
        raise ValueError(f"labels must have length {graph.node_count}")
    out = z.copy()
    src = np.repeat(np.arange(graph.node_count), graph.degrees())
    dst = graph.indices
    hit = (z[src] >= 0) & (z[dst] < 0)
    if not hit.any():
        return out
    dst, grp = dst[hit], z[src[hit]]
    nodes, inv = np.unique(dst, return_inverse=True)
    votes = np.zeros((len(nodes), int(z.max()) + 1), dtype=np.int64)
    np.add.at(votes, (inv, grp), 1)
    out[nodes] = np.argmax(votes, axis=1)
    return out
