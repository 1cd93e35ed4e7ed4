"""scikit-learn estimator wrapper around :func:`regular_decomposition`."""
from __future__ import annotations

import numbers

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .core import (DEFAULT_EPSILON_FLOOR, RDConfig, classify_many,
                   regular_decomposition)

__all__ = ["RegularDecomposition"]


def _seed_from(random_state) -> int | None:
    if random_state is None or isinstance(random_state, numbers.Integral):
        return random_state
    if isinstance(random_state, np.random.RandomState):
        return int(random_state.randint(np.iinfo(np.int32).max))
    if isinstance(random_state, np.random.Generator):
        return int(random_state.integers(np.iinfo(np.int64).max))
    raise ValueError(f"cannot use {random_state!r} as a random_state")


class RegularDecomposition(ClusterMixin, TransformerMixin, BaseEstimator):
    """Partition nodes by their hop-distance profiles to reference nodes.

    Rows of ``X`` are target nodes, columns are reference nodes, so ``X``
    is the transpose of the reference-by-target distance matrix.

    Parameters
    ----------
    n_clusters : int, default=2
        Number of groups k.
    n_restarts : int, default=100
        Random restarts; the lowest-cost run is kept.
    max_iter : int, default=30
        Local updates per restart.
    epsilon_floor : float, default=1e-6
        Lower bound on fitted mean distances (keeps logs finite).
    early_stop : bool, default=True
        Stop a restart once the labeling is a fixed point.
    random_state : int, RandomState, Generator or None, default=None
    n_jobs : int or None, default=None
        Threads for restarts. Results do not depend on it.

    Attributes
    ----------
    labels_ : ndarray of shape (n_samples,)
    means_ : ndarray of shape (n_features, n_clusters)
        Fitted mean distance from each reference to each group.
    cost_ : float
        Negative log-likelihood of the fit (constant term dropped).
    n_iter_ : int
        Local updates used by the winning restart.
    restart_costs_ : ndarray of shape (n_restarts,)
    """

    def __init__(self, n_clusters=2, *, n_restarts=100, max_iter=30,
                 epsilon_floor=DEFAULT_EPSILON_FLOOR, early_stop=True,
                 random_state=None, n_jobs=None):
        self.n_clusters = n_clusters
        self.n_restarts = n_restarts
        self.max_iter = max_iter
        self.epsilon_floor = epsilon_floor
        self.early_stop = early_stop
        self.random_state = random_state
        self.n_jobs = n_jobs

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.input_tags.positive_only = True
        return tags

    def fit(self, X, y=None):
        X = validate_data(self, X, dtype=np.float64, ensure_min_samples=1)
        if X.min(initial=0) < 0:
            raise ValueError("Negative values in data passed to RegularDecomposition")
        config = RDConfig(k=self.n_clusters, s_max=self.n_restarts,
                          t_max=self.max_iter, epsilon_floor=self.epsilon_floor,
                          early_stop=self.early_stop)
        model = regular_decomposition(X.T, config, _seed_from(self.random_state),
                                      n_jobs=self.n_jobs)
        self.model_ = model
        self.labels_ = model.labels
        self.means_ = model.means
        self.cost_ = model.cost
        self.n_iter_ = model.iterations_used
        self.restart_costs_ = model.restart_costs
        return self

    def transform(self, X):
        """Per-group cost of each row under the fitted means, shape (n, k)."""
        check_is_fitted(self)
        X = validate_data(self, X, dtype=np.float64, reset=False)
        return self.means_.sum(axis=0) - X @ np.log(self.means_)

    def predict(self, X):
        """Cheapest group for each row (out-of-sample classification)."""
        check_is_fitted(self)
        X = validate_data(self, X, dtype=np.float64, reset=False)
        return classify_many(X, self.means_)

    def score(self, X, y=None):
        """Negative total cost of assigning ``X`` to its best groups."""
        return -float(self.transform(X).min(axis=1).sum())
