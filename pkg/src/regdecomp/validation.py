"""Input checks shared by the functional API and the estimator."""
from __future__ import annotations

import numbers

import numpy as np

__all__ = ["EmptyGroupError", "check_distances", "check_labels",
           "check_positive_int", "check_seed"]


class EmptyGroupError(ValueError):
    """A labeling leaves at least one of its k groups without members."""


def check_distances(D, name: str = "D") -> np.ndarray:
    """Finite, nonnegative 2-D float64 array (C-contiguous)."""
    D = np.ascontiguousarray(D.entries if hasattr(D, "entries") else D,
                             dtype=np.float64)
    if D.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {D.shape}")
    if not np.isfinite(D).all():
        raise ValueError(f"{name} contains NaN or infinity")
    if D.size and D.min() < 0:
        raise ValueError(f"{name} must be nonnegative")
    return D


def check_labels(labels, n: int, k: int | None = None,
                 require_nonempty: bool = False) -> tuple[np.ndarray, int]:
    """Validate a 0-based label vector; returns ``(labels, k)``."""
    z = np.asarray(labels)
    if z.ndim != 1 or len(z) != n:
        raise ValueError(f"labels must be a vector of length {n}, got shape {z.shape}")
    if z.size and not np.issubdtype(z.dtype, np.integer):
        if not np.all(np.equal(np.mod(z, 1), 0)):
            raise ValueError("labels must be integers")
    z = z.astype(np.int64)
    if k is None:
        k = int(z.max()) + 1 if z.size else 0
    if z.size and (z.min() < 0 or z.max() >= k):
        raise ValueError(f"labels must lie in 0..{k - 1}")
    if require_nonempty:
        sizes = np.bincount(z, minlength=k)
        if (sizes == 0).any():
            empty = np.flatnonzero(sizes == 0).tolist()
            raise EmptyGroupError(f"groups {empty} are empty")
    return z, k


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_seed(seed) -> int:
    """Seeds are nonnegative integers (hashed into numpy SeedSequence entropy)."""
    if seed is None:
        return int(np.random.SeedSequence().entropy % (1 << 63))
    if isinstance(seed, bool) or not isinstance(seed, numbers.Integral) or seed < 0:
        raise ValueError(f"seed must be a nonnegative integer, got {seed!r}")
    return int(seed)
