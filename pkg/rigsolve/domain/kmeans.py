"""
Lloyd k-means with seeded k-means++ initialisation.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from rigsolve.core.exceptions import ValidationError

MAX_ITER = 300


@dataclass
class KMeansFit:
    labels: np.ndarray
    centroids: np.ndarray
    # within-cluster sum of squares after each update step
    inertia: List[float] = field(default_factory=list)
    iterations: int = 0


def _as_rows(rows) -> np.ndarray:
    X = np.asarray(rows, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise ValidationError(f"k-means expects a 2-D matrix of rows, got shape {X.shape}")
    return X


def _sq_distances(X: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # |x|^2 - 2 x.c + |c|^2, clipped against round-off
    d = (X * X).sum(axis=1)[:, None] - 2.0 * X @ centroids.T + (centroids * centroids).sum(axis=1)[None, :]
    return np.maximum(d, 0.0)


def kmeans_plusplus_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n_samples = X.shape[0]
    chosen = [int(rng.integers(0, n_samples))]
    dist_sq = _sq_distances(X, X[chosen[0]][None, :])[:, 0]

    for _ in range(1, k):
        total = dist_sq.sum()
        if total > 0:
            next_idx = int(rng.choice(n_samples, p=dist_sq / total))
        else:
            # every point coincides with a chosen centroid
            free = np.setdiff1d(np.arange(n_samples), chosen)
            next_idx = int(rng.choice(free))
        chosen.append(next_idx)
        dist_sq = np.minimum(dist_sq, _sq_distances(X, X[next_idx][None, :])[:, 0])

    return X[chosen].copy()


def _repair_empty(X: np.ndarray, labels: np.ndarray, centroids: np.ndarray, k: int) -> None:
    """Re-seed each empty cluster at the point farthest from its centroid."""
    for j in range(k):
        counts = np.bincount(labels, minlength=k)
        if counts[j] > 0:
            continue
        dist = ((X - centroids[labels]) ** 2).sum(axis=1)
        # only steal from clusters that keep at least one member
        dist[counts[labels] <= 1] = -1.0
        far = int(np.argmax(dist))
        labels[far] = j
        centroids[j] = X[far]


def _inertia(X: np.ndarray, labels: np.ndarray, centroids: np.ndarray) -> float:
    return float(((X - centroids[labels]) ** 2).sum())


def fit_kmeans(rows, k: int, seed: Optional[int] = None, max_iter: int = MAX_ITER) -> KMeansFit:
    X = _as_rows(rows)
    n_samples = X.shape[0]
    if k < 1 or k > n_samples:
        raise ValidationError(f"K={k} outside [1, {n_samples}]")

    rng = np.random.default_rng(seed)
    centroids = kmeans_plusplus_init(X, k, rng)
    labels = np.argmin(_sq_distances(X, centroids), axis=1)
    _repair_empty(X, labels, centroids, k)

    fit = KMeansFit(labels=labels, centroids=centroids)
    for it in range(1, max_iter + 1):
        for j in range(k):
            centroids[j] = X[labels == j].mean(axis=0)
        fit.inertia.append(_inertia(X, labels, centroids))
        fit.iterations = it

        new_labels = np.argmin(_sq_distances(X, centroids), axis=1)
        _repair_empty(X, new_labels, centroids, k)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels

    fit.labels = labels
    fit.centroids = centroids
    return fit


def kmeans(rows, k: int, seed: Optional[int] = None, max_iter: int = MAX_ITER) -> np.ndarray:
    """Cluster labels (0..k-1) for each row; every cluster is non-empty."""
    return fit_kmeans(rows, k, seed=seed, max_iter=max_iter).labels


def two_means_1d(values) -> Tuple[np.ndarray, bool]:
    """
    Exact 2-means on scalars: the optimal split of the sorted values.

    Returns (high_mask, split_found). split_found is False when all values are
    equal, in which case there is no meaningful high group.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.size < 2 or np.ptp(v) == 0.0:
        return np.ones(v.size, dtype=bool), False

    order = np.argsort(v, kind="stable")
    s = v[order]
    csum = np.cumsum(s)
    csq = np.cumsum(s * s)
    total, total_sq = csum[-1], csq[-1]

    best_cost, best_cut = np.inf, 1
    for cut in range(1, s.size):
        left_n, right_n = cut, s.size - cut
        left_cost = csq[cut - 1] - csum[cut - 1] ** 2 / left_n
        right_sum = total - csum[cut - 1]
        right_cost = (total_sq - csq[cut - 1]) - right_sum ** 2 / right_n
        cost = left_cost + right_cost
        if cost < best_cost - 1e-15:
            best_cost, best_cut = cost, cut

    high = np.zeros(v.size, dtype=bool)
    high[order[best_cut:]] = True
    return high, True
