"""
Data-free clustering scores: density E_D, inter-density E_ID and
reconstruction error E_R, plus the knee heuristic over a K sweep.
"""

from typing import List, Optional, Sequence

import numpy as np

from rigsolve.core.exceptions import DegenerateClusteringError, ValidationError
from rigsolve.domain.clustering import cluster_magnitudes
from rigsolve.models.clustering import Clustering, ClusterScores, SweepRecord


def _check_sizes(n: int, m: int) -> None:
    if n < 1 or m < 1:
        raise ValidationError(f"scores need n >= 1 and m >= 1, got n={n}, m={m}")


def controller_multiplicity(clustering: Clustering, m: int) -> np.ndarray:
    counts = np.zeros(m, dtype=np.int64)
    for members in clustering.ctrl_clusters:
        counts[members] += 1
    return counts


def density(clustering: Clustering, n: int, m: int) -> float:
    """E_D = sum_k n_k m_k / (n m)."""
    _check_sizes(n, m)
    edges = sum(nk * mk for nk, mk in zip(clustering.mesh_sizes(), clustering.ctrl_sizes()))
    return edges / (n * m)


def inter_density(clustering: Clustering, n: int, m: int) -> float:
    """Share of edges whose controller endpoint sits in more than one cluster."""
    _check_sizes(n, m)
    shared = controller_multiplicity(clustering, m) >= 2
    edges = sum(
        len(mesh) * int(shared[ctrl].sum()) if ctrl else 0
        for mesh, ctrl in zip(clustering.mesh_clusters, clustering.ctrl_clusters)
    )
    return edges / (n * m)


def reconstruction_error(D: np.ndarray, clustering: Clustering) -> float:
    """E_R = rejected offset mass / kept offset mass."""
    S = cluster_magnitudes(D, clustering.mesh_clusters)
    kept = 0.0
    total = float(S.sum())
    for k, ctrl in enumerate(clustering.ctrl_clusters):
        if ctrl:
            kept += float(S[k, ctrl].sum())
    if kept <= 0.0:
        raise DegenerateClusteringError("degenerate clustering: no offset mass is kept")
    return (total - kept) / kept


def score_clustering(D: np.ndarray, clustering: Clustering) -> ClusterScores:
    n, m = D.shape
    return ClusterScores(
        density=density(clustering, n, m),
        inter_density=inter_density(clustering, n, m),
        reconstruction_error=reconstruction_error(D, clustering),
    )


def knee_point(records: Sequence[SweepRecord]) -> Optional[int]:
    """
    Heuristic K suggestion: the record farthest from the chord joining the
    extreme points of the E_R-vs-E_D curve. Returns an index into `records`.
    """
    scored = [(idx, r.scores) for idx, r in enumerate(records) if r.scores is not None]
    if len(scored) < 3:
        return None

    pts = np.array([[s.density, s.reconstruction_error] for _, s in scored])
    span = pts.max(axis=0) - pts.min(axis=0)
    span[span == 0] = 1.0
    pts = (pts - pts.min(axis=0)) / span

    a = pts[np.argmin(pts[:, 0])]
    b = pts[np.argmax(pts[:, 0])]
    chord = b - a
    length = np.hypot(*chord)
    if length == 0:
        return None
    dist = np.abs(chord[0] * (pts[:, 1] - a[1]) - chord[1] * (pts[:, 0] - a[0])) / length
    return scored[int(np.argmax(dist))][0]


def mark_knee(records: List[SweepRecord]) -> List[SweepRecord]:
    idx = knee_point(records)
    if idx is None:
        return records
    return [r.model_copy(update={"knee": i == idx}) for i, r in enumerate(records)]
