"""
Mesh / controller co-clustering strategies.

Every strategy reads the offset matrix D (n x m, squared per-vertex displacement
norms) or the rearranged basis Delta (n x 3m); none needs animation data.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np
import pydantic

from rigsolve.core.exceptions import UsageError, ValidationError
from rigsolve.domain.kmeans import kmeans, two_means_1d
from rigsolve.domain.rig import delta_matrix, offset_matrix
from rigsolve.models.clustering import Clustering
from rigsolve.models.rig import BlendshapeModel

logger = logging.getLogger(__name__)

METHODS = ("rsjd", "rsjd_a", "rs", "sparse", "ssk")


def labels_to_clusters(labels: np.ndarray, k: int) -> List[List[int]]:
    return [np.flatnonzero(labels == j).tolist() for j in range(k)]


# ==================== MESH SEGMENTATION ====================

def segment_mesh_rsjd(D: np.ndarray, k: int, seed: Optional[int]) -> List[List[int]]:
    """k-means over the rows of D."""
    return labels_to_clusters(kmeans(D, k, seed=seed), k)


def segment_mesh_rs(delta: np.ndarray, k: int, seed: Optional[int]) -> List[List[int]]:
    """k-means over the rows of Delta."""
    return labels_to_clusters(kmeans(delta, k, seed=seed), k)


# ==================== CONTROLLER ASSIGNMENT ====================

def cluster_magnitudes(D: np.ndarray, mesh_clusters: Sequence[Sequence[int]]) -> np.ndarray:
    """(K x m) matrix whose row k sums D over the vertices of mesh cluster k."""
    out = np.zeros((len(mesh_clusters), D.shape[1]))
    for k, members in enumerate(mesh_clusters):
        if len(members):
            out[k] = D[list(members)].sum(axis=0)
    return out


def assign_controllers_rsjd(D: np.ndarray, mesh_clusters: Sequence[Sequence[int]]) -> List[List[int]]:
    """
    Compress each column d_i to h_i (mean offset per mesh cluster), split h_i with
    2-means and assign i to every cluster in the high group. Equal entries mean
    there is no high group, so the controller goes everywhere.
    """
    K = len(mesh_clusters)
    sizes = np.array([len(c) for c in mesh_clusters], dtype=np.float64)
    if np.any(sizes == 0):
        raise ValidationError("RSJD assignment needs non-empty mesh clusters")
    H = cluster_magnitudes(D, mesh_clusters) / sizes[:, None]

    ctrl_clusters: List[List[int]] = [[] for _ in range(K)]
    for i in range(D.shape[1]):
        h = H[:, i]
        high, split = two_means_1d(h)
        if not split and not np.any(h):
            logger.warning(f"⚠️ Controller {i} moves no vertex; assigned to all {K} clusters")
        for k in np.flatnonzero(high):
            ctrl_clusters[k].append(i)
    return ctrl_clusters


def adjust_assignment_rsjd_a(D: np.ndarray, clustering: Clustering) -> Clustering:
    """
    Per cluster, threshold p = smallest magnitude among the assigned controllers;
    every unassigned controller with a strictly larger magnitude is added.
    """
    S = cluster_magnitudes(D, clustering.mesh_clusters)
    adjusted = []
    for k, assigned in enumerate(clustering.ctrl_clusters):
        if not assigned:
            logger.warning(f"⚠️ Cluster {k} has no controllers; RSJD_A threshold undefined, skipped")
            adjusted.append(list(assigned))
            continue
        threshold = S[k, assigned].min()
        above = np.flatnonzero(S[k] > threshold).tolist()
        adjusted.append(sorted(set(assigned) | set(above)))

    return clustering.model_copy(update={"ctrl_clusters": adjusted, "method": "rsjd_a"})


def assign_controllers_ssk(D: np.ndarray, segments: Sequence[Sequence[int]]) -> List[List[int]]:
    """
    Assign controller i to the segment holding more than half of its total
    deformation; without such a segment, to the one with the largest share.
    """
    S = cluster_magnitudes(D, segments)
    totals = S.sum(axis=0)
    ctrl_clusters: List[List[int]] = [[] for _ in range(len(segments))]

    for i in range(D.shape[1]):
        if totals[i] == 0:
            logger.warning(f"⚠️ Controller {i} is inert; assigned to segment 0")
            ctrl_clusters[0].append(i)
            continue
        majority = np.flatnonzero(S[:, i] > totals[i] / 2)
        k = int(majority[0]) if majority.size else int(np.argmax(S[:, i]))
        ctrl_clusters[k].append(i)
    return ctrl_clusters


def sparse_clustering(D: np.ndarray) -> Clustering:
    """K = m; every vertex goes to the controller that moves it the most."""
    n, m = D.shape
    owner = np.argmax(D, axis=1)
    return Clustering(
        K=m,
        mesh_clusters=labels_to_clusters(owner, m),
        ctrl_clusters=[[k] for k in range(m)],
        method="sparse",
    )


def full_clustering(n: int, m: int) -> Clustering:
    """The holistic reference: one cluster holding every vertex and controller."""
    return Clustering(K=1, mesh_clusters=[list(range(n))], ctrl_clusters=[list(range(m))], method="full")


# ==================== PIPELINE ====================

def build_clustering(
    model: BlendshapeModel,
    method: str,
    k: Optional[int] = None,
    seed: Optional[int] = None,
    segments: Optional[Sequence[Sequence[int]]] = None,
    D: Optional[np.ndarray] = None,
) -> Clustering:
    """Run one clustering strategy end to end."""
    if method not in METHODS:
        raise UsageError(f"unknown clustering method '{method}', expected one of {METHODS}")
    if D is None:
        D = offset_matrix(model)

    if method == "sparse":
        return sparse_clustering(D)

    if method == "ssk":
        if segments is None:
            raise UsageError("the ssk method needs manual mesh segments")
        segments = [sorted(int(v) for v in s) for s in segments]
        try:
            mesh_only = Clustering(
                K=len(segments), mesh_clusters=segments, ctrl_clusters=[[] for _ in segments], method="ssk"
            )
        except pydantic.ValidationError as e:
            raise ValidationError(f"invalid mesh segments: {e}")
        # segments index D, so they must be a partition of the model's vertices first
        mesh_only.check_against(model.n, model.m)
        return Clustering(
            K=len(segments),
            mesh_clusters=segments,
            ctrl_clusters=assign_controllers_ssk(D, segments),
            method="ssk",
        )

    if k is None:
        raise UsageError(f"method '{method}' needs a cluster count K")

    if method == "rs":
        mesh_clusters = segment_mesh_rs(delta_matrix(model), k, seed)
    else:
        mesh_clusters = segment_mesh_rsjd(D, k, seed)

    clustering = Clustering(
        K=k,
        mesh_clusters=mesh_clusters,
        ctrl_clusters=assign_controllers_rsjd(D, mesh_clusters),
        method="rs" if method == "rs" else "rsjd",
        seed=seed,
    )
    if method == "rsjd_a":
        clustering = adjust_assignment_rsjd_a(D, clustering)
    return clustering
