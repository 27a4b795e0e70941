"""
Reproducible synthetic rigs, sparse animations and noisy scan-like targets.

Blendshapes deform local, smoothly decaying patches of an ellipsoidal "head",
and correctives tie together controllers whose patches overlap, so the model has
the locality that makes clustering worthwhile.
"""

import logging
from typing import List, Set, Tuple

import numpy as np

from rigsolve.core.exceptions import ValidationError
from rigsolve.domain.rig import evaluate_rig
from rigsolve.models.rig import BlendshapeModel, CorrectiveTerm
from rigsolve.models.synth import GenSpec

logger = logging.getLogger(__name__)

EVENT_LENGTH = (8, 20)
PEAK_RANGE = (0.3, 1.0)
BLENDSHAPE_AMPLITUDE = (0.5, 2.0)
CORRECTIVE_AMPLITUDE = (0.1, 0.5)


def _unit(v: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(v)
    return v / norm if norm > 0 else np.array([0.0, 0.0, 1.0])


def _head_vertices(rng: np.random.Generator, n: int, width: float) -> np.ndarray:
    semi = width / 2.0
    axes = np.array([semi, 1.25 * semi, 1.1 * semi])
    dirs = rng.normal(size=(n, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return dirs * axes


def _patch(positions: np.ndarray, center: int, size: int) -> Tuple[np.ndarray, np.ndarray]:
    """The `size` vertices nearest to `center` and a raised-cosine falloff over them."""
    dist = np.linalg.norm(positions - positions[center], axis=1)
    idx = np.argpartition(dist, size - 1)[:size]
    radius = dist[idx].max()
    if radius == 0:
        return idx, np.ones(idx.size)
    return idx, 0.5 * (1.0 + np.cos(np.pi * dist[idx] / radius))


def _sample_tuples(
    rng: np.random.Generator,
    adjacency: np.ndarray,
    size: int,
    count: int,
    taken: Set[Tuple[int, ...]],
) -> List[Tuple[int, ...]]:
    """Draw `count` distinct controller tuples whose footprints pairwise overlap."""
    if count == 0:
        return []
    edges = np.argwhere(np.triu(adjacency, 1))
    found: List[Tuple[int, ...]] = []
    attempts, budget = 0, 200 * count + 1000
    while edges.size and len(found) < count and attempts < budget:
        attempts += 1
        members = [int(x) for x in edges[rng.integers(len(edges))]]
        while len(members) < size:
            common = np.flatnonzero(np.all(adjacency[members], axis=0))
            if common.size == 0:
                break
            members.append(int(rng.choice(common)))
        if len(members) < size:
            continue
        key = tuple(sorted(members))
        if key not in taken:
            taken.add(key)
            found.append(key)

    if len(found) < count:
        raise ValidationError(
            f"infeasible spec: found only {len(found)} of {count} requested "
            f"{size}-controller correctives with overlapping footprints"
        )
    return found


def generate_model(spec: GenSpec) -> BlendshapeModel:
    rng = np.random.default_rng([spec.seed, 0])
    n, m = spec.n, spec.m
    positions = _head_vertices(rng, n, spec.head_width)

    basis = np.zeros((3 * n, m))
    members = np.zeros((m, n), dtype=bool)
    for i in range(m):
        center = int(rng.integers(n))
        idx, falloff = _patch(positions, center, spec.footprint)
        outward = _unit(positions[center])
        direction = _unit(outward + 0.5 * rng.normal(size=3))
        amplitude = rng.uniform(*BLENDSHAPE_AMPLITUDE)
        disp = amplitude * falloff[:, None] * direction[None, :]
        basis[(3 * idx[:, None] + np.arange(3)).reshape(-1), i] = disp.reshape(-1)
        members[i, idx[falloff > 0]] = True

    overlap = members.astype(np.int64) @ members.T.astype(np.int64)
    adjacency = overlap > 0
    np.fill_diagonal(adjacency, False)

    taken: Set[Tuple[int, ...]] = set()
    tuples = (
        _sample_tuples(rng, adjacency, 2, spec.n_pairs, taken)
        + _sample_tuples(rng, adjacency, 3, spec.n_triples, taken)
        + _sample_tuples(rng, adjacency, 4, spec.n_quads, taken)
    )

    correctives = []
    for ids in tuples:
        region = np.flatnonzero(np.all(members[list(ids)], axis=0))
        if region.size == 0:
            region = np.flatnonzero(members[ids[0]] & members[ids[1]])
        center = positions[region].mean(axis=0)
        dist = np.linalg.norm(positions[region] - center, axis=1)
        radius = dist.max() if dist.max() > 0 else 1.0
        falloff = 0.5 * (1.0 + np.cos(np.pi * dist / radius))
        direction = _unit(rng.normal(size=3))
        amplitude = rng.uniform(*CORRECTIVE_AMPLITUDE) * rng.choice([-1.0, 1.0])
        offset = np.zeros(3 * n)
        offset[(3 * region[:, None] + np.arange(3)).reshape(-1)] = (
            amplitude * falloff[:, None] * direction[None, :]
        ).reshape(-1)
        correctives.append(CorrectiveTerm(ids=ids, offset=offset))

    logger.info(f"✅ Generated rig n={n} m={m} with {len(correctives)} correctives (seed={spec.seed})")
    return BlendshapeModel(n=n, m=m, neutral=positions.reshape(-1), basis=basis, correctives=correctives)


def generate_animation(model: BlendshapeModel, spec: GenSpec) -> np.ndarray:
    """
    T x m weights built from smooth sin^2 activation events. The event rate is set
    so that on average `spec.sparsity` controllers are active per frame.
    """
    rng = np.random.default_rng([spec.seed, 1])
    T, m = spec.frames, model.m
    weights = np.zeros((T, m))
    if T == 0 or spec.sparsity == 0:
        return weights

    mean_len = sum(EVENT_LENGTH) / 2.0
    active = mean_len - 1.0  # the envelope is zero on both ends of an event
    p = min(spec.sparsity / m, 0.999)
    # Poisson events covering a fraction p of the (extended) timeline
    rate = -np.log1p(-p) * (T + mean_len) / active

    frames = np.arange(T)
    for i in range(m):
        for _ in range(rng.poisson(rate)):
            length = int(rng.integers(EVENT_LENGTH[0], EVENT_LENGTH[1] + 1))
            start = int(rng.integers(-length + 1, T))
            peak = rng.uniform(*PEAK_RANGE)
            phase = (frames - start) / length
            inside = (phase > 0) & (phase < 1)
            envelope = peak * np.sin(np.pi * phase[inside]) ** 2
            weights[inside, i] = np.maximum(weights[inside, i], envelope)

    return np.clip(weights, 0.0, 1.0)


def make_targets(model: BlendshapeModel, weights: np.ndarray, noise_sigma: float, seed: int) -> np.ndarray:
    """f(w_t) plus i.i.d. Gaussian noise of std `noise_sigma` on every coordinate."""
    if noise_sigma < 0:
        raise ValidationError(f"noise_sigma must be non-negative, got {noise_sigma}")
    weights = np.asarray(weights, dtype=np.float64)
    clean = np.array([evaluate_rig(model, w) for w in weights]).reshape(len(weights), 3 * model.n)
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        clean = clean + rng.normal(0.0, noise_sigma, size=clean.shape)
    return clean
