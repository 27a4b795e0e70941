"""
Model builders shared by the test modules
"""

import numpy as np

from rigsolve.models.clustering import Clustering
from rigsolve.models.rig import BlendshapeModel, CorrectiveTerm


def random_model(rng: np.random.Generator, n: int, m: int, n_correctives: int = 0) -> BlendshapeModel:
    """Dense random rig with pair/triple correctives on distinct controller tuples."""
    correctives = []
    seen = set()
    while len(correctives) < n_correctives and m >= 2:
        size = int(rng.integers(2, min(m, 3) + 1))
        ids = tuple(sorted(int(i) for i in rng.choice(m, size=size, replace=False)))
        if ids in seen:
            continue
        seen.add(ids)
        correctives.append(CorrectiveTerm(ids=ids, offset=0.3 * rng.normal(size=3 * n)))
    return BlendshapeModel(
        n=n,
        m=m,
        neutral=rng.normal(size=3 * n),
        basis=rng.normal(size=(3 * n, m)),
        correctives=correctives,
    )


def block_model(n_per_block: int = 3, blocks: int = 2) -> BlendshapeModel:
    """Linear rig where block b's vertices move only under controller b (x direction, unit length)."""
    n = n_per_block * blocks
    basis = np.zeros((3 * n, blocks))
    for b in range(blocks):
        for v in range(b * n_per_block, (b + 1) * n_per_block):
            basis[3 * v, b] = 1.0
    return BlendshapeModel(n=n, m=blocks, neutral=np.zeros(3 * n), basis=basis)


def full(n: int, m: int) -> Clustering:
    return Clustering(K=1, mesh_clusters=[list(range(n))], ctrl_clusters=[list(range(m))])
