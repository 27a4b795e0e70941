"""
Pytest configuration and shared fixtures
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from rigsolve.domain.synth import generate_animation, generate_model, make_targets  # noqa: E402
from rigsolve.models.rig import BlendshapeModel, CorrectiveTerm  # noqa: E402
from rigsolve.models.solver import SolverConfig  # noqa: E402
from rigsolve.models.synth import GenSpec  # noqa: E402


@pytest.fixture
def tiny_model():
    """n=1, m=2: b1=(1,0,0), b2=(0,1,0), pair corrective {0,1} = (0,0,1)."""
    return BlendshapeModel(
        n=1,
        m=2,
        neutral=np.zeros(3),
        basis=np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]),
        correctives=[CorrectiveTerm(ids=(0, 1), offset=[0.0, 0.0, 1.0])],
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_spec():
    return GenSpec(n=80, m=8, n_pairs=4, n_triples=1, n_quads=0, footprint=35, frames=12, sparsity=2.0, seed=7)


@pytest.fixture
def small_data(small_spec):
    model = generate_model(small_spec)
    weights = generate_animation(model, small_spec)
    targets = make_targets(model, weights, small_spec.noise_sigma, seed=11)
    return model, weights, targets


@pytest.fixture
def config():
    return SolverConfig(
        alpha=0.0, rho=1.0, admm_iters=30, cd_iters=50, cd_tol=1e-6, admm_tol=1e-4,
        zero_threshold=1e-6, workers=1,
    )
