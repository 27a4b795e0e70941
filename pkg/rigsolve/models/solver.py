from typing import Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from rigsolve.core.config import settings

SolveMethod = Literal["holistic", "naive", "admm"]


class SolverConfig(BaseModel):
    """Knobs shared by all three solvers. Defaults come from Settings."""

    alpha: float = Field(default_factory=lambda: settings.ALPHA, ge=0.0)
    alpha_per_cluster: Dict[int, float] = Field(default_factory=dict)
    rho: float = Field(default_factory=lambda: settings.RHO, gt=0.0)
    admm_iters: int = Field(default_factory=lambda: settings.ADMM_ITERS, ge=1)
    cd_iters: int = Field(default_factory=lambda: settings.CD_ITERS, ge=1)
    cd_tol: float = Field(default_factory=lambda: settings.CD_TOL, gt=0.0)
    admm_tol: float = Field(default_factory=lambda: settings.ADMM_TOL, gt=0.0)
    zero_threshold: float = Field(default_factory=lambda: settings.ZERO_THRESHOLD, gt=0.0, le=0.01)
    randomize_order: bool = False
    inexact: bool = False
    warm_start: bool = False
    seed: int = 0
    workers: int = Field(default_factory=lambda: settings.WORKERS, ge=1)

    def alpha_for(self, k: int) -> float:
        return self.alpha_per_cluster.get(k, self.alpha)


class IndexMap(BaseModel):
    """G(k, i): local position i of cluster k -> global controller index."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    maps: List[np.ndarray]

    def __len__(self) -> int:
        return len(self.maps)

    def lift(self, k: int, local: np.ndarray, m: int) -> np.ndarray:
        out = np.zeros(m)
        out[self.maps[k]] = local
        return out

    def restrict(self, k: int, global_vec: np.ndarray) -> np.ndarray:
        return global_vec[self.maps[k]]


class MultiplicityMatrix(BaseModel):
    """Diagonal S: S_jj counts the clusters that contain controller j."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    diag: np.ndarray

    @property
    def assigned(self) -> np.ndarray:
        return self.diag > 0


class ConsensusState(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    z: np.ndarray
    x: List[np.ndarray]
    u: List[np.ndarray]
    iteration: int = 0
    primal_residuals: List[float] = Field(default_factory=list)
    dual_residuals: List[float] = Field(default_factory=list)


class SolveResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    w: np.ndarray
    method: SolveMethod
    objective_trace: List[float] = Field(default_factory=list)
    wall_time: float = 0.0
    iterations: int = 0
    converged: bool = False
    # per-cluster local estimates (naive: w^(k); admm: final x^(k)); empty for holistic
    local_estimates: List[np.ndarray] = Field(default_factory=list)
    state: Optional[ConsensusState] = None
