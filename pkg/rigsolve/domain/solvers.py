"""
Per-frame rig inversion: holistic coordinate descent, naive clustered solving
with averaging of shared weights, and consensus ADMM coupling the clusters.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np

from rigsolve.core.exceptions import DimensionError, ValidationError
from rigsolve.domain.coordinate import GramSystem, coordinate_descent, gram_descent, objective
from rigsolve.domain.rig import evaluate_rig, restrict_model
from rigsolve.models.clustering import Clustering
from rigsolve.models.rig import BlendshapeModel, SubModel
from rigsolve.models.solver import (
    ConsensusState,
    IndexMap,
    MultiplicityMatrix,
    SolveResult,
    SolverConfig,
)

logger = logging.getLogger(__name__)


# ==================== CLUSTER BOOKKEEPING ====================

def multiplicity_matrix(clustering: Clustering, m: int) -> MultiplicityMatrix:
    diag = np.zeros(m, dtype=np.int64)
    for members in clustering.ctrl_clusters:
        diag[members] += 1
    return MultiplicityMatrix(diag=diag)


def index_map(clustering: Clustering) -> IndexMap:
    return IndexMap(maps=[np.asarray(c, dtype=np.intp) for c in clustering.ctrl_clusters])


@dataclass
class Subproblem:
    """One cluster's restricted rig, its Gram data and where it sits in the global problem."""

    k: int
    sub: SubModel
    rows: np.ndarray
    controllers: np.ndarray
    system: GramSystem


def build_subproblems(model: BlendshapeModel, clustering: Clustering) -> List[Subproblem]:
    """
    Restrict the model and build its Gram data once per cluster; clusters without
    vertices or controllers carry no subproblem.
    """
    clustering.check_against(model.n, model.m)
    out = []
    for k, (mesh, ctrl) in enumerate(zip(clustering.mesh_clusters, clustering.ctrl_clusters)):
        if not mesh or not ctrl:
            continue
        sub = restrict_model(model, mesh, ctrl)
        if sub.dropped_correctives:
            logger.debug(f"Cluster {k}: {sub.dropped_correctives} cross-cluster correctives dropped")
        out.append(
            Subproblem(
                k=k,
                sub=sub,
                rows=sub.rows,
                controllers=np.asarray(ctrl, dtype=np.intp),
                system=GramSystem(sub),
            )
        )
    return out


def _active_multiplicity(subproblems: List[Subproblem], m: int) -> np.ndarray:
    """S over the clusters that actually solve (clusters without vertices are dropped)."""
    diag = np.zeros(m, dtype=np.int64)
    for sp in subproblems:
        diag[sp.controllers] += 1
    return diag


def _check_target(model: BlendshapeModel, target) -> np.ndarray:
    target = np.asarray(target, dtype=np.float64)
    if target.shape != (3 * model.n,):
        raise DimensionError(f"target has shape {target.shape}, model expects ({3 * model.n},)")
    return target


def _fan_out(fn: Callable, items: Sequence, workers: int) -> list:
    """Map in submission order; results never depend on scheduling."""
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _order_rng(config: SolverConfig, *key: int) -> Optional[np.random.Generator]:
    """Per-task generator so shuffled sweeps stay reproducible under any scheduling."""
    return np.random.default_rng([config.seed, *key]) if config.randomize_order else None


def holistic_objective(model: BlendshapeModel, w: np.ndarray, target: np.ndarray, alpha: float) -> float:
    return objective(evaluate_rig(model, w) - target, w, alpha)


# ==================== HOLISTIC ====================

def solve_cd(
    model: BlendshapeModel,
    target,
    config: SolverConfig,
    w0: Optional[np.ndarray] = None,
    on_update: Optional[Callable[[int, float], None]] = None,
) -> SolveResult:
    """Coordinate descent on the full rig from w = 0 (or a warm start)."""
    target = _check_target(model, target)
    start = time.perf_counter()
    init = np.zeros(model.m) if w0 is None else np.clip(w0, 0.0, 1.0)

    outcome = coordinate_descent(
        model, target, init, config.alpha,
        max_sweeps=config.cd_iters, tol=config.cd_tol,
        rng=_order_rng(config), on_update=on_update,
    )
    return SolveResult(
        w=outcome.w,
        method="holistic",
        objective_trace=outcome.trace,
        wall_time=time.perf_counter() - start,
        iterations=outcome.sweeps,
        converged=outcome.converged,
    )


# ==================== NAIVE CLUSTERED ====================

def solve_naive_clustered(
    model: BlendshapeModel,
    clustering: Clustering,
    target,
    config: SolverConfig,
    subproblems: Optional[List[Subproblem]] = None,
    w0: Optional[np.ndarray] = None,
) -> SolveResult:
    """Solve every cluster independently, then average the weights shared across clusters."""
    target = _check_target(model, target)
    if subproblems is None:
        subproblems = build_subproblems(model, clustering)
    start = time.perf_counter()
    S = _active_multiplicity(subproblems, model.m)

    def solve_one(sp: Subproblem):
        init = np.zeros(sp.controllers.size) if w0 is None else np.clip(w0[sp.controllers], 0.0, 1.0)
        return gram_descent(
            sp.system, sp.system.project(target[sp.rows]), init, config.alpha_for(sp.k),
            max_sweeps=config.cd_iters, tol=config.cd_tol, rng=_order_rng(config, sp.k),
        )

    outcomes = _fan_out(solve_one, subproblems, config.workers)

    total = np.zeros(model.m)
    for sp, out in zip(subproblems, outcomes):
        total[sp.controllers] += out.w
    w = np.zeros(model.m)
    assigned = S > 0
    w[assigned] = total[assigned] / S[assigned]

    return SolveResult(
        w=np.clip(w, 0.0, 1.0),
        method="naive",
        objective_trace=[float(sum(o.trace[-1] for o in outcomes))],
        wall_time=time.perf_counter() - start,
        iterations=max((o.sweeps for o in outcomes), default=0),
        converged=all(o.converged for o in outcomes),
        local_estimates=[o.w for o in outcomes],
    )


# ==================== CONSENSUS ADMM ====================

def admm_solve(
    model: BlendshapeModel,
    clustering: Clustering,
    target,
    config: SolverConfig,
    subproblems: Optional[List[Subproblem]] = None,
    w0: Optional[np.ndarray] = None,
) -> SolveResult:
    """
    General-form consensus ADMM with the sparsity term on the global variable:

        x^(k) <- argmin_{0<=x<=1} 1/2||f^(k)(x) - b^(k)||^2 + rho/2 ||x - z~^(k) + u^(k)||^2
        z_j   <- clamp((sum_{G(k,i)=j} (x^(k)_i + u^(k)_i) - alpha_j/rho) / S_jj, 0, 1)
        u^(k) <- u^(k) + x^(k) - z~^(k)
    """
    if config.rho <= 0:
        raise ValidationError(f"rho must be positive, got {config.rho}")
    target = _check_target(model, target)
    if subproblems is None:
        subproblems = build_subproblems(model, clustering)
    start = time.perf_counter()

    m = model.m
    S = _active_multiplicity(subproblems, m)
    assigned = S > 0
    alpha_sum = np.zeros(m)
    for sp in subproblems:
        alpha_sum[sp.controllers] += config.alpha_for(sp.k)
    alpha_j = np.zeros(m)
    alpha_j[assigned] = alpha_sum[assigned] / S[assigned]

    z = np.zeros(m) if w0 is None else np.where(assigned, np.clip(w0, 0.0, 1.0), 0.0)
    state = ConsensusState(
        z=z,
        x=[z[sp.controllers].copy() for sp in subproblems],
        u=[np.zeros(sp.controllers.size) for sp in subproblems],
    )
    sweeps = 1 if config.inexact else config.cd_iters
    projections = [sp.system.project(target[sp.rows]) for sp in subproblems]
    trace: List[float] = []
    converged = False

    for it in range(1, config.admm_iters + 1):
        def x_update(idx: int):
            sp = subproblems[idx]
            anchor = state.z[sp.controllers] - state.u[idx]
            return gram_descent(
                sp.system, projections[idx], state.x[idx], 0.0,
                max_sweeps=sweeps, tol=config.cd_tol, prox=(config.rho, anchor), rng=_order_rng(config, sp.k, it),
            )

        outcomes = _fan_out(x_update, list(range(len(subproblems))), config.workers)
        state.x = [o.w for o in outcomes]

        # barrier: z-update reduces in fixed cluster order
        q = np.zeros(m)
        for idx, sp in enumerate(subproblems):
            q[sp.controllers] += state.x[idx] + state.u[idx]
        z_new = np.zeros(m)
        z_new[assigned] = np.clip((q[assigned] - alpha_j[assigned] / config.rho) / S[assigned], 0.0, 1.0)

        primal = 0.0
        for idx, sp in enumerate(subproblems):
            gap = state.x[idx] - z_new[sp.controllers]
            state.u[idx] = state.u[idx] + gap
            if gap.size:
                primal = max(primal, float(np.abs(gap).max()))
        dual = float(np.abs(z_new - state.z).max()) if m else 0.0
        state.z = z_new
        state.iteration = it
        state.primal_residuals.append(primal)
        state.dual_residuals.append(dual)

        fit = sum(o.fit for o in outcomes)
        trace.append(fit + float(alpha_j @ z_new))

        if max(primal, dual) < config.admm_tol:
            converged = True
            break

    return SolveResult(
        w=state.z.copy(),
        method="admm",
        objective_trace=trace,
        wall_time=time.perf_counter() - start,
        iterations=state.iteration,
        converged=converged,
        local_estimates=[x.copy() for x in state.x],
        state=state,
    )
