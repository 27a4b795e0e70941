import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

import numpy as np

from rigsolve.core.exceptions import DimensionError, DomainError, NumericalError, UsageError
from rigsolve.domain.metrics import frame_metrics
from rigsolve.domain.solvers import admm_solve, build_subproblems, solve_cd, solve_naive_clustered
from rigsolve.models.clustering import Clustering
from rigsolve.models.metrics import FrameMetrics
from rigsolve.models.rig import BlendshapeModel
from rigsolve.models.solver import SolveResult, SolverConfig

logger = logging.getLogger(__name__)

METHODS = ("holistic", "naive", "admm")


class SolverService:

    def solve_sequence(
        self,
        model: BlendshapeModel,
        clustering: Optional[Clustering],
        targets,
        method: str,
        config: SolverConfig,
    ) -> List[SolveResult]:
        """
        Solve every frame. Frames are independent unless `config.warm_start`, in
        which case each frame starts from the previous solution and runs in order.
        """
        if method not in METHODS:
            raise UsageError(f"unknown solve method '{method}', expected one of {METHODS}")
        targets = np.asarray(targets, dtype=np.float64)
        if targets.size == 0:
            return []
        if targets.ndim != 2 or targets.shape[1] != 3 * model.n:
            raise DimensionError(f"targets have shape {targets.shape}, expected (T, {3 * model.n})")

        subproblems = None
        if method != "holistic":
            if clustering is None:
                raise UsageError(f"method '{method}' needs a clustering")
            subproblems = build_subproblems(model, clustering)

        def solve_frame(t: int, w0: Optional[np.ndarray], inner: SolverConfig) -> SolveResult:
            try:
                if method == "holistic":
                    result = solve_cd(model, targets[t], inner, w0=w0)
                elif method == "naive":
                    result = solve_naive_clustered(model, clustering, targets[t], inner, subproblems=subproblems, w0=w0)
                else:
                    result = admm_solve(model, clustering, targets[t], inner, subproblems=subproblems, w0=w0)
            except DomainError as e:
                raise type(e)(f"frame {t}: {e.message}") from e
            except (ArithmeticError, np.linalg.LinAlgError) as e:
                raise NumericalError(f"frame {t}: {e}") from e
            if not np.all(np.isfinite(result.w)):
                raise NumericalError(f"frame {t}: solver produced non-finite weights")
            return result

        T = targets.shape[0]
        if config.warm_start:
            results, prev = [], None
            for t in range(T):
                results.append(solve_frame(t, prev, config))
                prev = results[-1].w
        elif config.workers > 1 and T > 1:
            # parallelism goes to frames; each frame then runs single-threaded
            inner = config.model_copy(update={"workers": 1})
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                results = list(pool.map(lambda t: solve_frame(t, None, inner), range(T)))
        else:
            results = [solve_frame(t, None, config) for t in range(T)]

        not_converged = sum(not r.converged for r in results)
        logger.info(f"✅ Solved {T} frames with {method}; {not_converged} hit the iteration cap")
        return results

    def frame_metrics(
        self,
        model: BlendshapeModel,
        results: List[SolveResult],
        targets,
        zero_threshold: float,
    ) -> List[FrameMetrics]:
        return [
            frame_metrics(
                model, r.w, targets[t], zero_threshold,
                frame=t, time_ms=1000.0 * r.wall_time, iterations=r.iterations, converged=r.converged,
            )
            for t, r in enumerate(results)
        ]
