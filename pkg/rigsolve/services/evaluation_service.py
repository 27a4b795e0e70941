import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from rigsolve.core.exceptions import DimensionError, UsageError
from rigsolve.domain.metrics import (
    cardinality_band,
    frame_metrics,
    select_alpha,
    sequence_metrics,
    zero_baseline_rmse,
)
from rigsolve.models.clustering import Clustering
from rigsolve.models.metrics import SequenceMetrics, TradeoffRow, TradeoffTable
from rigsolve.models.rig import BlendshapeModel
from rigsolve.models.solver import SolverConfig
from rigsolve.services.solver_service import SolverService

logger = logging.getLogger(__name__)

solver_service = SolverService()


class EvaluationService:

    def evaluate(
        self,
        model: BlendshapeModel,
        weights: np.ndarray,
        targets: np.ndarray,
        zero_threshold: float,
    ) -> SequenceMetrics:
        """Per-frame RMSE / cardinality plus roughness of every weight curve (T >= 3)."""
        weights = np.asarray(weights, dtype=np.float64)
        targets = np.asarray(targets, dtype=np.float64)
        if weights.shape[0] != targets.shape[0]:
            raise DimensionError(f"{weights.shape[0]} weight rows but {targets.shape[0]} target rows")
        if weights.ndim != 2 or weights.shape[1] != model.m:
            raise DimensionError(f"weights have shape {weights.shape}, expected (T, {model.m})")

        frames = [
            frame_metrics(model, w, targets[t], zero_threshold, frame=t)
            for t, w in enumerate(weights)
        ]
        if len(weights) < 3:
            logger.warning(f"⚠️ Only {len(weights)} frames; roughness needs at least 3 and is omitted")
        return sequence_metrics(frames, weights)

    def tradeoff_table(
        self,
        model: BlendshapeModel,
        clustering: Optional[Clustering],
        targets: np.ndarray,
        method: str,
        alpha_grid: Sequence[float],
        config: SolverConfig,
        band: Optional[Tuple[float, float]] = None,
    ) -> TradeoffTable:
        """
        One row per alpha (mean / max RMSE, mean cardinality, mean time). With a
        ground-truth cardinality band (mean, std), alpha* is the smallest alpha whose
        mean cardinality drops to the band's upper edge.
        """
        if not alpha_grid:
            raise UsageError("alpha grid is empty")

        rows: List[TradeoffRow] = []
        for alpha in sorted(float(a) for a in alpha_grid):
            run_config = config.model_copy(update={"alpha": alpha})
            results = solver_service.solve_sequence(model, clustering, targets, method, run_config)
            frames = solver_service.frame_metrics(model, results, targets, config.zero_threshold)
            agg = sequence_metrics(frames)
            rows.append(
                TradeoffRow(
                    alpha=alpha,
                    mean_rmse=agg.mean_rmse,
                    max_rmse=agg.max_rmse,
                    mean_cardinality=agg.mean_cardinality,
                    mean_time_ms=agg.mean_time_ms,
                )
            )
            logger.info(f"{method} alpha={alpha:g}: RMSE {agg.mean_rmse:.4f}, cardinality {agg.mean_cardinality:.2f}")

        selected = None
        if band is not None:
            selected = select_alpha([r.alpha for r in rows], [r.mean_cardinality for r in rows], band[0] + band[1])
            if selected is None:
                logger.warning("⚠️ No alpha in the grid brings cardinality into the reference band")

        return TradeoffTable(
            method=method,
            rows=rows,
            zero_baseline_rmse=zero_baseline_rmse(model, targets),
            selected_alpha=selected,
            band=list(band) if band is not None else None,
        )

    def reference_band(self, ground_truth: np.ndarray, zero_threshold: float) -> Tuple[float, float]:
        return cardinality_band(ground_truth, zero_threshold)

    def summary(
        self,
        model: BlendshapeModel,
        metrics: SequenceMetrics,
        targets: np.ndarray,
        zero_threshold: float,
        weights: Optional[np.ndarray] = None,
        ground_truth: Optional[np.ndarray] = None,
    ) -> dict:
        doc = metrics.model_dump(exclude={"frames", "roughness"})
        doc["frames"] = len(metrics.frames)
        doc["zero_baseline_rmse"] = zero_baseline_rmse(model, targets)
        if metrics.roughness is None:
            doc["note"] = "roughness omitted: fewer than 3 frames"
        if ground_truth is not None:
            ground_truth = np.asarray(ground_truth, dtype=np.float64)
            if weights is not None and ground_truth.shape != np.shape(weights):
                raise DimensionError(f"ground truth has shape {ground_truth.shape}, weights {np.shape(weights)}")
            mean, std = self.reference_band(ground_truth, zero_threshold)
            doc["ground_truth_cardinality_mean"] = mean
            doc["ground_truth_cardinality_std"] = std
            doc["within_band"] = bool(abs(metrics.mean_cardinality - mean) <= std)
            if weights is not None:
                doc["weight_mae"] = float(np.abs(np.asarray(weights) - ground_truth).mean())
        return doc
