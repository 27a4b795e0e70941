"""
Fit quality metrics: mesh RMSE, cardinality and temporal roughness.
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np

from rigsolve.core.exceptions import DimensionError, ValidationError
from rigsolve.domain.rig import evaluate_rig
from rigsolve.models.metrics import FrameMetrics, SequenceMetrics
from rigsolve.models.rig import BlendshapeModel


def rmse(model: BlendshapeModel, w, target) -> float:
    """sqrt(||f(w) - b||^2 / n); the divisor is the vertex count, not 3n."""
    target = np.asarray(target, dtype=np.float64)
    if target.shape != (3 * model.n,):
        raise DimensionError(f"target has shape {target.shape}, model expects ({3 * model.n},)")
    diff = evaluate_rig(model, w) - target
    return float(np.sqrt(diff @ diff / model.n))


def cardinality(w, zero_threshold: float) -> int:
    return int(np.count_nonzero(np.abs(np.asarray(w)) > zero_threshold))


def roughness(curve: Sequence[float]) -> float:
    """Sum of squared second differences of one weight curve."""
    curve = np.asarray(curve, dtype=np.float64)
    if curve.size < 3:
        raise ValidationError(f"roughness needs at least 3 frames, got {curve.size}")
    return float((np.diff(curve, n=2) ** 2).sum())


def roughness_per_controller(weights: np.ndarray) -> List[float]:
    weights = np.asarray(weights, dtype=np.float64)
    return [roughness(weights[:, i]) for i in range(weights.shape[1])]


def zero_baseline_rmse(model: BlendshapeModel, targets: np.ndarray) -> float:
    """Mean RMSE of always answering w = 0."""
    zero = np.zeros(model.m)
    return float(np.mean([rmse(model, zero, t) for t in targets])) if len(targets) else 0.0


def cardinality_band(weights: np.ndarray, zero_threshold: float) -> Tuple[float, float]:
    """(mean, std) of per-frame cardinality of a reference animation."""
    counts = np.array([cardinality(w, zero_threshold) for w in weights], dtype=np.float64)
    if counts.size == 0:
        return 0.0, 0.0
    return float(counts.mean()), float(counts.std())


def quartiles_separated(lower: Sequence[float], upper: Sequence[float]) -> bool:
    """True when the upper quartile of `lower` lies below the lower quartile of `upper`."""
    return float(np.percentile(lower, 75)) < float(np.percentile(upper, 25))


def frame_metrics(
    model: BlendshapeModel,
    w,
    target,
    zero_threshold: float,
    frame: int = 0,
    time_ms: float = 0.0,
    iterations: int = 0,
    converged: bool = True,
) -> FrameMetrics:
    return FrameMetrics(
        frame=frame,
        rmse=rmse(model, w, target),
        cardinality=cardinality(w, zero_threshold),
        time_ms=time_ms,
        iterations=iterations,
        converged=converged,
    )


def sequence_metrics(frames: List[FrameMetrics], weights: Optional[np.ndarray] = None) -> SequenceMetrics:
    """Aggregate per-frame metrics; roughness only when at least 3 frames exist."""
    if not frames:
        raise ValidationError("no frames to aggregate")
    errors = np.array([f.rmse for f in frames])
    cards = np.array([f.cardinality for f in frames], dtype=np.float64)
    times = np.array([f.time_ms for f in frames])

    rough = None
    if weights is not None and len(weights) >= 3:
        rough = roughness_per_controller(weights)

    return SequenceMetrics(
        frames=frames,
        roughness=rough,
        mean_rmse=float(errors.mean()),
        max_rmse=float(errors.max()),
        median_rmse=float(np.median(errors)),
        q1_rmse=float(np.percentile(errors, 25)),
        q3_rmse=float(np.percentile(errors, 75)),
        mean_cardinality=float(cards.mean()),
        std_cardinality=float(cards.std()),
        mean_time_ms=float(times.mean()),
        total_roughness=float(sum(rough)) if rough is not None else None,
    )


def select_alpha(alphas: Sequence[float], mean_cardinalities: Sequence[float], band_upper: float) -> Optional[float]:
    """Smallest alpha whose mean cardinality falls to or below the band's upper edge."""
    for alpha, card in sorted(zip(alphas, mean_cardinalities)):
        if card <= band_upper:
            return float(alpha)
    return None
