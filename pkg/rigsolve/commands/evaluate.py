import argparse
import logging
from pathlib import Path

from rigsolve.commands.common import as_str, out_path
from rigsolve.core.config import settings
from rigsolve.models.manifest import RunManifest
from rigsolve.repositories.matrix_repo import TargetsRepository, WeightsRepository
from rigsolve.repositories.model_repo import ModelRepository
from rigsolve.repositories.results_repo import ResultsRepository
from rigsolve.services.evaluation_service import EvaluationService

logger = logging.getLogger(__name__)

evaluation_service = EvaluationService()
model_repo = ModelRepository()
weights_repo = WeightsRepository()
targets_repo = TargetsRepository()
results_repo = ResultsRepository()


def register(subparsers) -> None:
    parser = subparsers.add_parser("eval", help="score solved weights against targets")
    parser.add_argument("model", type=Path)
    parser.add_argument("weights", type=Path)
    parser.add_argument("targets", type=Path)
    parser.add_argument("--ground-truth", type=Path, default=None, help="reference weights CSV")
    parser.add_argument("--zero-threshold", type=float, default=None)
    parser.add_argument("--label", default=None, help="method column in metrics.csv (default: weights file stem)")
    parser.add_argument("--prefix", default="", help="prefix for metrics.csv / roughness.csv / summary.json")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    zero_threshold = args.zero_threshold if args.zero_threshold is not None else settings.ZERO_THRESHOLD
    model = model_repo.load(args.model)
    weights = weights_repo.load(args.weights)
    targets = targets_repo.load(args.targets)
    ground_truth = weights_repo.load(args.ground_truth) if args.ground_truth is not None else None

    metrics = evaluation_service.evaluate(model, weights, targets, zero_threshold)
    summary = evaluation_service.summary(model, metrics, targets, zero_threshold, weights, ground_truth)

    manifest = RunManifest(
        command="eval",
        model_path=str(args.model),
        weights_path=str(args.weights),
        targets_path=str(args.targets),
        extra={"ground_truth_path": as_str(args.ground_truth), "zero_threshold": zero_threshold},
    )
    label = args.label or Path(args.weights).stem
    results_repo.save_frames(out_path(args, None, f"{args.prefix}metrics.csv"), label, metrics.frames, manifest)
    if metrics.roughness is not None:
        results_repo.save_roughness(out_path(args, None, f"{args.prefix}roughness.csv"), metrics.roughness, manifest)
    results_repo.save_summary(out_path(args, None, f"{args.prefix}summary.json"), summary, manifest)

    logger.info(
        f"✅ {label}: mean RMSE {metrics.mean_rmse:.4f}, median {metrics.median_rmse:.4f}, "
        f"cardinality {metrics.mean_cardinality:.2f}"
    )
    return 0
