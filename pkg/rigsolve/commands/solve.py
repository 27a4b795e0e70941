import argparse
import logging
from pathlib import Path

import numpy as np

from rigsolve.commands.common import add_solver_flags, as_str, out_path, solver_config
from rigsolve.core.exceptions import UsageError
from rigsolve.models.manifest import RunManifest
from rigsolve.repositories.clustering_repo import ClusteringRepository
from rigsolve.repositories.matrix_repo import TargetsRepository, WeightsRepository
from rigsolve.repositories.model_repo import ModelRepository
from rigsolve.repositories.results_repo import ResultsRepository
from rigsolve.services.solver_service import METHODS, SolverService

logger = logging.getLogger(__name__)

solver_service = SolverService()
model_repo = ModelRepository()
clustering_repo = ClusteringRepository()
targets_repo = TargetsRepository()
weights_repo = WeightsRepository()
results_repo = ResultsRepository()


def register(subparsers) -> None:
    parser = subparsers.add_parser("solve", help="invert the rig for every target frame")
    parser.add_argument("model", type=Path)
    parser.add_argument("targets", type=Path)
    parser.add_argument("--method", choices=METHODS, required=True)
    parser.add_argument("--clustering", type=Path, default=None)
    parser.add_argument("--output", type=Path, default=None, help="weights CSV")
    parser.add_argument("--results", type=Path, default=None, help="per-frame results CSV")
    add_solver_flags(parser)
    parser.set_defaults(handler=run)


def load_clustering(args: argparse.Namespace):
    """Holistic solves ignore a clustering; the clustered ones require it."""
    if args.method == "holistic":
        if args.clustering is not None:
            logger.warning("⚠️ --clustering is ignored for --method holistic")
        return None
    if args.clustering is None:
        raise UsageError(f"--method {args.method} needs --clustering")
    return clustering_repo.load(args.clustering)


def run(args: argparse.Namespace) -> int:
    config = solver_config(args)
    model = model_repo.load(args.model)
    targets = targets_repo.load(args.targets)
    clustering = load_clustering(args)

    results = solver_service.solve_sequence(model, clustering, targets, args.method, config)
    weights = np.array([r.w for r in results]).reshape(len(results), model.m)
    frames = solver_service.frame_metrics(model, results, targets, config.zero_threshold)

    manifest = RunManifest(
        command="solve",
        model_path=str(args.model),
        clustering_path=as_str(args.clustering) if args.method != "holistic" else None,
        targets_path=str(args.targets),
        method=args.method,
        config=config,
        seed=config.seed,
    )
    weights_path = out_path(args, args.output, f"weights_{args.method}.csv")
    results_path = out_path(args, args.results, f"results_{args.method}.csv")
    weights_repo.save(weights_path, weights, manifest.model_copy(update={"weights_path": str(weights_path)}))
    results_repo.save_frames(results_path, args.method, frames, manifest)

    logger.info(f"✅ Wrote {weights_path} and {results_path}")
    return 0
