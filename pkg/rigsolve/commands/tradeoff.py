import argparse
import logging
from pathlib import Path

from rigsolve.commands.common import add_solver_flags, as_str, out_path, parse_float_list, solver_config
from rigsolve.commands.solve import load_clustering
from rigsolve.core.exceptions import UsageError
from rigsolve.domain.metrics import sequence_metrics
from rigsolve.models.manifest import RunManifest
from rigsolve.repositories.matrix_repo import TargetsRepository, WeightsRepository
from rigsolve.repositories.model_repo import ModelRepository
from rigsolve.repositories.results_repo import ResultsRepository
from rigsolve.services.evaluation_service import EvaluationService
from rigsolve.services.solver_service import METHODS, SolverService

logger = logging.getLogger(__name__)

evaluation_service = EvaluationService()
solver_service = SolverService()
model_repo = ModelRepository()
targets_repo = TargetsRepository()
weights_repo = WeightsRepository()
results_repo = ResultsRepository()


def register(subparsers) -> None:
    parser = subparsers.add_parser("tradeoff", help="sweep alpha and tabulate error against cardinality")
    parser.add_argument("model", type=Path)
    parser.add_argument("targets", type=Path)
    parser.add_argument("--method", choices=METHODS, required=True)
    parser.add_argument("--clustering", type=Path, default=None)
    parser.add_argument("--alpha-grid", required=True, help="comma separated alphas")
    parser.add_argument("--band-weights", type=Path, default=None,
                        help="ground-truth weights CSV giving the reference cardinality band")
    parser.add_argument("--train-frames", type=int, default=None,
                        help="pick alpha on the first N frames, report it on the rest")
    add_solver_flags(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    config = solver_config(args)
    alphas = parse_float_list(args.alpha_grid, "--alpha-grid")
    model = model_repo.load(args.model)
    targets = targets_repo.load(args.targets)
    clustering = load_clustering(args)

    band = None
    if args.band_weights is not None:
        band = evaluation_service.reference_band(weights_repo.load(args.band_weights), config.zero_threshold)

    train, test = targets, None
    if args.train_frames is not None:
        if not 0 < args.train_frames < len(targets):
            raise UsageError(f"--train-frames must lie in 1..{len(targets) - 1}")
        train, test = targets[: args.train_frames], targets[args.train_frames:]

    table = evaluation_service.tradeoff_table(model, clustering, train, args.method, alphas, config, band=band)
    summary = table.model_dump(exclude={"rows"})

    if test is not None and table.selected_alpha is not None:
        chosen = config.model_copy(update={"alpha": table.selected_alpha})
        results = solver_service.solve_sequence(model, clustering, test, args.method, chosen)
        frames = solver_service.frame_metrics(model, results, test, config.zero_threshold)
        held_out = sequence_metrics(frames)
        summary["test"] = held_out.model_dump(exclude={"frames", "roughness"})
        logger.info(
            f"✅ Held-out frames at alpha={table.selected_alpha:g}: RMSE {held_out.mean_rmse:.4f}, "
            f"cardinality {held_out.mean_cardinality:.2f}"
        )

    manifest = RunManifest(
        command="tradeoff",
        model_path=str(args.model),
        clustering_path=as_str(args.clustering) if args.method != "holistic" else None,
        targets_path=str(args.targets),
        method=args.method,
        config=config,
        seed=config.seed,
        extra={
            "alpha_grid": alphas,
            "band_weights_path": as_str(args.band_weights),
            "train_frames": args.train_frames,
        },
    )
    results_repo.save_tradeoff(out_path(args, None, f"tradeoff_{args.method}.csv"), table, manifest)
    results_repo.save_summary(out_path(args, None, f"tradeoff_{args.method}.json"), summary, manifest)

    logger.info(f"✅ Tradeoff for {args.method}: {len(table.rows)} alphas, selected {table.selected_alpha}")
    return 0
