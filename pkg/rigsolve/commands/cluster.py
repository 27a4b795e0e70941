import argparse
import logging
from pathlib import Path

from rigsolve.commands.common import as_str, out_path, parse_k_range
from rigsolve.core.config import settings
from rigsolve.core.exceptions import UsageError
from rigsolve.domain.clustering import METHODS
from rigsolve.models.manifest import RunManifest
from rigsolve.repositories.clustering_repo import ClusteringRepository
from rigsolve.repositories.model_repo import ModelRepository
from rigsolve.repositories.results_repo import ResultsRepository
from rigsolve.services.clustering_service import ClusteringService

logger = logging.getLogger(__name__)

clustering_service = ClusteringService()
model_repo = ModelRepository()
clustering_repo = ClusteringRepository()
results_repo = ResultsRepository()


def register(subparsers) -> None:
    parser = subparsers.add_parser("cluster", help="cluster a rig and score the clustering")
    parser.add_argument("model", type=Path)
    parser.add_argument("--method", choices=METHODS, required=True)
    parser.add_argument("--k", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--segments", type=Path, default=None, help="manual mesh segments JSON (ssk)")
    parser.add_argument("--output", type=Path, default=None)
    parser.set_defaults(handler=run)

    sweep = subparsers.add_parser("sweep-k", help="score clusterings over a range of K")
    sweep.add_argument("model", type=Path)
    sweep.add_argument("--method", choices=METHODS, required=True)
    sweep.add_argument("--k-range", default="4..m", help="inclusive lo..hi, hi may be 'm'")
    sweep.add_argument("--repeats", type=int, default=1)
    sweep.add_argument("--seed", type=int, default=None)
    sweep.add_argument("--segments", type=Path, default=None)
    sweep.add_argument("--workers", type=int, default=None)
    sweep.add_argument("--output", type=Path, default=None)
    sweep.set_defaults(handler=run_sweep)


def _segments(args: argparse.Namespace):
    if args.method == "ssk" and args.segments is None:
        raise UsageError("--method ssk needs --segments")
    return clustering_repo.load_segments(args.segments) if args.segments is not None else None


def run(args: argparse.Namespace) -> int:
    model = model_repo.load(args.model)
    segments = _segments(args)
    seed = args.seed if args.seed is not None else settings.DEFAULT_SEED
    k = args.k
    if args.method in ("sparse", "ssk") and k is not None:
        logger.warning(f"⚠️ --k is ignored for --method {args.method}")
        k = None

    clustering, scores = clustering_service.cluster(model, args.method, k=k, seed=seed, segments=segments)

    path = out_path(args, args.output, f"clustering_{args.method}.json")
    manifest = RunManifest(command="cluster", model_path=str(args.model), method=args.method, seed=seed,
                           extra={"segments_path": as_str(args.segments)})
    clustering_repo.save(path, clustering, manifest, scores)
    logger.info(f"✅ Wrote clustering to {path}")
    return 0


def run_sweep(args: argparse.Namespace) -> int:
    model = model_repo.load(args.model)
    segments = _segments(args)
    seed = args.seed if args.seed is not None else settings.DEFAULT_SEED
    k_values = parse_k_range(args.k_range, model.m)
    workers = args.workers if args.workers is not None else settings.WORKERS

    records = clustering_service.sweep_k(
        model, args.method, list(k_values), args.repeats, seed, segments=segments, workers=workers
    )

    path = out_path(args, args.output, f"sweep_{args.method}.csv")
    manifest = RunManifest(command="sweep-k", model_path=str(args.model), method=args.method, seed=seed,
                           extra={"k_range": args.k_range, "repeats": args.repeats})
    results_repo.save_sweep(path, records, manifest)
    failed = sum(not r.ok for r in records)
    logger.info(f"✅ Wrote {len(records)} sweep rows to {path} ({failed} failed)")
    return 0
