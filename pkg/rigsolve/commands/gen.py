import argparse
import logging
from pathlib import Path

from rigsolve.core.config import settings
from rigsolve.models.manifest import RunManifest
from rigsolve.models.synth import GenSpec
from rigsolve.repositories.matrix_repo import TargetsRepository, WeightsRepository
from rigsolve.repositories.model_repo import ModelRepository
from rigsolve.repositories.results_repo import ResultsRepository
from rigsolve.services.generation_service import GenerationService

logger = logging.getLogger(__name__)

generation_service = GenerationService()
model_repo = ModelRepository()
weights_repo = WeightsRepository()
targets_repo = TargetsRepository()
results_repo = ResultsRepository()

SPEC_FLAGS = ("n", "m", "n_pairs", "n_triples", "n_quads", "footprint", "frames", "sparsity", "noise_sigma", "head_width")


def register(subparsers) -> None:
    parser = subparsers.add_parser("gen", help="generate a synthetic rig, animation and targets")
    parser.add_argument("--full-scale", action="store_true", help="start from the 10k-vertex / 102-controller setup")
    parser.add_argument("--n", type=int, default=None, help="vertices")
    parser.add_argument("--m", type=int, default=None, help="controllers")
    parser.add_argument("--pairs", dest="n_pairs", type=int, default=None)
    parser.add_argument("--triples", dest="n_triples", type=int, default=None)
    parser.add_argument("--quads", dest="n_quads", type=int, default=None)
    parser.add_argument("--footprint", type=int, default=None)
    parser.add_argument("--frames", type=int, default=None)
    parser.add_argument("--sparsity", type=float, default=None)
    parser.add_argument("--noise", dest="noise_sigma", type=float, default=None)
    parser.add_argument("--head-width", type=float, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    overrides = {name: getattr(args, name) for name in SPEC_FLAGS if getattr(args, name) is not None}
    overrides["seed"] = args.seed if args.seed is not None else settings.DEFAULT_SEED
    spec = GenSpec.full_scale(**overrides) if args.full_scale else GenSpec(**overrides)

    data = generation_service.generate(spec)

    out_dir = Path(args.out_dir)
    manifest = RunManifest(
        command="gen",
        model_path=str(out_dir / "model.json"),
        weights_path=str(out_dir / "weights.csv"),
        targets_path=str(out_dir / "targets.csv"),
        seed=spec.seed,
        extra={"spec": spec.model_dump()},
    )
    model_repo.save(out_dir / "model.json", data.model, manifest)
    weights_repo.save(out_dir / "weights.csv", data.weights, manifest)
    targets_repo.save(out_dir / "targets.csv", data.targets, manifest)
    results_repo.save_summary(out_dir / "gen_stats.json", data.stats(), manifest)

    logger.info(f"✅ Wrote model, weights and targets to {out_dir}")
    return 0
