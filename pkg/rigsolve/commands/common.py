"""
Flag groups and helpers shared by the sub-commands.
"""

import argparse
from pathlib import Path
from typing import Any, Dict, Optional

from rigsolve.core.exceptions import UsageError
from rigsolve.models.solver import SolverConfig
from rigsolve.repositories.base import FileRepository

# flag dest -> SolverConfig field
SOLVER_FLAGS = (
    "alpha", "rho", "admm_iters", "cd_iters", "cd_tol", "admm_tol", "zero_threshold",
    "randomize_order", "inexact", "warm_start", "seed", "workers",
)


def add_solver_flags(parser: argparse.ArgumentParser) -> None:
    """Every flag defaults to None so that only explicitly given ones override --config."""
    group = parser.add_argument_group("solver")
    group.add_argument("--alpha", type=float, default=None, help="L1 weight")
    group.add_argument("--rho", type=float, default=None, help="ADMM penalty")
    group.add_argument("--admm-iters", type=int, default=None)
    group.add_argument("--cd-iters", type=int, default=None, help="max coordinate sweeps")
    group.add_argument("--cd-tol", type=float, default=None)
    group.add_argument("--admm-tol", type=float, default=None)
    group.add_argument("--zero-threshold", type=float, default=None)
    group.add_argument("--randomize-order", action=argparse.BooleanOptionalAction, default=None)
    group.add_argument("--inexact", action=argparse.BooleanOptionalAction, default=None,
                       help="one coordinate sweep per ADMM x-update")
    group.add_argument("--warm-start", action=argparse.BooleanOptionalAction, default=None,
                       help="start each frame from the previous solution")
    group.add_argument("--seed", type=int, default=None)
    group.add_argument("--workers", type=int, default=None)


def solver_config(args: argparse.Namespace) -> SolverConfig:
    """Settings defaults, then the --config JSON, then explicit flags."""
    layered: Dict[str, Any] = {}
    if getattr(args, "config", None):
        doc = FileRepository().read_json(args.config)
        if not isinstance(doc, dict):
            raise UsageError(f"{args.config}: config must be a JSON object")
        layered.update(doc.get("solver", doc))
    for name in SOLVER_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            layered[name] = value
    return SolverConfig.model_validate(layered)


def out_path(args: argparse.Namespace, explicit: Optional[Path], default_name: str) -> Path:
    if explicit is not None:
        return Path(explicit)
    return Path(args.out_dir) / default_name


def parse_k_range(text: str, m: int) -> range:
    """`lo..hi` inclusive; `hi` may be the literal `m`."""
    lo, sep, hi = text.partition("..")
    if not sep:
        raise UsageError(f"K range '{text}' must look like lo..hi")
    try:
        lo_k = int(lo)
        hi_k = m if hi.strip() == "m" else int(hi)
    except ValueError:
        raise UsageError(f"K range '{text}' must hold integers")
    k_values = range(max(lo_k, 1), hi_k + 1)
    if len(k_values) == 0:
        raise UsageError(f"K range '{text}' is empty")
    return k_values


def parse_float_list(text: str, name: str) -> list:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"{name} '{text}' must be a comma separated list of numbers")
    if not values:
        raise UsageError(f"{name} is empty")
    return values


def as_str(path: Optional[Path]) -> Optional[str]:
    return str(path) if path is not None else None
