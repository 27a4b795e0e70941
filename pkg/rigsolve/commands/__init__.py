"""
Command-line surface: gen, cluster, sweep-k, solve, eval, tradeoff.
"""

import argparse
import logging
from pathlib import Path
from typing import List, Optional

import pydantic

from rigsolve import __version__
from rigsolve.commands import cluster, evaluate, gen, solve, tradeoff
from rigsolve.core.config import settings
from rigsolve.core.exceptions import DomainError, ValidationError
from rigsolve.core.logging import configure_logging

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rigsolve", description="Distributed blendshape rig inversion")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help=f"default {settings.LOG_LEVEL}")
    parser.add_argument("--out-dir", type=Path, default=None, help=f"artifact directory (default {settings.OUT_DIR})")
    parser.add_argument("--config", type=Path, default=None, help="solver config JSON; flags override it")

    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True
    for module in (gen, cluster, solve, evaluate, tradeoff):
        module.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    configure_logging(args.log_level or settings.LOG_LEVEL)
    if args.out_dir is None:
        args.out_dir = Path(settings.OUT_DIR)

    try:
        return args.handler(args)
    except DomainError as e:
        logger.error(f"❌ {args.command}: {e.message}")
        return e.exit_code
    except pydantic.ValidationError as e:
        logger.error(f"❌ {args.command}: invalid input: {e}")
        return ValidationError.exit_code
