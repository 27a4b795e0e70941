from typing import Any, Dict, Optional

from pydantic import BaseModel

from rigsolve.models.solver import SolverConfig


class RunManifest(BaseModel):
    """Provenance embedded in every artifact a command writes."""

    command: str
    model_path: Optional[str] = None
    clustering_path: Optional[str] = None
    weights_path: Optional[str] = None
    targets_path: Optional[str] = None
    method: Optional[str] = None
    config: Optional[SolverConfig] = None
    seed: Optional[int] = None
    extra: Dict[str, Any] = {}
