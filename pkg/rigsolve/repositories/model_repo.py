import logging
from pathlib import Path
from typing import Optional

from rigsolve.models.manifest import RunManifest
from rigsolve.models.rig import BlendshapeModel
from rigsolve.repositories.base import FileRepository
from rigsolve.utils.serializers import deserialize_model, serialize_model

logger = logging.getLogger(__name__)


class ModelRepository(FileRepository):

    def load(self, path: Path) -> BlendshapeModel:
        model = deserialize_model(self.read_json(path))
        logger.info(f"Loaded rig {path}: n={model.n} m={model.m} correctives={len(model.correctives)}")
        return model

    def save(self, path: Path, model: BlendshapeModel, manifest: Optional[RunManifest] = None) -> Path:
        return self.write_json(path, serialize_model(model), manifest)
