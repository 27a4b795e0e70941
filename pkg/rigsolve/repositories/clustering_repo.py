from pathlib import Path
from typing import List, Optional

from rigsolve.core.exceptions import ValidationError
from rigsolve.models.clustering import Clustering, ClusterScores
from rigsolve.models.manifest import RunManifest
from rigsolve.repositories.base import FileRepository
from rigsolve.utils.serializers import deserialize_clustering, serialize_clustering


class ClusteringRepository(FileRepository):

    def load(self, path: Path) -> Clustering:
        return deserialize_clustering(self.read_json(path))

    def save(
        self,
        path: Path,
        clustering: Clustering,
        manifest: Optional[RunManifest] = None,
        scores: Optional[ClusterScores] = None,
    ) -> Path:
        doc = serialize_clustering(clustering)
        if scores is not None:
            doc["scores"] = scores.model_dump()
        return self.write_json(path, doc, manifest)

    def load_segments(self, path: Path) -> List[List[int]]:
        """Manual mesh segments: a JSON list of vertex index lists."""
        doc = self.read_json(path)
        if not isinstance(doc, list) or not all(isinstance(s, list) for s in doc):
            raise ValidationError(f"{path}: segments must be a JSON list of vertex index lists")
        try:
            return [[int(v) for v in segment] for segment in doc]
        except (TypeError, ValueError):
            raise ValidationError(f"{path}: segment entries must be integer vertex indices")
