from typing import List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from rigsolve.core.exceptions import ValidationError

ClusteringMethod = Literal["rsjd", "rsjd_a", "rs", "sparse", "ssk", "full"]


class Clustering(BaseModel):
    """
    Mesh clusters M^(k) (a vertex partition) and controller clusters C^(k).

    Read together they are the bipartite vertex/controller graph: an edge (l, j)
    exists when l in M^(k) and j in C^(k) for some k.
    """

    K: int = Field(..., ge=1)
    mesh_clusters: List[List[int]]
    ctrl_clusters: List[List[int]]
    method: ClusteringMethod = "full"
    seed: Optional[int] = None

    @field_validator("mesh_clusters", "ctrl_clusters")
    @classmethod
    def _sorted_unique(cls, clusters: List[List[int]]) -> List[List[int]]:
        out = []
        for members in clusters:
            members = sorted(int(i) for i in members)
            if len(set(members)) != len(members):
                raise ValueError("cluster members must be unique")
            out.append(members)
        return out

    @model_validator(mode="after")
    def _k_matches(self):
        if len(self.mesh_clusters) != self.K or len(self.ctrl_clusters) != self.K:
            raise ValueError(
                f"K={self.K} but got {len(self.mesh_clusters)} mesh and "
                f"{len(self.ctrl_clusters)} controller clusters"
            )
        return self

    @property
    def allows_empty_mesh_clusters(self) -> bool:
        return self.method == "sparse"

    def check_against(self, n: int, m: int) -> None:
        """Raise ValidationError unless this clustering fits an n-vertex, m-controller model."""
        seen = [0] * n
        for k, members in enumerate(self.mesh_clusters):
            if not members and not self.allows_empty_mesh_clusters:
                raise ValidationError(f"mesh cluster {k} is empty")
            for v in members:
                if v < 0 or v >= n:
                    raise ValidationError(f"mesh cluster {k} references vertex {v} outside [0, {n})")
                seen[v] += 1
        missing = [v for v, c in enumerate(seen) if c == 0]
        doubled = [v for v, c in enumerate(seen) if c > 1]
        if missing or doubled:
            raise ValidationError(
                f"mesh clusters are not a partition: {len(missing)} vertices uncovered, "
                f"{len(doubled)} vertices in several clusters"
            )
        for k, members in enumerate(self.ctrl_clusters):
            for j in members:
                if j < 0 or j >= m:
                    raise ValidationError(f"controller cluster {k} references controller {j} outside [0, {m})")

    def mesh_sizes(self) -> List[int]:
        return [len(c) for c in self.mesh_clusters]

    def ctrl_sizes(self) -> List[int]:
        return [len(c) for c in self.ctrl_clusters]


class ClusterScores(BaseModel):
    density: float = Field(..., ge=0.0)
    inter_density: float = Field(..., ge=0.0)
    reconstruction_error: float = Field(..., ge=0.0)


class SweepRecord(BaseModel):
    method: str
    K: int
    repeat: int
    seed: int
    scores: Optional[ClusterScores] = None
    error: Optional[str] = None
    knee: bool = False

    @property
    def ok(self) -> bool:
        return self.scores is not None
