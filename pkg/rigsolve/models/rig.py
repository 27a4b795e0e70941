"""
Blendshape rig data types.

Vertex coordinates are laid out as [x_1, y_1, z_1, x_2, ...], so vertex l owns
rows 3l, 3l+1, 3l+2 of the neutral vector, the basis and every corrective offset.
"""

from typing import List, Tuple

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator, model_validator

# A weight vector holds one activation per controller; solver outputs live in [0, 1]^m.
WeightVector = npt.NDArray[np.float64]
# A target mesh is a flat vector of length 3n (or 3n_k for a cluster-restricted target).
TargetMesh = npt.NDArray[np.float64]


def _as_float_array(value, ndim: int) -> np.ndarray:
    arr = np.asarray(value, dtype=np.float64)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("array contains non-finite values")
    return arr


class CorrectiveTerm(BaseModel):
    """Offset activated by the product of 2-4 controller weights."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    ids: Tuple[int, ...]
    offset: np.ndarray

    @field_validator("ids", mode="before")
    @classmethod
    def _ids_tuple(cls, v):
        return tuple(int(i) for i in v)

    @field_validator("ids")
    @classmethod
    def _ids_valid(cls, v: Tuple[int, ...]) -> Tuple[int, ...]:
        if len(v) not in (2, 3, 4):
            raise ValueError(f"corrective must involve 2, 3 or 4 controllers, got {len(v)}")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError(f"corrective ids must be strictly increasing, got {v}")
        return v

    @field_validator("offset", mode="before")
    @classmethod
    def _offset_array(cls, v):
        return _as_float_array(v, 1)

    @property
    def level(self) -> int:
        return len(self.ids)


class BlendshapeModel(BaseModel):
    """
    Neutral mesh, linear basis and corrective terms of levels 2-4.

    f(w) = b0 + B w + sum_P w_i w_j b^{ij} + sum_T w_i w_j w_k b^{ijk} + sum_Q w_i w_j w_k w_l b^{ijkl}
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n: int = Field(..., ge=1, description="vertex count")
    m: int = Field(..., ge=1, description="controller count")
    neutral: np.ndarray
    basis: np.ndarray
    correctives: List[CorrectiveTerm] = Field(default_factory=list)

    # derived, filled in model_post_init
    _corrective_offsets: np.ndarray = PrivateAttr()
    _corrective_ids: List[Tuple[int, ...]] = PrivateAttr()
    _terms_by_controller: List[np.ndarray] = PrivateAttr()
    _padded_ids: np.ndarray = PrivateAttr()

    @field_validator("neutral", mode="before")
    @classmethod
    def _neutral_array(cls, v):
        return _as_float_array(v, 1)

    @field_validator("basis", mode="before")
    @classmethod
    def _basis_array(cls, v):
        # column-major so that a single blendshape column is contiguous
        return np.asfortranarray(_as_float_array(v, 2))

    @model_validator(mode="before")
    @classmethod
    def _check_corrective_range(cls, data):
        # model_post_init indexes per-controller tables by these ids before any
        # after-validator runs
        if not isinstance(data, dict):
            return data
        try:
            m = int(data.get("m"))
        except (TypeError, ValueError):
            return data
        for term in data.get("correctives") or []:
            ids = term.ids if isinstance(term, CorrectiveTerm) else term.get("ids") if isinstance(term, dict) else None
            try:
                ids = [int(i) for i in ids]
            except (TypeError, ValueError):
                # left to the field validators
                continue
            if ids and (max(ids) >= m or min(ids) < 0):
                raise ValueError(f"corrective {tuple(ids)} references a controller outside [0, {m})")
        return data

    @model_validator(mode="after")
    def _check_dimensions(self):
        rows = 3 * self.n
        if self.neutral.shape != (rows,):
            raise ValueError(f"neutral must have length 3n={rows}, got {self.neutral.shape[0]}")
        if self.basis.shape != (rows, self.m):
            raise ValueError(f"basis must be {rows}x{self.m}, got {self.basis.shape}")

        seen = set()
        for term in self.correctives:
            if term.offset.shape != (rows,):
                raise ValueError(f"corrective {term.ids} offset must have length {rows}")
            if term.ids in seen:
                raise ValueError(f"duplicate corrective {term.ids}")
            seen.add(term.ids)
        return self

    def model_post_init(self, __context) -> None:
        rows = 3 * self.n
        if self.correctives:
            self._corrective_offsets = np.stack([t.offset for t in self.correctives])
        else:
            self._corrective_offsets = np.zeros((0, rows))
        self._corrective_ids = [t.ids for t in self.correctives]

        by_controller: List[List[int]] = [[] for _ in range(self.m)]
        for idx, ids in enumerate(self._corrective_ids):
            for i in ids:
                by_controller[i].append(idx)
        self._terms_by_controller = [np.asarray(t, dtype=np.intp) for t in by_controller]

        # ids padded to width 4 with the sentinel m, which indexes a trailing 1.0
        padded = np.full((len(self._corrective_ids), 4), self.m, dtype=np.intp)
        for idx, ids in enumerate(self._corrective_ids):
            padded[idx, : len(ids)] = ids
        self._padded_ids = padded

    # ---- derived views ----

    @property
    def corrective_offsets(self) -> np.ndarray:
        """Stacked corrective offsets, shape (#correctives, 3n)."""
        return self._corrective_offsets

    @property
    def corrective_ids(self) -> List[Tuple[int, ...]]:
        return self._corrective_ids

    @property
    def padded_ids(self) -> np.ndarray:
        return self._padded_ids

    def terms_of(self, i: int) -> np.ndarray:
        """Indices of the corrective terms that involve controller i."""
        return self._terms_by_controller[i]

    def corrective_counts(self) -> dict:
        counts = {2: 0, 3: 0, 4: 0}
        for ids in self._corrective_ids:
            counts[len(ids)] += 1
        return counts


class SubModel(BaseModel):
    """A model restricted to a subset of vertices and controllers.

    `model` is a self-contained BlendshapeModel over local indices: local controller
    i is global controller `controllers[i]`, local vertex l is `mesh_vertices[l]`.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    parent_n: int
    parent_m: int
    mesh_vertices: List[int]
    controllers: List[int]
    model: BlendshapeModel
    dropped_correctives: int = 0

    @property
    def rows(self) -> np.ndarray:
        """Rows of the parent's 3n vectors covered by this submodel."""
        return vertex_rows(self.mesh_vertices)


def vertex_rows(vertices) -> np.ndarray:
    v = np.asarray(vertices, dtype=np.intp)
    return (3 * v[:, None] + np.arange(3)[None, :]).reshape(-1)
