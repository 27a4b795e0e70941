"""
Rig evaluation and the matrices derived from the blendshape basis.

All functions are pure; models are immutable after load.
"""

from typing import Sequence, Union

import numpy as np

from rigsolve.core.exceptions import DimensionError, ValidationError
from rigsolve.models.rig import BlendshapeModel, CorrectiveTerm, SubModel, vertex_rows

ModelLike = Union[BlendshapeModel, SubModel]


def unwrap_model(model: ModelLike) -> BlendshapeModel:
    return model.model if isinstance(model, SubModel) else model


def check_weights(model: BlendshapeModel, w) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (model.m,):
        raise DimensionError(f"weight vector has shape {w.shape}, model expects ({model.m},)")
    return w


def corrective_coefficients(model: BlendshapeModel, w: np.ndarray) -> np.ndarray:
    """Product of the participating weights for every corrective term."""
    if not model.corrective_ids:
        return np.zeros(0)
    w_ext = np.append(w, 1.0)
    return w_ext[model.padded_ids].prod(axis=1)


def evaluate_rig(model: ModelLike, w) -> np.ndarray:
    """f(w) = b0 + Bw + all active corrective terms."""
    model = unwrap_model(model)
    w = check_weights(model, w)
    mesh = model.neutral + model.basis @ w
    if model.corrective_ids:
        mesh += corrective_coefficients(model, w) @ model.corrective_offsets
    return mesh


def controller_gradient(model: ModelLike, w, i: int) -> np.ndarray:
    """
    Vector g with f(w) = c + w_i * g, where c = f(w with w_i = 0).

    The rig is multilinear, so g is b_i plus every corrective containing i scaled
    by the product of its other weights.
    """
    model = unwrap_model(model)
    w = check_weights(model, w)
    if i < 0 or i >= model.m:
        raise DimensionError(f"controller index {i} outside [0, {model.m})")

    g = model.basis[:, i].copy()
    terms = model.terms_of(i)
    if terms.size:
        w_ext = np.append(w, 1.0)
        w_ext[i] = 1.0
        coef = w_ext[model.padded_ids[terms]].prod(axis=1)
        g += coef @ model.corrective_offsets[terms]
    return g


def offset_matrix(model: ModelLike) -> np.ndarray:
    """D (n x m): squared displacement norm of vertex l under blendshape i."""
    model = unwrap_model(model)
    per_vertex = model.basis.reshape(model.n, 3, model.m)
    return np.einsum("lci,lci->li", per_vertex, per_vertex)


def delta_matrix(model: ModelLike) -> np.ndarray:
    """Delta (n x 3m): row l holds (x, y, z) of vertex l for each blendshape in turn."""
    model = unwrap_model(model)
    per_vertex = model.basis.reshape(model.n, 3, model.m)
    return np.ascontiguousarray(per_vertex.transpose(0, 2, 1)).reshape(model.n, 3 * model.m)


def _check_index_list(name: str, values: Sequence[int], upper: int) -> list:
    values = [int(v) for v in values]
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValidationError(f"{name} must be sorted and unique")
    if values and (values[0] < 0 or values[-1] >= upper):
        raise DimensionError(f"{name} contains an index outside [0, {upper})")
    return values


def restrict_model(model: BlendshapeModel, mesh_vertices: Sequence[int], controllers: Sequence[int]) -> SubModel:
    """
    Limit the rig to the listed vertices and controllers.

    A corrective survives only when all of its controllers are listed; its ids are
    renumbered to local controller positions.
    """
    mesh_vertices = _check_index_list("mesh_vertices", mesh_vertices, model.n)
    controllers = _check_index_list("controllers", controllers, model.m)
    if not mesh_vertices or not controllers:
        raise ValidationError("restriction needs at least one vertex and one controller")

    rows = vertex_rows(mesh_vertices)
    local_of = {g: l for l, g in enumerate(controllers)}

    kept = []
    dropped = 0
    for ids, offset in zip(model.corrective_ids, model.corrective_offsets):
        if all(i in local_of for i in ids):
            kept.append(CorrectiveTerm(ids=tuple(local_of[i] for i in ids), offset=offset[rows]))
        elif any(i in local_of for i in ids):
            dropped += 1

    sub = BlendshapeModel(
        n=len(mesh_vertices),
        m=len(controllers),
        neutral=model.neutral[rows],
        basis=model.basis[np.ix_(rows, controllers)],
        correctives=kept,
    )
    return SubModel(
        parent_n=model.n,
        parent_m=model.m,
        mesh_vertices=mesh_vertices,
        controllers=controllers,
        model=sub,
        dropped_correctives=dropped,
    )
