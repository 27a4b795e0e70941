from typing import Any, Dict

import numpy as np
import pydantic

from rigsolve.core.exceptions import ValidationError
from rigsolve.models.clustering import Clustering
from rigsolve.models.rig import BlendshapeModel


def to_jsonable(value: Any) -> Any:
    """numpy-aware conversion to plain JSON types."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


def serialize_model(model: BlendshapeModel) -> Dict[str, Any]:
    return {
        "n": model.n,
        "m": model.m,
        "neutral": model.neutral.tolist(),
        "blendshapes": [model.basis[:, i].tolist() for i in range(model.m)],
        "correctives": [
            {"ids": list(term.ids), "offset": term.offset.tolist()}
            for term in model.correctives
        ],
    }


def deserialize_model(doc: Dict[str, Any]) -> BlendshapeModel:
    try:
        n, m = int(doc["n"]), int(doc["m"])
        shapes = doc["blendshapes"]
        if len(shapes) != m:
            raise ValidationError(f"model declares m={m} but lists {len(shapes)} blendshapes")
        basis = np.array(shapes, dtype=np.float64).reshape(m, 3 * n).T if m else np.zeros((3 * n, 0))
        return BlendshapeModel(
            n=n,
            m=m,
            neutral=doc["neutral"],
            basis=basis,
            correctives=doc.get("correctives", []),
        )
    except KeyError as e:
        raise ValidationError(f"model file is missing field {e}")
    except (pydantic.ValidationError, ValueError) as e:
        raise ValidationError(f"invalid model file: {e}")


def serialize_clustering(clustering: Clustering) -> Dict[str, Any]:
    return clustering.model_dump()


def deserialize_clustering(doc: Dict[str, Any]) -> Clustering:
    try:
        return Clustering.model_validate({k: v for k, v in doc.items() if k != "manifest"})
    except pydantic.ValidationError as e:
        raise ValidationError(f"invalid clustering file: {e}")
