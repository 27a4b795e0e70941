import csv
from pathlib import Path
from typing import Optional

import numpy as np

from rigsolve.core.exceptions import ValidationError
from rigsolve.models.manifest import RunManifest
from rigsolve.repositories.base import FileRepository, manifest_path


class MatrixRepository(FileRepository):
    """One CSV row per frame, one column per entry; header `<prefix>0, <prefix>1, ...`."""

    prefix = "v"

    def load(self, path: Path) -> np.ndarray:
        path = Path(path)
        if not path.exists():
            raise ValidationError(f"file not found: {path}")
        with path.open("r", newline="", encoding="utf-8") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if header is None:
                raise ValidationError(f"{path} is empty")
            try:
                rows = [[float(x) for x in row] for row in reader if row]
            except ValueError as e:
                raise ValidationError(f"{path}: non-numeric entry ({e})")
        if any(len(r) != len(header) for r in rows):
            raise ValidationError(f"{path}: ragged rows")
        return np.array(rows, dtype=np.float64).reshape(len(rows), len(header))

    def save(self, path: Path, matrix: np.ndarray, manifest: Optional[RunManifest] = None) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
        with path.open("w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow([f"{self.prefix}{j}" for j in range(matrix.shape[1])])
            for row in matrix:
                writer.writerow([repr(float(x)) for x in row])
        if manifest is not None:
            self.write_json(manifest_path(path), manifest.model_dump(mode="json"))
        return path


class WeightsRepository(MatrixRepository):
    prefix = "w"


class TargetsRepository(MatrixRepository):
    prefix = "c"
