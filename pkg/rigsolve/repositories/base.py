import csv
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

from rigsolve.core.exceptions import ValidationError
from rigsolve.models.manifest import RunManifest
from rigsolve.utils.serializers import to_jsonable


class FileRepository:
    """Shared JSON / CSV plumbing for the artifact repositories."""

    def read_json(self, path: Path) -> Any:
        path = Path(path)
        if not path.exists():
            raise ValidationError(f"file not found: {path}")
        try:
            with path.open("r", encoding="utf-8") as f:
                return json.load(f)
        except json.JSONDecodeError as e:
            raise ValidationError(f"{path} is not valid JSON: {e}")

    def write_json(self, path: Path, doc: Any, manifest: Optional[RunManifest] = None) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        if manifest is not None and isinstance(doc, dict):
            doc = {**doc, "manifest": manifest.model_dump(mode="json")}
        with path.open("w", encoding="utf-8") as f:
            json.dump(to_jsonable(doc), f, indent=2)
            f.write("\n")
        return path

    def read_rows(self, path: Path) -> List[Dict[str, str]]:
        path = Path(path)
        if not path.exists():
            raise ValidationError(f"file not found: {path}")
        with path.open("r", newline="", encoding="utf-8") as f:
            return list(csv.DictReader(f))

    def write_rows(
        self,
        path: Path,
        rows: Iterable[Dict[str, Any]],
        fieldnames: Sequence[str],
        manifest: Optional[RunManifest] = None,
    ) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as f:
            writer = csv.DictWriter(f, fieldnames=list(fieldnames))
            writer.writeheader()
            for row in rows:
                writer.writerow({k: _cell(v) for k, v in row.items()})
        if manifest is not None:
            self.write_json(manifest_path(path), manifest.model_dump(mode="json"))
        return path


def manifest_path(path: Path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".manifest.json")


def _cell(value: Any) -> Any:
    # repr keeps full float precision so files round-trip exactly
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return value
