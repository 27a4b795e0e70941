from pathlib import Path
from typing import List, Optional

from rigsolve.models.clustering import SweepRecord
from rigsolve.models.manifest import RunManifest
from rigsolve.models.metrics import FrameMetrics, TradeoffTable
from rigsolve.repositories.base import FileRepository

FRAME_FIELDS = ["frame", "method", "rmse", "cardinality", "time_ms", "iters", "converged"]
SWEEP_FIELDS = ["method", "K", "seed", "E_D", "E_ID", "E_R", "knee", "error"]
TRADEOFF_FIELDS = ["alpha", "mean_rmse", "max_rmse", "mean_cardinality", "mean_time_ms", "selected"]
ROUGHNESS_FIELDS = ["controller", "roughness"]


class ResultsRepository(FileRepository):

    def save_frames(self, path: Path, method: str, frames: List[FrameMetrics], manifest: Optional[RunManifest] = None) -> Path:
        rows = [
            {
                "frame": f.frame,
                "method": method,
                "rmse": f.rmse,
                "cardinality": f.cardinality,
                "time_ms": f.time_ms,
                "iters": f.iterations,
                "converged": int(f.converged),
            }
            for f in frames
        ]
        return self.write_rows(path, rows, FRAME_FIELDS, manifest)

    def load_frames(self, path: Path) -> List[FrameMetrics]:
        return [
            FrameMetrics(
                frame=int(r["frame"]),
                rmse=float(r["rmse"]),
                cardinality=int(r["cardinality"]),
                time_ms=float(r["time_ms"]),
                iterations=int(r["iters"]),
                converged=bool(int(r["converged"])),
            )
            for r in self.read_rows(path)
        ]

    def save_sweep(self, path: Path, records: List[SweepRecord], manifest: Optional[RunManifest] = None) -> Path:
        rows = []
        for r in records:
            s = r.scores
            rows.append(
                {
                    "method": r.method,
                    "K": r.K,
                    "seed": r.seed,
                    "E_D": s.density if s else None,
                    "E_ID": s.inter_density if s else None,
                    "E_R": s.reconstruction_error if s else None,
                    "knee": int(r.knee),
                    "error": r.error,
                }
            )
        return self.write_rows(path, rows, SWEEP_FIELDS, manifest)

    def save_tradeoff(self, path: Path, table: TradeoffTable, manifest: Optional[RunManifest] = None) -> Path:
        rows = [
            {**row.model_dump(), "selected": int(table.selected_alpha is not None and row.alpha == table.selected_alpha)}
            for row in table.rows
        ]
        return self.write_rows(path, rows, TRADEOFF_FIELDS, manifest)

    def save_roughness(self, path: Path, roughness: List[float], manifest: Optional[RunManifest] = None) -> Path:
        rows = [{"controller": i, "roughness": r} for i, r in enumerate(roughness)]
        return self.write_rows(path, rows, ROUGHNESS_FIELDS, manifest)

    def save_summary(self, path: Path, summary: dict, manifest: Optional[RunManifest] = None) -> Path:
        return self.write_json(path, summary, manifest)
