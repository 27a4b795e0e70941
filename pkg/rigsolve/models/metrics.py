from typing import List, Optional

from pydantic import BaseModel, Field


class FrameMetrics(BaseModel):
    frame: int = 0
    rmse: float = Field(..., ge=0.0)
    cardinality: int = Field(..., ge=0)
    time_ms: float = 0.0
    iterations: int = 0
    converged: bool = True


class SequenceMetrics(BaseModel):
    frames: List[FrameMetrics]
    # None when fewer than 3 frames
    roughness: Optional[List[float]] = None
    mean_rmse: float
    max_rmse: float
    median_rmse: float
    q1_rmse: float
    q3_rmse: float
    mean_cardinality: float
    std_cardinality: float
    mean_time_ms: float
    total_roughness: Optional[float] = None


class TradeoffRow(BaseModel):
    alpha: float
    mean_rmse: float
    max_rmse: float
    mean_cardinality: float
    mean_time_ms: float


class TradeoffTable(BaseModel):
    method: str
    rows: List[TradeoffRow]
    zero_baseline_rmse: float
    selected_alpha: Optional[float] = None
    band: Optional[List[float]] = None
