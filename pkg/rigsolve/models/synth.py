from pydantic import BaseModel, Field, model_validator


class GenSpec(BaseModel):
    """Synthetic rig + animation recipe. Defaults are the desk-scale setup."""

    n: int = Field(default=600, ge=1)
    m: int = Field(default=24, ge=1)
    n_pairs: int = Field(default=20, ge=0)
    n_triples: int = Field(default=6, ge=0)
    n_quads: int = Field(default=2, ge=0)
    footprint: int = Field(default=120, ge=1, description="vertices deformed by one blendshape")
    frames: int = Field(default=60, ge=0)
    sparsity: float = Field(default=5.0, ge=0.0, description="expected active controllers per frame")
    noise_sigma: float = Field(default=0.03, ge=0.0, description="per-coordinate noise std, cm")
    head_width: float = Field(default=18.0, gt=0.0, description="cm")
    seed: int = 0

    @model_validator(mode="after")
    def _check(self):
        if self.sparsity > self.m:
            raise ValueError(f"sparsity {self.sparsity} exceeds controller count {self.m}")
        if self.footprint > self.n:
            raise ValueError(f"footprint {self.footprint} exceeds vertex count {self.n}")
        return self

    @classmethod
    def full_scale(cls, **overrides) -> "GenSpec":
        params = dict(
            n=10000, m=102, n_pairs=120, n_triples=30, n_quads=10,
            footprint=1200, frames=300, sparsity=12.0,
        )
        params.update(overrides)
        return cls(**params)
