# model/hopping.py
from typing import List, Optional, Tuple
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class HoppingEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    gamma: Tuple[int, int]
    matrix_re: List[List[float]]
    matrix_im: Optional[List[List[float]]] = None


class HoppingDocument(BaseModel):
    """
    Wire schema of a hopping spec:
    {"dim":2, "bands":N, "cutoff":R, "hoppings":[{"gamma":[g1,g2], "matrix_re":[[…]], "matrix_im":[[…]]}]}
    """

    model_config = ConfigDict(extra="forbid")

    dim: int
    bands: int = Field(ge=1)
    cutoff: int = Field(ge=0)
    hoppings: List[HoppingEntry] = Field(min_length=1)

    @field_validator("dim")
    @classmethod
    def _two_dimensional(cls, v: int) -> int:
        if v != 2:
            raise ValueError(f"dim must be 2, got {v}")
        return v

    @model_validator(mode="after")
    def _shapes_and_range(self) -> "HoppingDocument":
        n = self.bands
        for i, entry in enumerate(self.hoppings):
            for name in ("matrix_re", "matrix_im"):
                rows = getattr(entry, name)
                if rows is None:
                    continue
                if len(rows) != n or any(len(r) != n for r in rows):
                    raise ValueError(f"hoppings[{i}].{name} must be {n}x{n}")
            if max(abs(g) for g in entry.gamma) > self.cutoff:
                raise ValueError(f"hoppings[{i}].gamma={list(entry.gamma)} exceeds cutoff {self.cutoff}")
        return self
