"""Descriptor container shared by all four retrieval models."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ModelMismatch

CEDD = "CEDD"
ACC = "ACC"
PHOG = "PHOG"
BOVW = "BOVW"

MODEL_DIMS = {CEDD: 144, ACC: 256, PHOG: 630, BOVW: 512}

# storage dtype per model; CEDD is 3-bit quantized so one byte per bin suffices
MODEL_DTYPES = {CEDD: np.uint8, ACC: np.float32, PHOG: np.float32, BOVW: np.float32}


@dataclass(frozen=True)
class Descriptor:
    """Fixed-length feature vector tagged with its retrieval model."""

    model: str
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.model not in MODEL_DIMS:
            raise ModelMismatch(f"unknown model {self.model!r}")
        v = np.asarray(self.values, dtype=MODEL_DTYPES[self.model])
        # BOVW length follows the trained vocabulary size (512 by default)
        if v.ndim != 1 or (self.model != BOVW and v.shape != (MODEL_DIMS[self.model],)):
            raise ModelMismatch(
                f"{self.model} descriptor must have {MODEL_DIMS[self.model]} values, "
                f"got shape {v.shape}"
            )
        object.__setattr__(self, "values", v)
