from .base import ACC, BOVW, CEDD, PHOG, MODEL_DIMS, Descriptor
from .cedd import extract_cedd
from .acc import extract_acc
from .phog import extract_phog
from .distance import (
    L1,
    TANIMOTO,
    METRIC_FOR_MODEL,
    descriptor_distance,
    similarity_from_distance,
)

__all__ = [
    "ACC", "BOVW", "CEDD", "PHOG", "MODEL_DIMS", "Descriptor",
    "extract_cedd", "extract_acc", "extract_phog",
    "L1", "TANIMOTO", "METRIC_FOR_MODEL",
    "descriptor_distance", "similarity_from_distance",
]
