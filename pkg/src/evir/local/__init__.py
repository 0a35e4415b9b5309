from .detector import Keypoint, detect_keypoints
from .patches import LocalDescriptor, describe_local, extract_patch
from .vocabulary import Vocabulary, train_vocabulary
from .bovw import BovwHistogram, bovw_similarity, encode_bovw

__all__ = [
    "Keypoint", "detect_keypoints",
    "LocalDescriptor", "describe_local", "extract_patch",
    "Vocabulary", "train_vocabulary",
    "BovwHistogram", "bovw_similarity", "encode_bovw",
]
