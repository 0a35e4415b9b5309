import numpy as np
import pytest

from evir.imaging import PixelGrid, decode_image
from evir.ingest import build_index, parse_ground_truth, parse_manifest
from evir.synth import CorpusSpec, generate_corpus


def random_image(rng, w=32, h=32):
    return PixelGrid(rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8))


def uniform_image(r, g, b, w=16, h=16):
    return PixelGrid(np.full((h, w, 3), (r, g, b), dtype=np.uint8))


@pytest.fixture(scope="session")
def micro_corpus(tmp_path_factory):
    """Small corpus (4 videos x 6 frames) plus a built index, shared by
    integration-level tests."""
    root = tmp_path_factory.mktemp("micro_corpus")
    spec = CorpusSpec(n_videos=4, frames_per_video=6, n_queries=8, seed=11)
    paths = generate_corpus(root, spec)
    manifest = parse_manifest(paths["manifest"])
    idx = build_index(manifest, vocab_k=32, seed=0)
    gt = parse_ground_truth(paths["ground_truth"])
    queries = []
    from pathlib import Path

    for p in sorted(Path(paths["queries"]).iterdir()):
        queries.append((p.stem, decode_image(p.read_bytes())))
    return {"paths": paths, "manifest": manifest, "index": idx,
            "gt": gt, "queries": queries, "spec": spec, "root": root}
