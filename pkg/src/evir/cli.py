"""Command line interface: index, vocab, search, eval, serve, gen-corpus."""
from __future__ import annotations

import argparse
import os
import struct
import sys
import time
import zlib
from pathlib import Path

import numpy as np

from . import index as index_mod
from .errors import EvirError
from .fusion import run_engine
from .imaging import decode_image
from .index import FORMAT_VERSION, MAGIC, Index, IndexConfig
from .ingest import build_index, evaluate, parse_ground_truth, parse_manifest
from .report import format_eval_table, render_report, write_eval_outputs
from .synth import CorpusSpec, generate_corpus
from .videorank import aggregate_to_videos

ENV_PREFIX = "EVIR_"

_CONFIG_ENV_FIELDS = {
    "sampling_fps": float,
    "detector_threshold": float,
    "detector_octaves": int,
    "max_keypoints": int,
    "fusion_top_n": int,
    "frame_cap": int,
    "video_cap": int,
}


def config_from_args(args) -> IndexConfig:
    """CLI flags, overridable per key via EVIR_<FIELD> environment variables."""
    cfg = IndexConfig(
        sampling_fps=args.fps,
        detector_threshold=args.threshold,
        detector_octaves=args.octaves,
        max_keypoints=args.max_keypoints,
        fusion_top_n=args.top_n,
    )
    for name, cast in _CONFIG_ENV_FIELDS.items():
        raw = os.environ.get(ENV_PREFIX + name.upper())
        if raw is not None:
            setattr(cfg, name, cast(raw))
    return cfg


def _out_stream(path: str | None):
    return open(path, "w", encoding="utf-8") if path else sys.stdout


def cmd_gen_corpus(args) -> int:
    spec = CorpusSpec(
        n_videos=args.videos,
        frames_per_video=args.frames,
        width=args.width,
        height=args.height,
        fps=args.fps,
        seed=args.seed,
        n_queries=args.queries,
    )
    paths = generate_corpus(args.out, spec)
    print(f"corpus written under {args.out}", file=sys.stderr)
    for key, value in paths.items():
        print(f"{key}\t{value}")
    return 0


def cmd_index(args) -> int:
    manifest = parse_manifest(args.manifest)
    cfg = config_from_args(args)
    started = time.perf_counter()
    idx = build_index(
        manifest,
        config=cfg,
        seed=args.seed,
        vocab_k=args.vocab_k,
        vocab_max_iter=args.vocab_max_iter,
        decoder_cmd=args.decoder_cmd,
    )
    idx.persist(args.out)
    elapsed = time.perf_counter() - started
    print(f"indexed {len(idx)} frames from {len(manifest)} videos "
          f"in {elapsed:.1f}s -> {args.out}", file=sys.stderr)
    return 0


def cmd_vocab(args) -> int:
    """Train (from a manifest) or export (from an index) a vocabulary, stored
    in the same binary framing as the index file's vocabulary block."""
    if args.index:
        idx = index_mod.load(args.index)
        vocab = idx.vocabulary
        if vocab is None:
            raise EvirError("index carries no vocabulary")
    else:
        if not args.manifest:
            raise EvirError("vocab needs --index or --manifest")
        from .imaging import to_grayscale
        from .ingest import SamplingConfig, sample_frames
        from .local import describe_local, detect_keypoints, train_vocabulary

        cfg = config_from_args(args)
        samples = []
        for rec in parse_manifest(args.manifest):
            for _, img in sample_frames(rec.video_id, rec.source,
                                        SamplingConfig(cfg.sampling_fps), args.decoder_cmd):
                kps = detect_keypoints(to_grayscale(img), cfg.detector_threshold,
                                       cfg.detector_octaves, cfg.max_keypoints)
                samples.extend(describe_local(img, kps))
        vocab = train_vocabulary(samples, k=args.vocab_k, seed=args.seed,
                                 max_iter=args.vocab_max_iter)

    body = struct.pack("<B", 1)
    body += struct.pack("<IIqI", vocab.centroids.shape[0], vocab.centroids.shape[1],
                        vocab.seed, vocab.iterations_run)
    body += vocab.centroids.astype("<f4").tobytes()
    with open(args.out, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<H", FORMAT_VERSION))
        fh.write(body)
        fh.write(struct.pack("<I", zlib.crc32(body)))
    print(f"vocabulary ({vocab.centroids.shape[0]} words) -> {args.out}", file=sys.stderr)
    return 0


def cmd_search(args) -> int:
    idx = index_mod.load(args.index)
    img = decode_image(Path(args.image).read_bytes())
    started = time.perf_counter()
    fused = run_engine(idx, img, args.engine)
    result = aggregate_to_videos(
        fused, idx.frames,
        args.frame_cap or idx.config.frame_cap,
        args.video_cap or idx.config.video_cap,
        query_id=Path(args.image).stem,
        engine=args.engine,
    )
    elapsed_ms = (time.perf_counter() - started) * 1000.0

    stream = _out_stream(args.out)
    try:
        print("query_id\tengine\trank\tvideo_id\tbest_score\tbest_timestamp"
              "\tmatched_timestamps\telapsed_ms", file=stream)
        for rank, hit in enumerate(result.videos, start=1):
            stamps = ",".join(f"{t:.3f}" for t in hit.matched_timestamps)
            print(f"{result.query_id}\t{args.engine}\t{rank}\t{hit.video_id}"
                  f"\t{hit.best_score:.6f}\t{hit.best_frame.timestamp:.3f}"
                  f"\t{stamps}\t{elapsed_ms:.1f}", file=stream)
    finally:
        if stream is not sys.stdout:
            stream.close()

    if args.html:
        Path(args.html).write_text(render_report(result, idx, img), encoding="utf-8")
        print(f"html report -> {args.html}", file=sys.stderr)
    return 0


def cmd_eval(args) -> int:
    idx = index_mod.load(args.index)
    gt = parse_ground_truth(args.gt)
    queries = []
    for path in sorted(Path(args.queries).iterdir()):
        if path.suffix.lower() in {".png", ".jpg", ".jpeg"}:
            queries.append((path.stem, decode_image(path.read_bytes())))
    engines = tuple(args.engines.split(","))
    report = evaluate(idx, queries, gt, engines=engines)
    print(format_eval_table(report))
    if args.out:
        paths = write_eval_outputs(report, args.out)
        for key, value in paths.items():
            print(f"{key}\t{value}", file=sys.stderr)
    return 0


def cmd_serve(args) -> int:
    from .server import serve

    idx = index_mod.load(args.index)
    print(f"serving {len(idx)} frames on {args.host}:{args.port}", file=sys.stderr)
    serve(idx, host=args.host, port=args.port)
    return 0


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fps", type=float, default=5.0, help="sampling rate (frames/s)")
    p.add_argument("--threshold", type=float, default=IndexConfig.detector_threshold,
                   help="fast-Hessian detection threshold")
    p.add_argument("--octaves", type=int, default=IndexConfig.detector_octaves)
    p.add_argument("--max-keypoints", type=int, default=IndexConfig.max_keypoints)
    p.add_argument("--top-n", type=int, default=IndexConfig.fusion_top_n,
                   help="per-model list length fed into fusion")
    p.add_argument("--vocab-k", type=int, default=512)
    p.add_argument("--vocab-max-iter", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--decoder-cmd", default=None,
                   help="external decoder template with {source} {fps} {outdir}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evir",
                                     description="query-by-image video retrieval engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-corpus", help="generate a synthetic frame corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--videos", type=int, default=20)
    p.add_argument("--frames", type=int, default=50)
    p.add_argument("--width", type=int, default=128)
    p.add_argument("--height", type=int, default=96)
    p.add_argument("--fps", type=float, default=5.0)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--queries", type=int, default=100)
    p.set_defaults(func=cmd_gen_corpus)

    p = sub.add_parser("index", help="build an index from a corpus manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("vocab", help="train or export a visual vocabulary")
    p.add_argument("--out", required=True)
    p.add_argument("--index", default=None, help="export from an existing index")
    p.add_argument("--manifest", default=None, help="train from a corpus manifest")
    _add_config_flags(p)
    p.set_defaults(func=cmd_vocab)

    p = sub.add_parser("search", help="search an index with a query image")
    p.add_argument("--index", required=True)
    p.add_argument("--image", required=True)
    p.add_argument("--engine", choices=["A", "B", "C"], default="A")
    p.add_argument("--frame-cap", type=int, default=None)
    p.add_argument("--video-cap", type=int, default=None)
    p.add_argument("--out", default=None, help="write TSV results here instead of stdout")
    p.add_argument("--html", default=None, help="also write an HTML timeline report")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("eval", help="run the precision@1..3 evaluation")
    p.add_argument("--index", required=True)
    p.add_argument("--queries", required=True, help="directory of query images")
    p.add_argument("--gt", required=True, help="query_id<TAB>video_id ground truth")
    p.add_argument("--engines", default="A,B,C")
    p.add_argument("--out", default=None, help="directory for report files and figure")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="serve the HTTP search API")
    p.add_argument("--index", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EvirError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
