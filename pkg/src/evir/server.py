"""HTTP search service over an immutable index."""
from __future__ import annotations

import time
import uuid
from pathlib import Path

from fastapi import FastAPI, File, Form, HTTPException, Response, UploadFile

from .errors import DecodeError, UnsupportedFormat
from .fusion import run_engine
from .imaging import decode_image
from .index import Index
from .ingest import _frame_files
from .videorank import QueryResult, aggregate_to_videos

ENGINES = ("A", "B", "C")


def result_payload(result: QueryResult, elapsed_ms: float) -> dict:
    return {
        "query_id": result.query_id,
        "engine": result.engine,
        "elapsed_ms": round(elapsed_ms, 3),
        "videos": [
            {
                "video_id": hit.video_id,
                "best_score": hit.best_score,
                "best_timestamp": hit.best_frame.timestamp,
                "best_frame_index": hit.best_frame.frame_index,
                "matched_timestamps": list(hit.matched_timestamps),
            }
            for hit in result.videos
        ],
    }


def create_app(idx: Index | None = None) -> FastAPI:
    app = FastAPI(title="evir search service")
    app.state.index = idx

    def index_or_503() -> Index:
        if app.state.index is None:
            raise HTTPException(status_code=503, detail="index not loaded yet")
        return app.state.index

    @app.get("/api/health")
    def health():
        idx = app.state.index
        return {"status": "ok" if idx is not None else "loading",
                "frames": 0 if idx is None else len(idx)}

    @app.get("/api/videos")
    def videos():
        idx = index_or_503()
        counts: dict[str, int] = {}
        for f in idx.frames:
            counts[f.video_id] = counts.get(f.video_id, 0) + 1
        fps = idx.config.sampling_fps
        return [
            {"video_id": vid, "frame_count": n, "duration": n / fps}
            for vid, n in sorted(counts.items())
        ]

    @app.get("/api/videos/{video_id}/frames/{frame_index}")
    def frame_image(video_id: str, frame_index: int):
        idx = index_or_503()
        src = idx.sources.get(video_id)
        if src is None or not Path(src).is_dir():
            raise HTTPException(status_code=404, detail="unknown video or no media available")
        files = _frame_files(Path(src))
        if frame_index < 0 or frame_index >= len(files):
            raise HTTPException(status_code=404, detail="frame index out of range")
        data = files[frame_index].read_bytes()
        mime = "image/png" if files[frame_index].suffix.lower() == ".png" else "image/jpeg"
        return Response(content=data, media_type=mime)

    @app.post("/api/search")
    async def search(image: UploadFile = File(...), engine: str = Form("A"),
                     frame_cap: int | None = Form(None),
                     video_cap: int | None = Form(None)):
        idx = index_or_503()
        if engine not in ENGINES:
            raise HTTPException(status_code=400, detail=f"engine must be one of {ENGINES}")
        if (frame_cap is not None and frame_cap < 1) or (video_cap is not None and video_cap < 1):
            raise HTTPException(status_code=400, detail="caps must be >= 1")
        payload = await image.read()
        try:
            img = decode_image(payload)
        except (DecodeError, UnsupportedFormat) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

        started = time.perf_counter()
        fused = run_engine(idx, img, engine)
        result = aggregate_to_videos(
            fused,
            idx.frames,
            frame_cap if frame_cap is not None else idx.config.frame_cap,
            video_cap if video_cap is not None else idx.config.video_cap,
            query_id=uuid.uuid4().hex[:12],
            engine=engine,
        )
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        return result_payload(result, elapsed_ms)

    return app


def serve(idx: Index, host: str = "127.0.0.1", port: int = 8080) -> None:
    import uvicorn

    uvicorn.run(create_app(idx), host=host, port=port)
