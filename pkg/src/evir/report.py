"""Result presentation: evaluation tables (text + CSV + figure) and the
self-contained HTML timeline page for a single query."""
from __future__ import annotations

import base64
import csv
import html
import io
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .imaging import PixelGrid, encode_png
from .index import Index
from .ingest import EvalReport
from .videorank import QueryResult

ENGINE_NAMES = {"A": "Sum of Ranks", "B": "Sum of Scores", "C": "SIMPLE-CEDD"}


def format_eval_table(report: EvalReport) -> str:
    """Aligned text table: one row per position, one column per engine."""
    engines = list(report.engines)
    headers = [""] + [f"{e} ({ENGINE_NAMES.get(e, e)})" for e in engines]
    rows = []
    for pos in range(3):
        row = [f"Precision @ {pos + 1}"]
        for e in engines:
            st = report.engines[e]
            row.append(f"{st.hits_at[pos]} ({st.rates[pos]:.1%})")
        rows.append(row)
    top3 = ["Top-3 total"]
    for e in engines:
        st = report.engines[e]
        top3.append(f"{sum(st.hits_at)} ({st.top3_rate:.1%})")
    rows.append(top3)

    widths = [max(len(r[i]) for r in [headers] + rows) for i in range(len(headers))]
    lines = [f"Queries: {report.query_count}"]
    lines.append("  ".join(h.ljust(w) for h, w in zip(headers, widths)))
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
    return "\n".join(lines)


def write_eval_outputs(report: EvalReport, outdir) -> dict[str, str]:
    """report.txt, report.csv and a precision bar chart under outdir."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)

    txt = out / "report.txt"
    txt.write_text(format_eval_table(report) + "\n", encoding="utf-8")

    csv_path = out / "report.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["engine", "position", "hits", "rate", "query_count"])
        for e, st in report.engines.items():
            for pos in range(3):
                writer.writerow([e, pos + 1, st.hits_at[pos],
                                 f"{st.rates[pos]:.6f}", st.query_count])

    fig_path = out / "precision.png"
    engines = list(report.engines)
    fig, ax = plt.subplots(figsize=(6, 4))
    x = range(3)
    width = 0.8 / max(1, len(engines))
    for i, e in enumerate(engines):
        st = report.engines[e]
        ax.bar([p + i * width for p in x], st.rates, width,
               label=f"{e} ({ENGINE_NAMES.get(e, e)})")
    ax.set_xticks([p + width * (len(engines) - 1) / 2 for p in x])
    ax.set_xticklabels([f"@{p + 1}" for p in x])
    ax.set_ylabel("fraction of queries")
    ax.set_title("Precision per result position")
    ax.legend()
    fig.tight_layout()
    fig.savefig(fig_path, dpi=120)
    plt.close(fig)

    return {"text": str(txt), "csv": str(csv_path), "figure": str(fig_path)}


def _video_durations(idx: Index) -> dict[str, float]:
    fps = idx.config.sampling_fps
    last: dict[str, int] = {}
    for f in idx.frames:
        last[f.video_id] = max(last.get(f.video_id, 0), f.frame_index)
    return {vid: (n + 1) / fps for vid, n in last.items()}


def _poster_data_uri(idx: Index, video_id: str, frame_index: int) -> str | None:
    src = idx.sources.get(video_id)
    if not src or not Path(src).is_dir():
        return None
    from .ingest import _frame_files

    files = _frame_files(Path(src))
    if frame_index >= len(files):
        return None
    data = files[frame_index].read_bytes()
    mime = "image/png" if files[frame_index].suffix.lower() == ".png" else "image/jpeg"
    return f"data:{mime};base64,{base64.b64encode(data).decode('ascii')}"


_PAGE_CSS = """
body { font-family: sans-serif; margin: 2em; background: #fafafa; }
.video-section { margin: 1.5em 0; padding: 1em; background: #fff; border: 1px solid #ddd; }
.timeline { position: relative; height: 18px; background: linear-gradient(#b33, #833);
            border-radius: 3px; margin-top: 0.6em; }
.marker { position: absolute; top: -8px; width: 0; height: 0; transform: translateX(-6px);
          border-left: 6px solid transparent; border-right: 6px solid transparent;
          border-top: 10px solid #222; cursor: help; }
img.query { max-width: 320px; border: 1px solid #999; }
img.poster { max-width: 240px; display: block; margin-bottom: 0.4em; }
"""


def render_report(result: QueryResult, idx: Index,
                  query_img: PixelGrid | None = None) -> str:
    """One self-contained HTML page: inline query image, one section per video
    with a timeline bar and a triangle marker at each matched timestamp."""
    durations = _video_durations(idx)
    fps = idx.config.sampling_fps
    parts = [
        "<!DOCTYPE html><html><head><meta charset='utf-8'>",
        f"<title>evir results: {html.escape(result.query_id)}</title>",
        f"<style>{_PAGE_CSS}</style></head><body>",
        f"<h1>Query {html.escape(result.query_id)} "
        f"(engine {html.escape(result.engine)})</h1>",
    ]
    if query_img is not None:
        uri = "data:image/png;base64," + base64.b64encode(encode_png(query_img)).decode("ascii")
        parts.append(f"<p><img class='query' src='{uri}' alt='query image'></p>")

    # fused score per (video, timestamp) for marker tooltips
    ts_score: dict[tuple[str, float], float] = {}
    for entry in result.considered_frames.entries:
        ref = idx.frames[entry.doc]
        ts_score[(ref.video_id, ref.timestamp)] = entry.fused_score

    if not result.videos:
        parts.append("<p><strong>No matches found.</strong></p>")
    else:
        for hit in result.videos:
            duration = durations.get(hit.video_id, 0.0)
            parts.append("<div class='video-section'>")
            parts.append(
                f"<h2>{html.escape(hit.video_id)}</h2>"
                f"<p>best score {hit.best_score:.4f} at "
                f"{hit.best_frame.timestamp:.2f}&nbsp;s</p>"
            )
            poster = _poster_data_uri(idx, hit.video_id, hit.best_frame.frame_index)
            if poster:
                parts.append(f"<img class='poster' src='{poster}' alt='best matching frame'>")
            parts.append("<div class='timeline'>")
            for ts in hit.matched_timestamps:
                frac = 0.0 if duration <= 0 else min(1.0, ts / duration)
                score = ts_score.get((hit.video_id, ts))
                title = f"{ts:.2f} s"
                if score is not None:
                    title += f" (score {score:.4f})"
                parts.append(
                    f"<span class='marker' style='left:{frac * 100:.4f}%' "
                    f"title='{title}' data-timestamp='{ts}' "
                    f"data-frame='{round(ts * fps)}'></span>"
                )
            parts.append("</div></div>")
    parts.append("</body></html>")
    return "".join(parts)
