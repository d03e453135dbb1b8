"""HTTP service collecting fluency ratings from the annotation UI.

The evaluation set is held read-only in memory; ratings are appended to a
JSON-lines log and materialized last-write-wins per (item, annotator).
The items endpoint never exposes rule or dataset names, keeping annotators
blind to which perturbation produced a pair.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Union

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import HTMLResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .sampler import EvalItem

VALID_SCORES = {1, 2, 3, 4, 5, "idk"}


@dataclass(frozen=True)
class RatingRecord:
    item_id: str
    annotator_id: str
    score: Union[int, str]  # 1..5 or "idk"
    comment: str = ""
    timestamp: str = ""


def load_items(path) -> list[EvalItem]:
    items = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                raw = json.loads(line)
                items.append(EvalItem(**raw))
    return items


def read_ratings(path) -> list[RatingRecord]:
    """Materialized view of the append-only log: last write per key wins."""
    latest: dict[tuple[str, str], RatingRecord] = {}
    path = Path(path)
    if not path.exists():
        return []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                raw = json.loads(line)
                record = RatingRecord(
                    item_id=raw["item_id"], annotator_id=raw["annotator_id"],
                    score=raw["score"], comment=raw.get("comment", ""),
                    timestamp=raw.get("timestamp", ""))
                latest[(record.item_id, record.annotator_id)] = record
    return list(latest.values())


class RatingIn(BaseModel):
    item_id: str
    annotator_id: str
    score: Union[int, str]
    comment: str = ""


_FALLBACK_PAGE = """<!doctype html>
<html><head><meta charset="utf-8"><title>mundart ratings</title></head>
<body><p>The rating service is running. Build the annotation UI bundle and
pass it via --static to serve it here; the JSON API lives under /api/.</p>
</body></html>"""


def create_app(items: list[EvalItem], ratings_path, static_dir=None) -> FastAPI:
    app = FastAPI(title="mundart rating service")
    by_id = {item.item_id: item for item in items}
    ratings_path = Path(ratings_path)
    write_lock = threading.Lock()

    def materialized() -> dict[tuple[str, str], RatingRecord]:
        return {(r.item_id, r.annotator_id): r for r in read_ratings(ratings_path)}

    @app.get("/api/items")
    def get_items(annotator: str = Query(...)):
        current = materialized()
        out = []
        for item in items:
            record = current.get((item.item_id, annotator))
            out.append({
                "item_id": item.item_id,
                "sentence_a": item.sentence_a,
                "sentence_b": item.sentence_b,
                "rating": None if record is None else {
                    "score": record.score, "comment": record.comment,
                    "timestamp": record.timestamp,
                },
            })
        return {"items": out}

    @app.post("/api/ratings")
    def post_rating(rating: RatingIn):
        if rating.score not in VALID_SCORES:
            raise HTTPException(status_code=422,
                                detail=f"score must be 1-5 or 'idk', got {rating.score!r}")
        if rating.item_id not in by_id:
            raise HTTPException(status_code=404, detail=f"unknown item {rating.item_id!r}")
        record = RatingRecord(
            item_id=rating.item_id, annotator_id=rating.annotator_id,
            score=rating.score, comment=rating.comment,
            timestamp=datetime.now(timezone.utc).isoformat())
        line = json.dumps(vars(record), ensure_ascii=False)
        try:
            with write_lock:
                ratings_path.parent.mkdir(parents=True, exist_ok=True)
                with open(ratings_path, "a", encoding="utf-8") as handle:
                    handle.write(line + "\n")
        except OSError as err:
            raise HTTPException(status_code=500, detail=f"cannot persist rating: {err}")
        return {"stored": vars(record)}

    @app.get("/api/progress")
    def get_progress(annotator: str = Query(...)):
        current = materialized()
        rated = sum(1 for item in items if (item.item_id, annotator) in current)
        return {"rated": rated, "total": len(items)}

    @app.get("/api/export")
    def export():
        lines = [json.dumps(vars(r), ensure_ascii=False)
                 for r in sorted(materialized().values(),
                                 key=lambda r: (r.item_id, r.annotator_id))]
        return PlainTextResponse("\n".join(lines) + ("\n" if lines else ""),
                                 media_type="application/x-ndjson")

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    else:
        @app.get("/", response_class=HTMLResponse)
        def index():
            return _FALLBACK_PAGE

    return app
