"""HTTP surface of the rating service.

Endpoints:
    GET  /config                                   service parameters
    POST /session                                  open (or resume) a session
    GET  /session/{evaluator}/{stage}/next         next unrated item or completion
    POST /session/{evaluator}/{stage}/rating       submit one triple score
    GET  /progress/{evaluator}                     rated/total counts per stage

Images travel base64-embedded in JSON payloads, served at stored resolution.
Submission, cursor advancement, and persistence happen under one lock, so a
second concurrent submission for the same session item is rejected.
"""

from __future__ import annotations

import base64
import mimetypes
import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from ..corpus import ingest
from ..subjective import RatingEvent, RatingValidationError, now_iso, score_on_grid
from .config import ServiceConfig
from .sessions import SessionManager, StageRangeError, UnknownEvaluatorError
from .store import DuplicateRatingError, RatingStore


class OpenSessionRequest(BaseModel):
    evaluator_id: str
    stage: int


class RatingRequest(BaseModel):
    image_id: str
    quality: float
    authenticity: float
    correspondence: float


def _image_payload(path: Path) -> dict:
    content_type = mimetypes.guess_type(str(path))[0] or "application/octet-stream"
    return {
        "content_type": content_type,
        "base64": base64.b64encode(path.read_bytes()).decode("ascii"),
    }


def create_app(
    config: ServiceConfig,
    validate_images: bool = True,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    corpus = ingest(config.corpus, validate_images=validate_images)
    store = RatingStore(config.store)
    manager = SessionManager(
        corpus, store, config.stage_count, config.seed, config.evaluators
    )
    submit_lock = threading.Lock()

    app = FastAPI(title="aigiqa rating service")
    app.state.store = store
    app.state.manager = manager

    def open_or_400(evaluator_id: str, stage: int):
        try:
            return manager.open_session(evaluator_id, stage)
        except UnknownEvaluatorError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except StageRangeError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.get("/config")
    def get_config():
        return {
            "stage_count": config.stage_count,
            "corpus_size": len(corpus),
            "seed": config.seed,
            "score_min": 0.0,
            "score_max": 5.0,
            "score_step": 0.01,
        }

    @app.post("/session")
    def open_session(req: OpenSessionRequest):
        session = open_or_400(req.evaluator_id, req.stage)
        return {
            "evaluator_id": session.evaluator_id,
            "stage": session.stage,
            "order": list(session.order),
            "cursor": session.cursor,
            "total": len(session.order),
        }

    @app.get("/session/{evaluator_id}/{stage}/next")
    def next_item(evaluator_id: str, stage: int):
        session = open_or_400(evaluator_id, stage)
        if session.complete:
            return {
                "complete": True,
                "stage": stage,
                "rated": session.cursor,
                "total": len(session.order),
            }
        record = corpus[session.order[session.cursor]]
        payload = {
            "complete": False,
            "image_id": record.image_id,
            "index": session.cursor,
            "total": len(session.order),
            "subset": record.subset,
            "text_prompt": record.text_prompt,
            "image": _image_payload(record.image_path),
            "reference": None,
        }
        if record.image_prompt_path is not None:
            payload["reference"] = _image_payload(record.image_prompt_path)
        return payload

    @app.post("/session/{evaluator_id}/{stage}/rating")
    def submit_rating(evaluator_id: str, stage: int, req: RatingRequest):
        for dim in ("quality", "authenticity", "correspondence"):
            value = getattr(req, dim)
            if not score_on_grid(value):
                raise HTTPException(
                    status_code=400,
                    detail=f"{dim} score {value} is off-grid: scores lie in [0, 5] in steps of 0.01",
                )
        if req.image_id not in corpus.by_id:
            raise HTTPException(status_code=404, detail=f"unknown image {req.image_id!r}")
        with submit_lock:
            session = open_or_400(evaluator_id, stage)
            if store.has(evaluator_id, req.image_id):
                raise HTTPException(
                    status_code=409,
                    detail=f"evaluator {evaluator_id!r} already rated image {req.image_id!r}",
                )
            if session.complete:
                raise HTTPException(status_code=400, detail="stage already complete")
            expected = session.order[session.cursor]
            if req.image_id != expected:
                raise HTTPException(
                    status_code=400,
                    detail=f"out-of-order submission: expected {expected!r}, got {req.image_id!r}",
                )
            try:
                event = RatingEvent(
                    image_id=req.image_id,
                    evaluator_id=evaluator_id,
                    stage=stage,
                    quality=req.quality,
                    authenticity=req.authenticity,
                    correspondence=req.correspondence,
                    timestamp=now_iso(),
                )
                store.append(event)
            except (RatingValidationError, DuplicateRatingError) as exc:
                raise HTTPException(status_code=400, detail=str(exc))
            cursor = session.cursor + 1
        return {
            "status": "ok",
            "image_id": req.image_id,
            "cursor": cursor,
            "total": len(session.order),
            "complete": cursor >= len(session.order),
        }

    @app.get("/progress/{evaluator_id}")
    def progress(evaluator_id: str):
        try:
            return {"evaluator_id": evaluator_id, "stages": manager.progress(evaluator_id)}
        except UnknownEvaluatorError as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
