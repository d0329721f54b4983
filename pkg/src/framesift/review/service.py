"""HTTP facade over a ReviewSession.

All payloads are JSON. Frames are served as the original encoded image
bytes, never re-encoded, so the annotator sees exactly what a trainer would
consume. Nothing here writes to the source frames or the prediction file.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from ..errors import NothingToExport, RangeError
from ..ingest import BoundingBox
from .session import STATUSES, UNREVIEWED, InvalidTransition, ReviewSession

MEDIA_TYPES = {".png": "image/png", ".bmp": "image/bmp"}


class BoxIn(BaseModel):
    class_id: int
    x_min: float
    y_min: float
    x_max: float
    y_max: float


class BoxListIn(BaseModel):
    boxes: list[BoxIn]


def _box_out(class_id: int, box: BoundingBox, **extra) -> dict:
    return {
        "class_id": class_id,
        "x_min": box.x_min,
        "y_min": box.y_min,
        "x_max": box.x_max,
        "y_max": box.y_max,
        **extra,
    }


def create_app(
    session: ReviewSession,
    image_files: list[Path],
    export_dir: str | Path = "review_export",
    ui_dir: str | Path | None = None,
) -> FastAPI:
    """Wire a ReviewSession into the review HTTP API."""
    if len(image_files) != len(session.sequence):
        raise ValueError("one image file per sequence frame required")
    app = FastAPI(title="framesift review service")
    export_dir = Path(export_dir)

    def _known_frame(i: int) -> None:
        if not 0 <= i < len(session.sequence):
            raise HTTPException(404, f"frame {i} outside the sequence")

    def _plan_frame(i: int) -> None:
        _known_frame(i)
        if i not in session.plan.selected:
            raise HTTPException(404, f"frame {i} is not part of the plan")

    @app.get("/api/plan")
    def get_plan():
        return {
            "strategy": session.plan.strategy,
            "fraction": session.plan.fraction,
            "seed": session.plan.seed,
            "total_frames": session.plan.total_frames,
            "selected": list(session.plan.selected),
            "width": session.sequence.width,
            "height": session.sequence.height,
            "counts": session.counts(),
        }

    @app.get("/api/frames/{i}")
    def get_frame(i: int):
        _known_frame(i)
        file = image_files[i]
        media = MEDIA_TYPES.get(file.suffix.lower(), "application/octet-stream")
        return Response(content=file.read_bytes(), media_type=media)

    @app.get("/api/frames/{i}/boxes")
    def get_boxes(i: int):
        _plan_frame(i)
        corrections = session.corrections(i)
        return {
            "frame": i,
            "status": session.status(i),
            "width": session.sequence.width,
            "height": session.sequence.height,
            "predictions": [
                _box_out(p.class_id, p.box, confidence=p.confidence)
                for p in session.predictions.for_frame(i)
            ],
            "corrections": (
                None
                if corrections is None
                else [_box_out(a.class_id, a.box) for a in corrections]
            ),
            "effective": [
                _box_out(a.class_id, a.box, source=a.source)
                for a in session.effective_annotations(i)
            ],
        }

    @app.post("/api/frames/{i}/accept")
    def post_accept(i: int):
        _plan_frame(i)
        try:
            session.accept(i)
        except InvalidTransition as exc:
            raise HTTPException(409, str(exc))
        except OSError as exc:
            raise HTTPException(503, f"journal write failed: {exc}")
        return {"frame": i, "status": session.status(i), "counts": session.counts()}

    @app.post("/api/frames/{i}/boxes")
    def post_boxes(i: int, payload: BoxListIn):
        _plan_frame(i)
        try:
            boxes = [
                (b.class_id, BoundingBox(b.x_min, b.y_min, b.x_max, b.y_max))
                for b in payload.boxes
            ]
        except RangeError as exc:
            raise HTTPException(422, f"invalid box: {exc}")
        try:
            session.correct(i, boxes)
        except InvalidTransition as exc:
            raise HTTPException(409, str(exc))
        except OSError as exc:
            raise HTTPException(503, f"journal write failed: {exc}")
        return {"frame": i, "status": session.status(i), "counts": session.counts()}

    @app.get("/api/next")
    def get_next(after: int = -1, status: str = UNREVIEWED):
        if status not in STATUSES:
            raise HTTPException(422, f"unknown status {status!r}")
        return {"frame": session.next_frame(after=after, status=status)}

    @app.post("/api/export")
    def post_export():
        try:
            manifest = session.export_labels(export_dir)
        except NothingToExport as exc:
            raise HTTPException(409, str(exc))
        except OSError as exc:
            raise HTTPException(503, f"export failed: {exc}")
        return JSONResponse({"out": str(export_dir), "manifest": manifest})

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
