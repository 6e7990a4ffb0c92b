"""FastAPI app exposing the segmenter/propagator wire protocol.

Endpoints:
  GET  /healthz                      -> {"mode": "mock"|"real"}
  POST /segment                      {image, text} -> {mask}
  POST /sessions                     {frames} -> {session_id}
  POST /sessions/{id}/frames         {frames} -> {frame_count}   (append)
  POST /sessions/{id}/seed           {frame_index, mask}
  POST /sessions/{id}/run            {from, to} -> {masks}
  DELETE /sessions/{id}

Images travel as base64 PNG, masks as the RLE JSON record. Error mapping:
400 schema/payload violation, 404 unknown session, 409 run before seed,
500 model failure.
"""

from __future__ import annotations

import base64
import importlib
import io
import logging
from typing import Protocol

import numpy as np
import uvicorn
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from PIL import Image, UnidentifiedImageError
from pydantic import BaseModel, Field

from . import rle
from .config import ServerConfig, config_from_env
from .mock_models import MockPropagatorModel, MockSegmenterModel
from .sessions import Session, SessionStore

logger = logging.getLogger(__name__)


class SegmenterModel(Protocol):
    def segment(self, image: np.ndarray, text: str) -> np.ndarray: ...


class PropagatorModel(Protocol):
    def propagate(
        self, frames: list[np.ndarray], seed_index: int, seed_bits: np.ndarray,
        start: int, stop: int,
    ) -> list[np.ndarray]: ...


class RleModel(BaseModel):
    w: int
    h: int
    runs: list[int]


class SegmentRequest(BaseModel):
    image: str
    text: str


class FramesRequest(BaseModel):
    frames: list[str]


class SeedRequest(BaseModel):
    frame_index: int
    mask: RleModel


class RunRequest(BaseModel):
    from_frame: int = Field(alias="from")
    to: int
    model_config = {"populate_by_name": True}


class ApiError(Exception):
    def __init__(self, status: int, detail: str):
        self.status = status
        self.detail = detail


def _decode_image(b64: str) -> np.ndarray:
    try:
        raw = base64.b64decode(b64, validate=True)
        with Image.open(io.BytesIO(raw)) as img:
            return np.array(img.convert("RGB"))
    except (ValueError, UnidentifiedImageError, OSError) as exc:
        raise ApiError(400, f"invalid image payload: {exc}") from exc


def _decode_mask(record: RleModel) -> np.ndarray:
    try:
        return rle.decode(record.model_dump())
    except rle.RleError as exc:
        raise ApiError(400, str(exc)) from exc


def _load_factory(spec: str):
    module_name, _, attr = spec.partition(":")
    if not module_name or not attr:
        raise ValueError(f"adapter spec must look like 'module:factory', got {spec!r}")
    return getattr(importlib.import_module(module_name), attr)()


def build_models(config: ServerConfig) -> tuple[SegmenterModel, PropagatorModel]:
    if config.mode == "mock":
        return MockSegmenterModel(), MockPropagatorModel(velocity=config.mock_velocity)
    if not config.real_segmenter or not config.real_propagator:
        raise ValueError(
            "real mode needs SEGSERVE_REAL_SEGMENTER and SEGSERVE_REAL_PROPAGATOR "
            "adapter factories ('module:attr')"
        )
    return _load_factory(config.real_segmenter), _load_factory(config.real_propagator)


def create_app(config: ServerConfig | None = None) -> FastAPI:
    config = config or config_from_env()
    segmenter, propagator = build_models(config)
    store = SessionStore(ttl_seconds=config.session_ttl_seconds)
    app = FastAPI(title="segserve", version="0.1.0")

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.exception_handler(ApiError)
    async def on_api_error(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content={"detail": exc.detail})

    def _get_session(session_id: str) -> Session:
        session = store.get(session_id)
        if session is None:
            raise ApiError(404, f"unknown session {session_id}")
        return session

    @app.get("/healthz")
    def healthz():
        return {"mode": config.mode, "sessions": len(store)}

    @app.post("/segment")
    def segment(body: SegmentRequest):
        image = _decode_image(body.image)
        try:
            bits = segmenter.segment(image, body.text)
        except Exception as exc:  # adapter failure surfaces as 500
            logger.exception("segmenter failed")
            raise ApiError(500, f"segmenter failed: {exc}") from exc
        if bits.shape != image.shape[:2]:
            raise ApiError(500, "segmenter returned a mask with mismatched dimensions")
        return {"mask": rle.encode(bits)}

    @app.post("/sessions")
    def create_session(body: FramesRequest):
        if not body.frames:
            raise ApiError(400, "a session needs at least one frame")
        frames = [_decode_image(b64) for b64 in body.frames]
        if any(f.shape != frames[0].shape for f in frames):
            raise ApiError(400, "all frames must share dimensions")
        session = store.create(frames)
        return {"session_id": session.session_id, "frame_count": len(frames)}

    @app.post("/sessions/{session_id}/frames")
    def append_frames(session_id: str, body: FramesRequest):
        session = _get_session(session_id)
        with session.lock:
            decoded = [_decode_image(b64) for b64 in body.frames]
            if any(f.shape != session.frames[0].shape for f in decoded):
                raise ApiError(400, "appended frames must match the session's dimensions")
            session.frames.extend(decoded)
            return {"frame_count": len(session.frames)}

    @app.post("/sessions/{session_id}/seed")
    def seed(session_id: str, body: SeedRequest):
        session = _get_session(session_id)
        with session.lock:
            if not 1 <= body.frame_index <= len(session.frames):
                raise ApiError(
                    400, f"frame_index {body.frame_index} outside 1..{len(session.frames)}"
                )
            bits = _decode_mask(body.mask)
            if bits.shape != (session.height, session.width):
                raise ApiError(400, "seed mask dimensions do not match the session frames")
            session.seed_index = body.frame_index
            session.seed_bits = bits
            return {"seeded_at": body.frame_index}

    @app.post("/sessions/{session_id}/run")
    def run(session_id: str, body: RunRequest):
        session = _get_session(session_id)
        with session.lock:
            if session.seed_index is None:
                raise ApiError(409, "run before seed")
            if not 1 <= body.from_frame <= body.to <= len(session.frames):
                raise ApiError(
                    400,
                    f"range {body.from_frame}..{body.to} invalid for {len(session.frames)} frames",
                )
            try:
                masks = propagator.propagate(
                    session.frames, session.seed_index, session.seed_bits,
                    body.from_frame, body.to,
                )
            except Exception as exc:
                logger.exception("propagator failed")
                raise ApiError(500, f"propagator failed: {exc}") from exc
            return {"masks": [rle.encode(m) for m in masks]}

    @app.delete("/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str):
        if not store.delete(session_id):
            raise ApiError(404, f"unknown session {session_id}")

    return app


def main() -> int:
    import argparse

    parser = argparse.ArgumentParser(description="segmenter/propagator serving shim")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=9090)
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO)
    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
