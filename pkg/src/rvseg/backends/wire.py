"""HTTP clients for real model services.

The selector speaks the OpenAI-compatible chat-completions protocol (one
user message carrying the prompt text plus the image as a base64 data URL),
which covers both hosted GPT-class endpoints and local open-model servers.
The segmenter and propagator speak the mask-serving protocol, with masks
travelling as the RLE JSON record.

Requests are retried with exponential backoff (never on 4xx) and each
attempt resends the identical body, so retries are idempotent and a failed
call leaves no pipeline state behind.
"""

from __future__ import annotations

import base64
import io
import logging
import time
from typing import Any

import numpy as np
import requests
from PIL import Image

from ..core import BinaryMask, Frame, RleRecord, decode_mask_rle, encode_mask_rle
from ..errors import BackendError, RleFormatError
from ..sampling import GridImage
from .base import (
    FrameSource,
    ImageSegmenter,
    KeyframeSelector,
    PropagationSession,
    SelectorConfig,
    VideoPropagator,
    check_run_args,
    check_seed_args,
)

logger = logging.getLogger(__name__)


def png_base64(pixels: np.ndarray) -> str:
    buf = io.BytesIO()
    Image.fromarray(pixels, mode="RGB").save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def _post_with_retries(
    url: str,
    body: dict,
    *,
    headers: dict | None = None,
    timeout: float,
    max_attempts: int,
    backoff_base: float,
) -> Any:
    last_error: Exception | None = None
    for attempt in range(1, max_attempts + 1):
        try:
            resp = requests.post(url, json=body, headers=headers or {}, timeout=timeout)
        except requests.RequestException as exc:
            last_error = exc
        else:
            if 200 <= resp.status_code < 300:
                try:
                    return resp.json()
                except ValueError as exc:
                    raise BackendError(f"{url}: non-JSON response body") from exc
            if 400 <= resp.status_code < 500:
                raise BackendError(
                    f"{url}: HTTP {resp.status_code}: {resp.text[:500]}", status=resp.status_code
                )
            last_error = BackendError(
                f"{url}: HTTP {resp.status_code}: {resp.text[:500]}", status=resp.status_code
            )
        if attempt < max_attempts:
            delay = backoff_base * (2 ** (attempt - 1))
            logger.warning("request to %s failed (attempt %d/%d), retrying in %.1fs",
                           url, attempt, max_attempts, delay)
            time.sleep(delay)
    raise BackendError(f"{url}: request failed after {max_attempts} attempts: {last_error}")


class OpenAiSelector(KeyframeSelector):
    """Chat-completions client used for both the offline grid call and the
    online per-frame judgment."""

    def __init__(self, config: SelectorConfig):
        if not config.endpoint:
            raise ValueError("selector endpoint is not configured")
        self.config = config

    def _chat(self, image_pixels: np.ndarray, prompt: str) -> str:
        cfg = self.config
        body: dict[str, Any] = {
            "model": cfg.model,
            "temperature": cfg.temperature,
            "max_tokens": cfg.max_output_tokens,
            "messages": [
                {
                    "role": "user",
                    "content": [
                        {"type": "text", "text": prompt},
                        {
                            "type": "image_url",
                            "image_url": {"url": "data:image/png;base64," + png_base64(image_pixels)},
                        },
                    ],
                }
            ],
        }
        if cfg.seed is not None:
            body["seed"] = cfg.seed
        headers = {}
        if cfg.api_key:
            headers["Authorization"] = f"Bearer {cfg.api_key}"
        url = cfg.endpoint.rstrip("/") + "/chat/completions"
        data = _post_with_retries(
            url,
            body,
            headers=headers,
            timeout=cfg.timeout,
            max_attempts=cfg.max_attempts,
            backoff_base=cfg.backoff_base,
        )
        try:
            text = data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise BackendError(f"{url}: malformed chat response: {exc}") from exc
        if not text:
            raise BackendError(f"{url}: empty selector response")
        return text

    def select_keyframes(self, grid: GridImage, prompt: str) -> str:
        return self._chat(grid.image, prompt)

    def judge_frame(self, frame: Frame, prompt: str) -> str:
        return self._chat(frame.pixels, prompt)


class HttpSegmenter(ImageSegmenter):
    """Client for the serving shim's ``POST /segment`` endpoint."""

    def __init__(self, endpoint: str, timeout: float = 120.0, max_attempts: int = 3,
                 backoff_base: float = 1.0):
        if not endpoint:
            raise ValueError("segmenter endpoint is not configured")
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self.max_attempts = max_attempts
        self.backoff_base = backoff_base

    def segment(self, frame: Frame, description: str) -> BinaryMask:
        if not description:
            raise ValueError("description must be non-empty")
        data = _post_with_retries(
            self.endpoint + "/segment",
            {"image": png_base64(frame.pixels), "text": description},
            timeout=self.timeout,
            max_attempts=self.max_attempts,
            backoff_base=self.backoff_base,
        )
        try:
            mask = decode_mask_rle(RleRecord.from_json_obj(data["mask"]))
        except (KeyError, TypeError, RleFormatError) as exc:
            raise BackendError(f"segment: malformed mask in response: {exc}") from exc
        if (mask.width, mask.height) != (frame.width, frame.height):
            raise BackendError(
                f"segment: mask {mask.width}x{mask.height} does not match "
                f"frame {frame.width}x{frame.height}"
            )
        return mask


class HttpPropagator(VideoPropagator):
    """Client for the serving shim's session endpoints.

    Frames known at open time are uploaded with the create call; when the
    session's source has grown since (online streaming), the missing suffix
    is appended before the next run.
    """

    def __init__(self, endpoint: str, timeout: float = 300.0, max_attempts: int = 3,
                 backoff_base: float = 1.0):
        if not endpoint:
            raise ValueError("propagator endpoint is not configured")
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self.max_attempts = max_attempts
        self.backoff_base = backoff_base
        self._uploaded: dict[str, int] = {}
        self._remote_ids: dict[str, str] = {}

    def _post(self, path: str, body: dict) -> Any:
        return _post_with_retries(
            self.endpoint + path,
            body,
            timeout=self.timeout,
            max_attempts=self.max_attempts,
            backoff_base=self.backoff_base,
        )

    def open(self, source: FrameSource) -> PropagationSession:
        frames = [png_base64(source.frame(i).pixels) for i in range(1, len(source) + 1)]
        data = self._post("/sessions", {"frames": frames})
        try:
            remote_id = str(data["session_id"])
        except (KeyError, TypeError) as exc:
            raise BackendError(f"sessions: malformed create response: {exc}") from exc
        session = PropagationSession(source=source)
        self._remote_ids[session.session_id] = remote_id
        self._uploaded[session.session_id] = len(frames)
        return session

    def _sync_frames(self, session: PropagationSession) -> None:
        have = self._uploaded[session.session_id]
        total = len(session.source)
        if total > have:
            frames = [png_base64(session.source.frame(i).pixels) for i in range(have + 1, total + 1)]
            self._post(f"/sessions/{self._remote_ids[session.session_id]}/frames", {"frames": frames})
            self._uploaded[session.session_id] = total

    def seed(self, session: PropagationSession, frame_index: int, mask: BinaryMask) -> None:
        check_seed_args(session, frame_index, mask)
        self._sync_frames(session)
        self._post(
            f"/sessions/{self._remote_ids[session.session_id]}/seed",
            {"frame_index": frame_index, "mask": encode_mask_rle(mask).to_json_obj()},
        )
        session.anchor_index = frame_index
        session.anchor_mask = mask

    def run(self, session: PropagationSession, start: int, stop: int) -> list[BinaryMask]:
        check_run_args(session, start, stop)
        self._sync_frames(session)
        data = self._post(
            f"/sessions/{self._remote_ids[session.session_id]}/run",
            {"from": start, "to": stop},
        )
        try:
            records = [RleRecord.from_json_obj(obj) for obj in data["masks"]]
        except (KeyError, TypeError, RleFormatError) as exc:
            raise BackendError(f"run: malformed masks in response: {exc}") from exc
        if len(records) != stop - start + 1:
            raise BackendError(f"run: expected {stop - start + 1} masks, got {len(records)}")
        return [decode_mask_rle(rec) for rec in records]

    def close(self, session: PropagationSession) -> None:
        remote_id = self._remote_ids.pop(session.session_id, None)
        self._uploaded.pop(session.session_id, None)
        session.closed = True
        if remote_id is None:
            return
        try:
            requests.delete(f"{self.endpoint}/sessions/{remote_id}", timeout=self.timeout)
        except requests.RequestException:
            logger.warning("failed to delete remote session %s; server TTL will reap it", remote_id)
