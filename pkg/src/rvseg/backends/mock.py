"""Deterministic mock backends.

Mocks are pure functions of (fixture, inputs): identical runs produce
bit-identical outputs, which is what makes every pipeline mechanic testable
without any model. The segmenter understands a tiny rectangle grammar
(``rect:x,y,w,h`` with ``W``/``H`` standing for the frame size) and the
propagator moves the seeded mask with a constant per-scenario velocity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

import numpy as np

from ..core import BinaryMask, Frame, VideoClip
from ..errors import BackendError
from ..sampling import GridImage
from .base import (
    Backends,
    FrameSource,
    ImageSegmenter,
    KeyframeSelector,
    PropagationSession,
    VideoPropagator,
    check_run_args,
    check_seed_args,
)

YES_TEXT = (
    "The image contains the target object. "
    "Therefore, the justification of using this image as keyframe is Yes."
)
NO_TEXT = (
    "The image contains no object matching the query. "
    "Therefore, the justification of using this image as keyframe is No."
)


def parse_rect_spec(description: str, frame_width: int, frame_height: int) -> tuple[int, int, int, int] | None:
    """Parse ``rect:x,y,w,h``; components are ints or the literals W/H."""
    text = description.strip()
    if not text.lower().startswith("rect:"):
        return None
    parts = [p.strip() for p in text[5:].split(",")]
    if len(parts) != 4:
        return None
    values = []
    for part in parts:
        if part in ("W", "w"):
            values.append(frame_width)
        elif part in ("H", "h"):
            values.append(frame_height)
        else:
            try:
                values.append(int(part))
            except ValueError:
                return None
    return values[0], values[1], values[2], values[3]


def rect_mask(width: int, height: int, rect: tuple[int, int, int, int]) -> BinaryMask:
    """Rectangle (x, y, w, h) rasterized and clipped to the frame."""
    x, y, w, h = rect
    bits = np.zeros((height, width), dtype=bool)
    x0, y0 = max(0, x), max(0, y)
    x1, y1 = min(width, x + w), min(height, y + h)
    if x1 > x0 and y1 > y0:
        bits[y0:y1, x0:x1] = True
    return BinaryMask(bits=bits)


def translate_mask(mask: BinaryMask, dx: int, dy: int) -> BinaryMask:
    """Shift a mask by (dx, dy) pixels, clipping at the borders."""
    h, w = mask.bits.shape
    out = np.zeros_like(mask.bits)
    src_x0, src_x1 = max(0, -dx), min(w, w - dx)
    src_y0, src_y1 = max(0, -dy), min(h, h - dy)
    if src_x1 > src_x0 and src_y1 > src_y0:
        out[src_y0 + dy : src_y1 + dy, src_x0 + dx : src_x1 + dx] = mask.bits[
            src_y0:src_y1, src_x0:src_x1
        ]
    return BinaryMask(bits=out)


class MockSelector(KeyframeSelector):
    """Canned transcripts for the offline path, scripted or rule-based
    judgments for the online path."""

    def __init__(
        self,
        transcript: str | None = None,
        judgments: Mapping[int, str] | None = None,
        min_foreground_pixels: int | None = None,
    ):
        self.transcript = transcript
        self.judgments = dict(judgments) if judgments else None
        self.min_foreground_pixels = min_foreground_pixels

    def select_keyframes(self, grid: GridImage, prompt: str) -> str:
        if self.transcript is None:
            raise BackendError("mock selector has no transcript fixture")
        return self.transcript

    def judge_frame(self, frame: Frame, prompt: str) -> str:
        if self.judgments is not None:
            return self.judgments.get(frame.index, NO_TEXT)
        if self.min_foreground_pixels is not None:
            lit = int((frame.pixels.max(axis=2) > 0).sum())
            return YES_TEXT if lit >= self.min_foreground_pixels else NO_TEXT
        return NO_TEXT


class FailingSelector(KeyframeSelector):
    """Always raises; exercises the backend-failure policies."""

    def select_keyframes(self, grid: GridImage, prompt: str) -> str:
        raise BackendError("selector unavailable")

    def judge_frame(self, frame: Frame, prompt: str) -> str:
        raise BackendError("selector unavailable")


class MockSegmenter(ImageSegmenter):
    """Rectangle-grammar segmenter.

    Resolution order: an explicit per-frame override, then the ``rect:``
    grammar on the description, then (when ``threshold`` is set) the frame's
    own lit pixels, then an empty mask.
    """

    def __init__(self, by_frame: Mapping[int, str] | None = None, threshold: int | None = None):
        self.by_frame = dict(by_frame) if by_frame else {}
        self.threshold = threshold

    def segment(self, frame: Frame, description: str) -> BinaryMask:
        spec = self.by_frame.get(frame.index, description)
        rect = parse_rect_spec(spec, frame.width, frame.height)
        if rect is not None:
            return rect_mask(frame.width, frame.height, rect)
        if self.threshold is not None:
            return BinaryMask(bits=frame.pixels.max(axis=2) >= self.threshold)
        return BinaryMask.zeros(frame.width, frame.height)


class FailingSegmenter(ImageSegmenter):
    def segment(self, frame: Frame, description: str) -> BinaryMask:
        raise BackendError("segmenter unavailable")


class MockPropagator(VideoPropagator):
    """Linear-motion propagator: the seed travels at a constant velocity."""

    def __init__(self, velocity: tuple[int, int] = (0, 0)):
        self.velocity = (int(velocity[0]), int(velocity[1]))

    def open(self, source: FrameSource) -> PropagationSession:
        return PropagationSession(source=source)

    def seed(self, session: PropagationSession, frame_index: int, mask: BinaryMask) -> None:
        check_seed_args(session, frame_index, mask)
        session.anchor_index = frame_index
        session.anchor_mask = mask

    def run(self, session: PropagationSession, start: int, stop: int) -> list[BinaryMask]:
        check_run_args(session, start, stop)
        vx, vy = self.velocity
        anchor = session.anchor_index
        masks = []
        for t in range(start, stop + 1):
            steps = t - anchor
            masks.append(translate_mask(session.anchor_mask, vx * steps, vy * steps))
        return masks


@dataclass(frozen=True)
class ScenarioObject:
    """One synthetic object: its rectangle at the keyframe it is defined on."""

    rect: tuple[int, int, int, int]
    frame_index: int  # original frame the rect is anchored at
    description: str
    fill: tuple[int, int, int]
    appears_at: int = 1  # first frame the object is drawn on


@dataclass(frozen=True)
class MockScenario:
    """A fully scripted synthetic scene: clip shape, motion, and transcript."""

    name: str
    mode: str  # "offline" | "online"
    query: str
    frame_count: int
    width: int
    height: int
    velocity: tuple[int, int]
    objects: tuple[ScenarioObject, ...]
    transcript: str
    judgments: dict[int, str] = field(default_factory=dict)

    def object_rect_at(self, obj: ScenarioObject, t: int) -> tuple[int, int, int, int]:
        dx = self.velocity[0] * (t - obj.frame_index)
        dy = self.velocity[1] * (t - obj.frame_index)
        x, y, w, h = obj.rect
        return (x + dx, y + dy, w, h)

    def build_clip(self) -> VideoClip:
        """Render the scripted objects onto blank frames."""
        frames = []
        for t in range(1, self.frame_count + 1):
            pixels = np.zeros((self.height, self.width, 3), dtype=np.uint8)
            for obj in self.objects:
                if t < obj.appears_at:
                    continue
                x, y, w, h = self.object_rect_at(obj, t)
                x0, y0 = max(0, x), max(0, y)
                x1, y1 = min(self.width, x + w), min(self.height, y + h)
                if x1 > x0 and y1 > y0:
                    pixels[y0:y1, x0:x1] = obj.fill
            frames.append(Frame(index=t, pixels=pixels))
        return VideoClip(frames=tuple(frames))

    def build_backends(self) -> Backends:
        segmenter_overrides = {
            obj.frame_index: obj.description for obj in self.objects if obj.appears_at > 1
        }
        return Backends(
            selector=MockSelector(
                transcript=self.transcript,
                judgments=self.judgments or None,
                min_foreground_pixels=1 if not self.judgments else None,
            ),
            segmenter=MockSegmenter(by_frame=segmenter_overrides or None, threshold=1),
            propagator=MockPropagator(velocity=self.velocity),
        )


def _scenario_from_obj(name: str, obj: dict) -> MockScenario:
    clip = obj["clip"]
    objects = tuple(
        ScenarioObject(
            rect=tuple(entry["rect"]),
            frame_index=int(entry["frame_index"]),
            description=entry["description"],
            fill=tuple(entry.get("fill", (255, 255, 255))),
            appears_at=int(entry.get("appears_at", 1)),
        )
        for entry in obj.get("objects", [])
    )
    return MockScenario(
        name=name,
        mode=obj.get("mode", "offline"),
        query=obj.get("query", "find the scripted objects"),
        frame_count=int(clip["frames"]),
        width=int(clip["width"]),
        height=int(clip["height"]),
        velocity=tuple(obj.get("velocity", (0, 0))),
        objects=objects,
        transcript=obj.get("transcript", ""),
        judgments={int(k): v for k, v in obj.get("judgments", {}).items()},
    )


def load_mock_scenarios(path: str | Path | None = None) -> dict[str, MockScenario]:
    """Scenario fixtures from a JSON file, or the built-in set."""
    if path is None:
        text = resources.files("rvseg").joinpath("fixtures", "mock_scenarios.json").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    data = json.loads(text)
    return {name: _scenario_from_obj(name, obj) for name, obj in data.items()}
