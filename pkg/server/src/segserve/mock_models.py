"""Mock segmenter and propagator.

These mirror the pipeline-side mock semantics exactly (the conformance
goldens pin them byte for byte): the segmenter rasterizes a ``rect:x,y,w,h``
description (``W``/``H`` stand for the image size, anything else yields an
empty mask) and the propagator translates the seeded mask with a constant
velocity, clipping at the borders.
"""

from __future__ import annotations

import numpy as np


def parse_rect_spec(text: str, width: int, height: int) -> tuple[int, int, int, int] | None:
    spec = text.strip()
    if not spec.lower().startswith("rect:"):
        return None
    parts = [p.strip() for p in spec[5:].split(",")]
    if len(parts) != 4:
        return None
    values = []
    for part in parts:
        if part in ("W", "w"):
            values.append(width)
        elif part in ("H", "h"):
            values.append(height)
        else:
            try:
                values.append(int(part))
            except ValueError:
                return None
    return values[0], values[1], values[2], values[3]


def rect_bits(width: int, height: int, rect: tuple[int, int, int, int]) -> np.ndarray:
    x, y, w, h = rect
    bits = np.zeros((height, width), dtype=bool)
    x0, y0 = max(0, x), max(0, y)
    x1, y1 = min(width, x + w), min(height, y + h)
    if x1 > x0 and y1 > y0:
        bits[y0:y1, x0:x1] = True
    return bits


def translate_bits(bits: np.ndarray, dx: int, dy: int) -> np.ndarray:
    h, w = bits.shape
    out = np.zeros_like(bits)
    src_x0, src_x1 = max(0, -dx), min(w, w - dx)
    src_y0, src_y1 = max(0, -dy), min(h, h - dy)
    if src_x1 > src_x0 and src_y1 > src_y0:
        out[src_y0 + dy : src_y1 + dy, src_x0 + dx : src_x1 + dx] = bits[src_y0:src_y1, src_x0:src_x1]
    return out


class MockSegmenterModel:
    def segment(self, image: np.ndarray, text: str) -> np.ndarray:
        height, width = image.shape[0], image.shape[1]
        rect = parse_rect_spec(text, width, height)
        if rect is None:
            return np.zeros((height, width), dtype=bool)
        return rect_bits(width, height, rect)


class MockPropagatorModel:
    def __init__(self, velocity: tuple[int, int] = (1, 0)):
        self.velocity = (int(velocity[0]), int(velocity[1]))

    def propagate(
        self,
        frames: list[np.ndarray],
        seed_index: int,
        seed_bits: np.ndarray,
        start: int,
        stop: int,
    ) -> list[np.ndarray]:
        vx, vy = self.velocity
        return [
            translate_bits(seed_bits, vx * (t - seed_index), vy * (t - seed_index))
            for t in range(start, stop + 1)
        ]
