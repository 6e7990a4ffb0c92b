"""Keyframe candidate sampling and grid image composition.

The selector never sees the raw video: it sees T' uniformly sampled
candidate frames concatenated into one grid image, stacked along the width
dimension for portrait frames and along the height dimension otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image

from .core import Frame, VideoClip

DEFAULT_CANDIDATE_TARGET = 8
DEFAULT_SIDE_CAP = 1024


@dataclass(frozen=True)
class SamplingPlan:
    """Stride and the candidate-slot -> original-frame mapping."""

    xi: int
    candidate_frame_indices: tuple[int, ...]

    @property
    def candidate_count(self) -> int:
        return len(self.candidate_frame_indices)

    def source_frame_for(self, candidate_index: int) -> int:
        """Resolve a 1-based candidate slot to its original frame index."""
        if not 1 <= candidate_index <= self.candidate_count:
            raise ValueError(
                f"candidate index {candidate_index} outside 1..{self.candidate_count}"
            )
        return self.candidate_frame_indices[candidate_index - 1]


@dataclass(frozen=True)
class CellRect:
    """Pixel rectangle of one candidate inside the composed grid image."""

    x: int
    y: int
    width: int
    height: int


@dataclass(frozen=True, eq=False)
class GridImage:
    """The merged candidate image sent to the selector."""

    image: np.ndarray  # (H', W', 3) uint8
    orientation: str  # "horizontal" | "vertical"
    cell_rects: tuple[CellRect, ...]
    side_cap: int

    @property
    def height(self) -> int:
        return self.image.shape[0]

    @property
    def width(self) -> int:
        return self.image.shape[1]


def compute_xi_offline(total_frames: int, target: int = DEFAULT_CANDIDATE_TARGET) -> int:
    """Stride that yields at most ``target`` candidates: floor((T-1)/target)+1."""
    if total_frames < 1:
        raise ValueError(f"total_frames must be >= 1, got {total_frames}")
    if target < 1:
        raise ValueError(f"target must be >= 1, got {target}")
    return (total_frames - 1) // target + 1


def sample_candidates(clip: VideoClip, xi: int) -> SamplingPlan:
    """Uniformly sample candidates at stride ``xi``, anchored at frame 1.

    Candidate i maps to original frame (i-1)*xi + 1; there are floor(T/xi)
    candidates (a single one when the clip is shorter than the stride).
    """
    if xi < 1:
        raise ValueError(f"xi must be >= 1, got {xi}")
    total = len(clip)
    count = max(1, total // xi)
    indices = tuple((i - 1) * xi + 1 for i in range(1, count + 1))
    return SamplingPlan(xi=xi, candidate_frame_indices=indices)


def compose_grid(plan: SamplingPlan, clip: VideoClip, side_cap: int = DEFAULT_SIDE_CAP) -> GridImage:
    """Concatenate the candidate frames and cap the long side at ``side_cap``.

    Portrait/square frames (W <= H) go left-to-right, landscape frames
    top-to-bottom, both in temporal order. The merged image is bilinearly
    downscaled when its long side exceeds the cap; it is never upscaled.
    """
    if side_cap < 1:
        raise ValueError(f"side_cap must be >= 1, got {side_cap}")
    if plan.candidate_count == 0:
        raise ValueError("sampling plan has no candidates")
    frames = [clip.frame(i) for i in plan.candidate_frame_indices]
    w, h = clip.width, clip.height
    n = len(frames)

    if w <= h:
        orientation = "horizontal"
        merged = np.concatenate([f.pixels for f in frames], axis=1)
    else:
        orientation = "vertical"
        merged = np.concatenate([f.pixels for f in frames], axis=0)

    full_h, full_w = merged.shape[0], merged.shape[1]
    long_side = max(full_h, full_w)
    scale = min(1.0, side_cap / long_side)
    if scale < 1.0:
        out_h = max(1, round(full_h * scale))
        out_w = max(1, round(full_w * scale))
        img = Image.fromarray(merged, mode="RGB").resize((out_w, out_h), Image.BILINEAR)
        merged = np.asarray(img)
    else:
        out_h, out_w = full_h, full_w

    # Cell boundaries from rounded cumulative offsets so the rectangles tile
    # the scaled image exactly, in temporal order along the concat axis.
    rects = []
    if orientation == "horizontal":
        bounds = [round(i * w * scale) for i in range(n + 1)]
        bounds[-1] = out_w
        rects = [CellRect(x=bounds[i], y=0, width=bounds[i + 1] - bounds[i], height=out_h) for i in range(n)]
    else:
        bounds = [round(i * h * scale) for i in range(n + 1)]
        bounds[-1] = out_h
        rects = [CellRect(x=0, y=bounds[i], width=out_w, height=bounds[i + 1] - bounds[i]) for i in range(n)]

    return GridImage(image=merged, orientation=orientation, cell_rects=tuple(rects), side_cap=side_cap)
