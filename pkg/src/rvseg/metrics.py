"""Region similarity (J), contour accuracy (F) and their average.

J is plain intersection-over-union. F is the F-measure of boundary-pixel
precision/recall within a pixel tolerance, with 1-pixel boundaries under
4-connectivity and the image border counted as background. Frames where
both masks are empty score 1.0 for both metrics (the prediction is
vacuously correct); an empty mask against a non-empty one scores 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import ndimage

from .core import BinaryMask, MaskSequence


def _check_same_shape(pred: BinaryMask, gt: BinaryMask) -> None:
    if pred.bits.shape != gt.bits.shape:
        raise ValueError(
            f"prediction {pred.width}x{pred.height} does not match "
            f"ground truth {gt.width}x{gt.height}"
        )


def region_similarity_j(pred: BinaryMask, gt: BinaryMask) -> float:
    """Intersection over union; 1.0 when both masks are empty."""
    _check_same_shape(pred, gt)
    union = int((pred.bits | gt.bits).sum())
    if union == 0:
        return 1.0
    inter = int((pred.bits & gt.bits).sum())
    return inter / union


def boundary_pixels(mask: BinaryMask) -> np.ndarray:
    """Foreground pixels with at least one background 4-neighbor; the image
    border counts as background."""
    bits = mask.bits
    padded = np.pad(bits, 1, mode="constant", constant_values=False)
    interior = (
        padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
    )
    return bits & ~interior


def default_boundary_tolerance(height: int, width: int) -> int:
    """Ceil of 0.008 x image diagonal, the common benchmark convention."""
    return math.ceil(0.008 * math.hypot(height, width))


def _disk(radius: int) -> np.ndarray:
    span = np.arange(-radius, radius + 1)
    dy, dx = np.meshgrid(span, span, indexing="ij")
    return dy * dy + dx * dx <= radius * radius


def boundary_f(pred: BinaryMask, gt: BinaryMask, tolerance: int | None = None) -> float:
    """Boundary precision/recall F-measure within ``tolerance`` pixels.

    Implemented by dilating each boundary with an exact Euclidean disk, so a
    boundary pixel matches iff its squared distance to the other boundary is
    <= tolerance^2. Tolerance 0 degenerates to exact boundary overlap.
    """
    _check_same_shape(pred, gt)
    if tolerance is None:
        tolerance = default_boundary_tolerance(pred.height, pred.width)
    if tolerance < 0:
        raise ValueError(f"tolerance must be >= 0, got {tolerance}")

    pred_b = boundary_pixels(pred)
    gt_b = boundary_pixels(gt)
    pred_n = int(pred_b.sum())
    gt_n = int(gt_b.sum())
    if pred_n == 0 and gt_n == 0:
        return 1.0
    if pred_n == 0 or gt_n == 0:
        return 0.0

    disk = _disk(tolerance)
    gt_reach = ndimage.binary_dilation(gt_b, structure=disk)
    pred_reach = ndimage.binary_dilation(pred_b, structure=disk)
    precision = int((pred_b & gt_reach).sum()) / pred_n
    recall = int((gt_b & pred_reach).sum()) / gt_n
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class SequenceRecord:
    """Per-sequence metric summary; J&F is always the plain average."""

    sequence_id: str
    video: str
    j_mean: float
    f_mean: float

    @property
    def jf(self) -> float:
        return (self.j_mean + self.f_mean) / 2

    def to_json_obj(self) -> dict:
        return {
            "sequence_id": self.sequence_id,
            "video": self.video,
            "J": self.j_mean,
            "F": self.f_mean,
            "J&F": self.jf,
        }


def evaluate_sequence(
    pred: MaskSequence,
    gt_masks: Sequence[BinaryMask],
    sequence_id: str = "",
    video: str = "",
    tolerance: int | None = None,
) -> SequenceRecord:
    """Unweighted frame means of J and F over an aligned mask pair."""
    if len(pred) != len(gt_masks):
        raise ValueError(f"prediction has {len(pred)} frames, ground truth {len(gt_masks)}")
    js = [region_similarity_j(p, g) for p, g in zip(pred.masks, gt_masks)]
    fs = [boundary_f(p, g, tolerance) for p, g in zip(pred.masks, gt_masks)]
    return SequenceRecord(
        sequence_id=sequence_id,
        video=video,
        j_mean=float(np.mean(js)),
        f_mean=float(np.mean(fs)),
    )


REPORT_SCHEMA_VERSION = 1


@dataclass(eq=False)
class EvalReport:
    """Per-sequence records plus dataset-level aggregates.

    ``aggregate_by`` is "record" (mean over per-(video, query) records, the
    default) or "video" (records grouped by video first).
    """

    records: list[SequenceRecord] = field(default_factory=list)
    aggregate_by: str = "record"

    def add(self, record: SequenceRecord) -> None:
        self.records.append(record)

    def _grouped(self) -> list[tuple[float, float]]:
        if self.aggregate_by == "record":
            return [(r.j_mean, r.f_mean) for r in self.records]
        groups: dict[str, list[SequenceRecord]] = {}
        for r in self.records:
            groups.setdefault(r.video or r.sequence_id, []).append(r)
        return [
            (float(np.mean([r.j_mean for r in rs])), float(np.mean([r.f_mean for r in rs])))
            for rs in groups.values()
        ]

    @property
    def j_mean(self) -> float:
        pairs = self._grouped()
        return float(np.mean([j for j, _ in pairs])) if pairs else 0.0

    @property
    def f_mean(self) -> float:
        pairs = self._grouped()
        return float(np.mean([f for _, f in pairs])) if pairs else 0.0

    @property
    def jf(self) -> float:
        return (self.j_mean + self.f_mean) / 2

    def to_json_obj(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "aggregate_by": self.aggregate_by,
            "aggregate": {"J": self.j_mean, "F": self.f_mean, "J&F": self.jf},
            "sequences": [r.to_json_obj() for r in self.records],
        }

    def to_csv(self) -> str:
        lines = ["sequence,video,J,F,J&F"]
        for r in self.records:
            lines.append(f"{r.sequence_id},{r.video},{r.j_mean:.4f},{r.f_mean:.4f},{r.jf:.4f}")
        lines.append(f"ALL,,{self.j_mean:.4f},{self.f_mean:.4f},{self.jf:.4f}")
        return "\n".join(lines) + "\n"
