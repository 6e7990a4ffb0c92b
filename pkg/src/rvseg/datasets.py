"""Benchmark ingestion: DAVIS-style directory trees, palette-indexed
annotations, and a generic JSONL manifest of evaluation jobs.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from PIL import Image

from .core import BinaryMask, VideoClip
from .errors import DatasetError
from .mask_io import IMAGE_EXTENSIONS, load_clip


@dataclass(frozen=True, eq=False)
class GroundTruthSequence:
    """Per-frame annotation labels with the object id under evaluation.

    Labels are palette indices (0 = background); binary annotations load as
    {0, 1}. ``binary_masks`` projects out the evaluated object.
    """

    labels: tuple[np.ndarray, ...]  # (H, W) integer label grids
    object_id: int

    def __post_init__(self):
        if self.object_id < 1:
            raise ValueError(f"object_id must be >= 1, got {self.object_id}")
        if not self.labels:
            raise ValueError("ground truth must contain at least one frame")

    def __len__(self) -> int:
        return len(self.labels)

    def object_ids(self) -> set[int]:
        ids: set[int] = set()
        for grid in self.labels:
            ids.update(int(v) for v in np.unique(grid) if v != 0)
        return ids

    def binary_masks(self) -> list[BinaryMask]:
        return [BinaryMask(bits=grid == self.object_id) for grid in self.labels]


def load_annotation_labels(path: str | os.PathLike) -> np.ndarray:
    """Label grid from a palette-indexed or binary grayscale PNG."""
    with Image.open(path) as img:
        if img.mode == "P":
            return np.array(img, dtype=np.int32)
        if img.mode in ("L", "1"):
            arr = np.array(img.convert("L"), dtype=np.int32)
            return (arr > 127).astype(np.int32)
        raise DatasetError(f"{path}: unsupported annotation mode {img.mode!r} (need P or L)")


def load_annotation_dir(directory: str | os.PathLike, object_id: int = 1) -> GroundTruthSequence:
    root = Path(directory)
    if not root.is_dir():
        raise DatasetError(f"annotation directory missing: {root}", gaps=[str(root)])
    files = sorted(p for p in root.iterdir() if p.suffix.lower() == ".png")
    if not files:
        raise DatasetError(f"no annotation PNGs in {root}", gaps=[str(root)])
    return GroundTruthSequence(labels=tuple(load_annotation_labels(p) for p in files), object_id=object_id)


@dataclass(frozen=True)
class EvalJob:
    """One evaluation unit: a clip directory, its query, and ground truth."""

    name: str
    video_dir: str
    query: str
    gt_dir: str
    object_id: int = 1


def load_manifest(path: str | os.PathLike) -> list[EvalJob]:
    """JSONL manifest; each line holds {video_dir, query, gt_dir, object_id}."""
    manifest = Path(path)
    if not manifest.is_file():
        raise DatasetError(f"manifest missing: {manifest}", gaps=[str(manifest)])
    jobs = []
    base = manifest.parent
    for n, line in enumerate(manifest.read_text("utf-8").splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            video_dir = str(base / obj["video_dir"])
            gt_dir = str(base / obj["gt_dir"])
            job = EvalJob(
                name=str(obj.get("name", Path(obj["video_dir"]).name)),
                video_dir=video_dir,
                query=str(obj["query"]),
                gt_dir=gt_dir,
                object_id=int(obj.get("object_id", 1)),
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise DatasetError(f"{manifest}:{n}: malformed manifest entry: {exc}") from exc
        jobs.append(job)
    return jobs


@dataclass(frozen=True, eq=False)
class DavisSequence:
    name: str
    clip: VideoClip
    annotations: GroundTruthSequence  # object_id 1; re-target via with_object


def load_davis_layout(root: str | os.PathLike) -> list[DavisSequence]:
    """Load a DAVIS-style tree: JPEGImages/<seq>/ and Annotations/<seq>/.

    Frames and annotations are paired by filename stem; any missing
    counterpart is reported as a gap.
    """
    base = Path(root)
    images = base / "JPEGImages"
    annotations = base / "Annotations"
    if not images.is_dir() or not annotations.is_dir():
        raise DatasetError(
            f"{base} is not a DAVIS-style tree (JPEGImages/ and Annotations/ required)",
            gaps=[str(images), str(annotations)],
        )
    sequences = []
    gaps: list[str] = []
    for seq_dir in sorted(p for p in images.iterdir() if p.is_dir()):
        ann_dir = annotations / seq_dir.name
        if not ann_dir.is_dir():
            gaps.append(f"{seq_dir.name}: no annotation directory")
            continue
        frame_files = sorted(p for p in seq_dir.iterdir() if p.suffix.lower() in IMAGE_EXTENSIONS)
        ann_by_stem = {p.stem: p for p in ann_dir.iterdir() if p.suffix.lower() == ".png"}
        missing = [p.stem for p in frame_files if p.stem not in ann_by_stem]
        if missing:
            gaps.extend(f"{seq_dir.name}: no annotation for frame {stem}" for stem in missing)
            continue
        clip = load_clip(seq_dir)
        labels = tuple(load_annotation_labels(ann_by_stem[p.stem]) for p in frame_files)
        sequences.append(
            DavisSequence(
                name=seq_dir.name,
                clip=clip,
                annotations=GroundTruthSequence(labels=labels, object_id=1),
            )
        )
    if gaps:
        raise DatasetError(f"{base}: dataset has gaps: {'; '.join(gaps)}", gaps=gaps)
    if not sequences:
        raise DatasetError(f"{base}: no sequences found")
    return sequences


def with_object(gt: GroundTruthSequence, object_id: int) -> GroundTruthSequence:
    """The same annotations re-targeted at another palette id."""
    return GroundTruthSequence(labels=gt.labels, object_id=object_id)
