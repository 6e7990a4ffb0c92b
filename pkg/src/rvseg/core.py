"""Domain types for videos, masks and selections, plus the mask algebra
used by overlap resolution and the union reduction.

All types are immutable values after construction (backing numpy arrays are
copied and marked read-only), so they are safe to share between workers.
Every operation here is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import RleFormatError


def _frozen_array(data: np.ndarray, dtype) -> np.ndarray:
    arr = np.array(data, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Frame:
    """One RGB video frame with its 1-based temporal index."""

    index: int
    pixels: np.ndarray  # (H, W, 3) uint8, read-only

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"frame index must be >= 1, got {self.index}")
        arr = _frozen_array(self.pixels, np.uint8)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"frame pixels must have shape (H, W, 3), got {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("frame must be at least 1x1 pixels")
        object.__setattr__(self, "pixels", arr)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @classmethod
    def blank(cls, index: int, width: int, height: int) -> "Frame":
        return cls(index=index, pixels=np.zeros((height, width, 3), dtype=np.uint8))


@dataclass(frozen=True, eq=False)
class VideoClip:
    """An ordered sequence of equally sized frames indexed 1..T."""

    frames: tuple[Frame, ...]

    def __post_init__(self):
        frames = tuple(self.frames)
        if not frames:
            raise ValueError("clip must contain at least one frame")
        for pos, frame in enumerate(frames, start=1):
            if frame.index != pos:
                raise ValueError(
                    f"frame indices must be exactly 1..T: position {pos} has index {frame.index}"
                )
            if (frame.width, frame.height) != (frames[0].width, frames[0].height):
                raise ValueError(
                    f"frame {frame.index} is {frame.width}x{frame.height}, "
                    f"expected {frames[0].width}x{frames[0].height}"
                )
        object.__setattr__(self, "frames", frames)

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def width(self) -> int:
        return self.frames[0].width

    @property
    def height(self) -> int:
        return self.frames[0].height

    def frame(self, index: int) -> Frame:
        """Fetch a frame by its 1-based temporal index."""
        if not 1 <= index <= len(self.frames):
            raise ValueError(f"frame index {index} outside 1..{len(self.frames)}")
        return self.frames[index - 1]


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """A strictly binary per-pixel mask. Empty masks are legal everywhere."""

    bits: np.ndarray  # (H, W) bool, read-only

    def __post_init__(self):
        arr = _frozen_array(self.bits, bool)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"mask bits must be a non-empty 2-D grid, got shape {arr.shape}")
        object.__setattr__(self, "bits", arr)

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    def count(self) -> int:
        return int(self.bits.sum())

    def same_shape(self, other: "BinaryMask") -> bool:
        return self.bits.shape == other.bits.shape

    @classmethod
    def zeros(cls, width: int, height: int) -> "BinaryMask":
        return cls(bits=np.zeros((height, width), dtype=bool))

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "BinaryMask":
        return cls(bits=np.asarray(arr).astype(bool))


def masks_equal(a: BinaryMask, b: BinaryMask) -> bool:
    return a.bits.shape == b.bits.shape and bool(np.array_equal(a.bits, b.bits))


@dataclass(frozen=True, eq=False)
class MaskSequence:
    """Per-frame masks for one object instance, aligned with a clip's 1..T."""

    instance_id: int
    masks: tuple[BinaryMask, ...]

    def __post_init__(self):
        if self.instance_id < 1:
            raise ValueError(f"instance_id must be >= 1, got {self.instance_id}")
        masks = tuple(self.masks)
        if not masks:
            raise ValueError("mask sequence must contain at least one frame")
        first = masks[0]
        for t, mask in enumerate(masks, start=1):
            if not mask.same_shape(first):
                raise ValueError(
                    f"instance {self.instance_id}: mask at frame {t} is "
                    f"{mask.width}x{mask.height}, expected {first.width}x{first.height}"
                )
        object.__setattr__(self, "masks", masks)

    def __len__(self) -> int:
        return len(self.masks)

    @property
    def width(self) -> int:
        return self.masks[0].width

    @property
    def height(self) -> int:
        return self.masks[0].height

    def mask(self, frame_index: int) -> BinaryMask:
        if not 1 <= frame_index <= len(self.masks):
            raise ValueError(f"frame index {frame_index} outside 1..{len(self.masks)}")
        return self.masks[frame_index - 1]

    @classmethod
    def empty(cls, instance_id: int, width: int, height: int, length: int) -> "MaskSequence":
        blank = BinaryMask.zeros(width, height)
        return cls(instance_id=instance_id, masks=(blank,) * length)


def sequences_equal(a: MaskSequence, b: MaskSequence) -> bool:
    return len(a) == len(b) and all(masks_equal(x, y) for x, y in zip(a.masks, b.masks))


@dataclass(frozen=True)
class Query:
    """A free-form text query; may be implicit/complex."""

    text: str

    def __post_init__(self):
        if not self.text:
            raise ValueError("query text must be non-empty")


@dataclass(frozen=True)
class InstanceSelection:
    """One parsed selector output entry.

    ``candidate_index`` addresses a slot in the sampled candidate grid;
    ``source_frame_index`` is the original frame it resolves to through the
    sampling plan (``None`` until the caller resolves it).
    """

    object_index: int
    candidate_index: int
    description: str
    source_frame_index: int | None = None

    def __post_init__(self):
        if self.object_index < 1:
            raise ValueError(f"object_index must be >= 1, got {self.object_index}")
        if self.candidate_index < 1:
            raise ValueError(f"candidate_index must be >= 1, got {self.candidate_index}")
        if not self.description:
            raise ValueError("description must be non-empty")
        if self.source_frame_index is not None and self.source_frame_index < 1:
            raise ValueError(f"source_frame_index must be >= 1, got {self.source_frame_index}")


def _check_aligned(sequences: Sequence[MaskSequence]) -> None:
    first = sequences[0]
    for seq in sequences[1:]:
        if len(seq) != len(first):
            raise ValueError(
                f"instance {seq.instance_id}: sequence length {len(seq)} != {len(first)}"
            )
        if (seq.width, seq.height) != (first.width, first.height):
            raise ValueError(
                f"instance {seq.instance_id}: masks are {seq.width}x{seq.height}, "
                f"expected {first.width}x{first.height}"
            )


def resolve_non_overlap(raw: Sequence[MaskSequence]) -> list[MaskSequence]:
    """Make instance sequences pairwise disjoint at every frame.

    The first sequence is kept unchanged; each later instance keeps only the
    pixels not already claimed by a lower-indexed instance. Callers must pass
    the list ordered by ascending object index, which fixes the precedence.
    """
    sequences = list(raw)
    if not sequences:
        return []
    _check_aligned(sequences)

    length = len(sequences[0])
    resolved: list[MaskSequence] = []
    claimed = [np.zeros_like(sequences[0].masks[0].bits) for _ in range(length)]
    for seq in sequences:
        out_masks = []
        for t in range(length):
            kept = seq.masks[t].bits & ~claimed[t]
            claimed[t] = claimed[t] | kept
            out_masks.append(BinaryMask(bits=kept))
        resolved.append(MaskSequence(instance_id=seq.instance_id, masks=tuple(out_masks)))
    return resolved


def union_masks(sequences: Sequence[MaskSequence]) -> MaskSequence:
    """Per-frame pixel-wise OR of all input sequences (instance id 1)."""
    sequences = list(sequences)
    if not sequences:
        raise ValueError("union_masks requires at least one sequence")
    _check_aligned(sequences)

    merged = []
    for t in range(len(sequences[0])):
        bits = sequences[0].masks[t].bits.copy()
        for seq in sequences[1:]:
            bits |= seq.masks[t].bits
        merged.append(BinaryMask(bits=bits))
    return MaskSequence(instance_id=1, masks=tuple(merged))


@dataclass(frozen=True)
class RleRecord:
    """Run-length record over the row-major bit stream.

    Runs alternate starting with zeros; a zero-length first run is emitted
    when the stream starts with ones. Serialized on the wire as
    ``{"w": int, "h": int, "runs": [int, ...]}``.
    """

    width: int
    height: int
    runs: tuple[int, ...]

    def to_json_obj(self) -> dict:
        return {"w": self.width, "h": self.height, "runs": list(self.runs)}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "RleRecord":
        try:
            return cls(width=int(obj["w"]), height=int(obj["h"]), runs=tuple(int(r) for r in obj["runs"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise RleFormatError(f"malformed RLE record: {exc}") from exc


def encode_mask_rle(mask: BinaryMask) -> RleRecord:
    flat = mask.bits.ravel()
    changes = np.flatnonzero(np.diff(flat.astype(np.int8)))
    bounds = np.concatenate(([0], changes + 1, [flat.size]))
    runs = list(np.diff(bounds))
    if flat[0]:
        runs = [0] + runs
    return RleRecord(width=mask.width, height=mask.height, runs=tuple(int(r) for r in runs))


def decode_mask_rle(rle: RleRecord) -> BinaryMask:
    total = sum(rle.runs)
    expected = rle.width * rle.height
    if total != expected:
        raise RleFormatError(
            f"RLE runs sum to {total}, expected {expected} for {rle.width}x{rle.height}"
        )
    if any(r < 0 for r in rle.runs):
        raise RleFormatError("RLE runs must be non-negative")
    values = np.zeros(len(rle.runs), dtype=bool)
    values[1::2] = True
    flat = np.repeat(values, np.array(rle.runs, dtype=np.int64))
    return BinaryMask(bits=flat.reshape(rle.height, rle.width))
