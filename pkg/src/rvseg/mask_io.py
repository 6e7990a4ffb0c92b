"""PNG readers/writers for masks and frames.

Mask files are 8-bit grayscale PNG with 0 = background and 255 = foreground.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Iterable

import numpy as np
from PIL import Image

from .core import BinaryMask, Frame, VideoClip

IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg", ".bmp")


def save_mask_png(mask: BinaryMask, path: str | os.PathLike) -> None:
    arr = np.where(mask.bits, 255, 0).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(path, format="PNG")


def load_mask_png(path: str | os.PathLike) -> BinaryMask:
    with Image.open(path) as img:
        arr = np.array(img.convert("L"))
    return BinaryMask(bits=arr > 127)


def save_frame_png(frame: Frame, path: str | os.PathLike) -> None:
    Image.fromarray(frame.pixels, mode="RGB").save(path, format="PNG")


def load_frame(path: str | os.PathLike, index: int) -> Frame:
    with Image.open(path) as img:
        arr = np.array(img.convert("RGB"))
    return Frame(index=index, pixels=arr)


def list_frame_files(directory: str | os.PathLike) -> list[Path]:
    """Image files under ``directory`` in sorted (temporal) order."""
    root = Path(directory)
    if not root.is_dir():
        raise FileNotFoundError(f"not a directory: {root}")
    files = sorted(p for p in root.iterdir() if p.suffix.lower() in IMAGE_EXTENSIONS)
    if not files:
        raise FileNotFoundError(f"no image files in {root}")
    return files


def load_clip(directory: str | os.PathLike) -> VideoClip:
    """Load all image files under ``directory`` as frames 1..T in sorted order."""
    files = list_frame_files(directory)
    frames = tuple(load_frame(path, index) for index, path in enumerate(files, start=1))
    return VideoClip(frames=frames)


def save_mask_dir(masks: Iterable[BinaryMask], directory: str | os.PathLike) -> list[Path]:
    """Write masks as 00001.png, 00002.png, ... under ``directory``."""
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    written = []
    for t, mask in enumerate(masks, start=1):
        path = root / f"{t:05d}.png"
        save_mask_png(mask, path)
        written.append(path)
    return written
