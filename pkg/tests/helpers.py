"""Independent oracles used by the test suite.

Everything here is deliberately written from the definitions, not from the
implementations under test: first-claim assignment via per-pixel argmax,
IoU via coordinate sets, boundary matching via all-pairs squared distances,
RLE via direct run counting.
"""

from __future__ import annotations

import numpy as np

from rvseg.core import BinaryMask, MaskSequence


def oracle_first_claim(raws: list[MaskSequence]) -> list[MaskSequence]:
    """Assign every pixel to the lowest-positioned sequence claiming it."""
    length = len(raws[0])
    outs: list[list[BinaryMask]] = [[] for _ in raws]
    for t in range(length):
        stack = np.stack([seq.masks[t].bits for seq in raws])
        claimed = stack.any(axis=0)
        first = np.argmax(stack, axis=0)
        for i in range(len(raws)):
            outs[i].append(BinaryMask(bits=(first == i) & claimed))
    return [
        MaskSequence(instance_id=seq.instance_id, masks=tuple(masks))
        for seq, masks in zip(raws, outs)
    ]


def oracle_rle_runs(bits: np.ndarray) -> list[int]:
    """Direct run counting over the row-major stream, zeros first."""
    flat = [bool(v) for v in bits.ravel()]
    runs = []
    current = False
    count = 0
    for value in flat:
        if value == current:
            count += 1
        else:
            runs.append(count)
            current = value
            count = 1
    runs.append(count)
    return runs


def mask_coords(mask: BinaryMask) -> set[tuple[int, int]]:
    ys, xs = np.nonzero(mask.bits)
    return set(zip(ys.tolist(), xs.tolist()))


def oracle_iou(pred: BinaryMask, gt: BinaryMask) -> float:
    a, b = mask_coords(pred), mask_coords(gt)
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def oracle_boundary(mask: BinaryMask) -> set[tuple[int, int]]:
    """Foreground pixels with a background 4-neighbor (border = background)."""
    fg = mask_coords(mask)
    h, w = mask.bits.shape
    boundary = set()
    for y, x in fg:
        for dy, dx in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            ny, nx = y + dy, x + dx
            if not (0 <= ny < h and 0 <= nx < w) or (ny, nx) not in fg:
                boundary.add((y, x))
                break
    return boundary


def _fraction_within(points: set[tuple[int, int]], targets: set[tuple[int, int]], tol: int) -> float:
    pts = np.array(sorted(points))
    tgt = np.array(sorted(targets))
    d2 = ((pts[:, None, :] - tgt[None, :, :]) ** 2).sum(axis=2)
    return float((d2.min(axis=1) <= tol * tol).mean())


def oracle_boundary_f(pred: BinaryMask, gt: BinaryMask, tol: int) -> float:
    pb, gb = oracle_boundary(pred), oracle_boundary(gt)
    if not pb and not gb:
        return 1.0
    if not pb or not gb:
        return 0.0
    precision = _fraction_within(pb, gb, tol)
    recall = _fraction_within(gb, pb, tol)
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def oracle_translate(mask: BinaryMask, dx: int, dy: int) -> BinaryMask:
    """Coordinate-set translation with clipping."""
    h, w = mask.bits.shape
    out = np.zeros((h, w), dtype=bool)
    for y, x in mask_coords(mask):
        ny, nx = y + dy, x + dx
        if 0 <= ny < h and 0 <= nx < w:
            out[ny, nx] = True
    return BinaryMask(bits=out)


def random_structured_mask(rng: np.random.Generator, width: int, height: int) -> BinaryMask:
    """Random mask mixing empty, rectangles, ellipses, and sparse noise."""
    kind = rng.integers(0, 5)
    bits = np.zeros((height, width), dtype=bool)
    if kind == 0:
        pass  # empty
    elif kind == 1:
        x0, y0 = rng.integers(0, width), rng.integers(0, height)
        x1, y1 = rng.integers(0, width + 1), rng.integers(0, height + 1)
        bits[min(y0, y1): max(y0, y1) + 1, min(x0, x1): max(x0, x1) + 1] = True
    elif kind == 2:
        cy, cx = rng.integers(0, height), rng.integers(0, width)
        ry, rx = rng.integers(1, max(2, height // 2)), rng.integers(1, max(2, width // 2))
        yy, xx = np.mgrid[0:height, 0:width]
        bits = ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 <= 1.0
    elif kind == 3:
        bits = rng.random((height, width)) < 0.08
    else:
        for _ in range(int(rng.integers(1, 4))):
            x0 = int(rng.integers(0, width))
            y0 = int(rng.integers(0, height))
            w = int(rng.integers(1, width - x0 + 1))
            h = int(rng.integers(1, height - y0 + 1))
            bits[y0:y0 + h, x0:x0 + w] = True
    return BinaryMask(bits=bits)
