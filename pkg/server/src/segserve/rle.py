"""Run-length codec for binary masks on the wire.

Record shape: ``{"w": int, "h": int, "runs": [int, ...]}``. Runs alternate
over the row-major bit stream starting with zeros; a zero-length first run
marks a stream that starts with ones. Run lengths must sum to w*h.
"""

from __future__ import annotations

import numpy as np


class RleError(ValueError):
    """Record inconsistent with its declared dimensions."""


def encode(bits: np.ndarray) -> dict:
    height, width = bits.shape
    flat = bits.astype(bool).ravel()
    changes = np.flatnonzero(np.diff(flat.astype(np.int8)))
    bounds = np.concatenate(([0], changes + 1, [flat.size]))
    runs = [int(r) for r in np.diff(bounds)]
    if flat[0]:
        runs = [0] + runs
    return {"w": width, "h": height, "runs": runs}


def decode(record: dict) -> np.ndarray:
    try:
        width, height = int(record["w"]), int(record["h"])
        runs = [int(r) for r in record["runs"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise RleError(f"malformed RLE record: {exc}") from exc
    if width < 1 or height < 1:
        raise RleError(f"bad dimensions {width}x{height}")
    if any(r < 0 for r in runs):
        raise RleError("runs must be non-negative")
    if sum(runs) != width * height:
        raise RleError(f"runs sum to {sum(runs)}, expected {width * height}")
    values = np.zeros(len(runs), dtype=bool)
    values[1::2] = True
    flat = np.repeat(values, np.array(runs, dtype=np.int64))
    return flat.reshape(height, width)
