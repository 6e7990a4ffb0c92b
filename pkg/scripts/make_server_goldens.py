#!/usr/bin/env python3
"""Regenerate the golden fixtures for the serving-shim conformance suite.

The server's mock mode must reproduce the pipeline mocks byte for byte;
these fixtures freeze the pipeline mocks' answers (as wire-format RLE
records) for a spread of segmentation and propagation cases. Run this only
when the mock semantics intentionally change, and commit the result.

Usage: python scripts/make_server_goldens.py [--out server/tests/goldens/mock_conformance.json]
"""

import argparse
import json
from pathlib import Path

from rvseg.backends.mock import MockPropagator, MockSegmenter
from rvseg.core import Frame, VideoClip, decode_mask_rle, encode_mask_rle, RleRecord

SEGMENT_CASES = [
    {"width": 16, "height": 16, "text": "rect:2,3,4,5"},
    {"width": 8, "height": 6, "text": "rect:0,0,W,H"},
    {"width": 12, "height": 9, "text": "rect:10,7,6,6"},  # clipped at the border
    {"width": 10, "height": 10, "text": "rect:-2,-2,5,5"},  # clipped at the origin
    {"width": 14, "height": 10, "text": "the man on the left"},  # no grammar hit
    {"width": 5, "height": 4, "text": "rect:1,1,W,2"},
]

PROPAGATE_CASES = [
    {"width": 12, "height": 10, "frames": 6, "velocity": [1, 0],
     "seed_index": 3, "seed_rect": [2, 2, 4, 3],
     "runs": [[1, 6], [3, 3], [4, 6]]},
    {"width": 9, "height": 9, "frames": 5, "velocity": [-1, 2],
     "seed_index": 5, "seed_rect": [5, 1, 3, 3],
     "runs": [[1, 5], [2, 4]]},
    {"width": 16, "height": 8, "frames": 4, "velocity": [0, 0],
     "seed_index": 1, "seed_rect": [0, 0, 16, 8],
     "runs": [[1, 4]]},
]


def rect_to_mask(width, height, rect):
    segmenter = MockSegmenter()
    text = "rect:" + ",".join(str(v) for v in rect)
    return segmenter.segment(Frame.blank(1, width, height), text)


def build_goldens() -> dict:
    segmenter = MockSegmenter()
    segment_out = []
    for case in SEGMENT_CASES:
        frame = Frame.blank(1, case["width"], case["height"])
        mask = segmenter.segment(frame, case["text"])
        segment_out.append({**case, "mask": encode_mask_rle(mask).to_json_obj()})

    propagate_out = []
    for case in PROPAGATE_CASES:
        clip = VideoClip(frames=tuple(
            Frame.blank(i, case["width"], case["height"]) for i in range(1, case["frames"] + 1)
        ))
        propagator = MockPropagator(velocity=tuple(case["velocity"]))
        session = propagator.open(clip)
        seed = rect_to_mask(case["width"], case["height"], case["seed_rect"])
        propagator.seed(session, case["seed_index"], seed)
        runs = []
        for start, stop in case["runs"]:
            masks = propagator.run(session, start, stop)
            runs.append({
                "from": start, "to": stop,
                "masks": [encode_mask_rle(m).to_json_obj() for m in masks],
            })
        propagate_out.append({
            **{k: v for k, v in case.items() if k != "runs"},
            "seed_mask": encode_mask_rle(seed).to_json_obj(),
            "runs": runs,
        })
    return {"segment_cases": segment_out, "propagate_cases": propagate_out}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="server/tests/goldens/mock_conformance.json")
    args = parser.parse_args()
    goldens = build_goldens()
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(goldens, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    total = len(goldens["segment_cases"]) + len(goldens["propagate_cases"])
    print(f"wrote {total} golden cases to {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
