#!/usr/bin/env python3
"""Run both scripted mock scenarios end to end and report their scores.

Usage: python scripts/mock_demo.py [--out DIR]
"""

import argparse
import tempfile
from pathlib import Path

from rvseg.backends.mock import load_mock_scenarios, rect_mask
from rvseg.cli import main as cli_main
from rvseg.core import MaskSequence, union_masks
from rvseg.metrics import evaluate_sequence
from rvseg.offline import run_reasoning_vis, run_reasoning_vos


def analytic_truth(scenario, clip):
    truth = []
    for n, obj in enumerate(scenario.objects, start=1):
        masks = []
        for t in range(1, len(clip) + 1):
            rect = scenario.object_rect_at(obj, t)
            mask = rect_mask(clip.width, clip.height, rect)
            if t < obj.appears_at:
                mask = rect_mask(clip.width, clip.height, (0, 0, 0, 0))
            masks.append(mask)
        truth.append(MaskSequence(instance_id=n, masks=tuple(masks)))
    return truth


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=None, help="artifact directory (default: temp)")
    args = parser.parse_args()
    out = Path(args.out) if args.out else Path(tempfile.mkdtemp(prefix="rvseg-demo-"))

    scenarios = load_mock_scenarios()
    for name, scenario in scenarios.items():
        cli_main(["mock-demo", "--scenario", name, "--out", str(out / name)])
        clip = scenario.build_clip()
        truth = analytic_truth(scenario, clip)
        if scenario.mode == "offline":
            result = run_reasoning_vis(clip, scenario.query, scenario.build_backends())
            for inst, gt in zip(result.instances, truth):
                rec = evaluate_sequence(inst.resolved_sequence, list(gt.masks))
                print(f"{name}: instance {inst.selection.object_index} "
                      f"J={rec.j_mean:.3f} F={rec.f_mean:.3f} J&F={rec.jf:.3f}")
            union = run_reasoning_vos(clip, scenario.query, scenario.build_backends())
            rec = evaluate_sequence(union, list(union_masks(truth).masks))
            print(f"{name}: union J&F={rec.jf:.3f}")
    print(f"artifacts in {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
