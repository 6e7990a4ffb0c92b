"""Acceptance criteria, one test per criterion.

Each test prints a PASS line on success (run with ``pytest -v -s`` to see
them); any assertion failure is the FAIL signal. Tolerances are pinned here:
oracle comparisons are exact (bit-exact for masks, float-exact for metrics,
byte-exact for artifacts) and the two runtime-bounded suites assert their
stated wall-clock budgets.
"""

import json
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import read_fixture
from helpers import (
    oracle_boundary_f,
    oracle_first_claim,
    oracle_iou,
    oracle_translate,
    random_structured_mask,
)
from rvseg.backends.base import Backends
from rvseg.backends.mock import (
    MockPropagator,
    MockSegmenter,
    MockSelector,
    NO_TEXT,
    YES_TEXT,
    load_mock_scenarios,
    rect_mask,
)
from rvseg.cli import main
from rvseg.core import (
    BinaryMask,
    InstanceSelection,
    MaskSequence,
    masks_equal,
    resolve_non_overlap,
    union_masks,
)
from rvseg.metrics import boundary_f, evaluate_sequence, region_similarity_j
from rvseg.offline import run_reasoning_vis, run_reasoning_vos
from rvseg.online import online_finish, online_init, online_step, reference_online_simulator
from rvseg.parsing import parse_binary_selectivity, parse_output_list
from rvseg.sampling import compose_grid, compute_xi_offline, sample_candidates
from rvseg.core import Frame, VideoClip


def report(name):
    print(f"\n[ACCEPTANCE] {name}: PASS")


def test_parser_fixtures():
    """All three published transcripts parse exactly, with zero warnings."""
    warnings = []
    got = parse_output_list(read_fixture("transcript_offline_bicycles.txt"), 7, warn=warnings.append)
    assert warnings == []
    assert got == [
        InstanceSelection(1, 1, "the individual in a white shirt riding a bicycle at the left center of the frame"),
        InstanceSelection(2, 1, "the individual with a backpack on a bicycle at the center further down the road"),
        InstanceSelection(3, 2, "the individual in a light-colored shirt on a bicycle at the left side of the frame"),
    ]

    online_no = parse_binary_selectivity(read_fixture("transcript_online_no.txt"))
    assert online_no.value is False and not online_no.ambiguous
    online_yes = parse_binary_selectivity(read_fixture("transcript_online_yes.txt"))
    assert online_yes.value is True and not online_yes.ambiguous

    single = parse_output_list(
        'Output list: [{object_index: 1, keyframe: 4, object_description: '
        '"the man at the top left corner of the image"}]',
        7,
        warn=warnings.append,
    )
    assert warnings == []
    assert single == [InstanceSelection(1, 4, "the man at the top left corner of the image")]
    report("parser fixtures (3 transcripts + single-entry example, zero warnings)")


def test_sampling_law_exhaustive():
    """T' = floor(T/xi) stays in [1, 8] for every T up to 10000 at target 8."""
    start = time.perf_counter()
    for total in range(1, 10001):
        xi = compute_xi_offline(total, 8)
        assert xi == (total - 1) // 8 + 1
        t_prime = total // xi if total >= xi else 1
        assert 1 <= t_prime <= 8, f"T={total}: T'={t_prime}"
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"exhaustive sweep took {elapsed:.2f}s"
    report(f"sampling law exhaustive T=1..10000 ({elapsed * 1000:.0f} ms)")


def test_non_overlap_matches_oracle():
    """1000 randomized mask sets match the first-claim oracle bit-exactly."""
    rng = np.random.default_rng(2024)
    for case in range(1000):
        k = int(rng.integers(1, 6))
        w = int(rng.integers(1, 33))
        h = int(rng.integers(1, 33))
        frames = int(rng.integers(1, 3))
        raws = [
            MaskSequence(
                instance_id=i + 1,
                masks=tuple(BinaryMask(bits=rng.random((h, w)) < 0.45) for _ in range(frames)),
            )
            for i in range(k)
        ]
        got = resolve_non_overlap(raws)
        want = oracle_first_claim(raws)
        for g, w_ in zip(got, want):
            for a, b in zip(g.masks, w_.masks):
                assert masks_equal(a, b), f"case {case}: oracle mismatch"
        for t in range(frames):
            for i in range(k):
                for j in range(i + 1, k):
                    assert not (got[i].masks[t].bits & got[j].masks[t].bits).any(), (
                        f"case {case}: overlap at frame {t}"
                    )
    report("non-overlap resolution vs first-claim oracle (1000 random sets)")


def test_metrics_match_oracles():
    """J and F equal the counting/all-pairs oracles exactly on 1000 masks."""
    start = time.perf_counter()
    rng = np.random.default_rng(7)
    jf_checks = 0
    for case in range(1000):
        w = int(rng.integers(2, 65))
        h = int(rng.integers(2, 65))
        pred = random_structured_mask(rng, w, h)
        gt = random_structured_mask(rng, w, h)
        tol = int(rng.integers(0, 4))
        j = region_similarity_j(pred, gt)
        f = boundary_f(pred, gt, tol)
        assert j == oracle_iou(pred, gt), f"case {case}: J mismatch"
        assert f == oracle_boundary_f(pred, gt, tol), f"case {case}: F mismatch"
        if case % 25 == 0:
            record = evaluate_sequence(
                MaskSequence(instance_id=1, masks=(pred,)), [gt], tolerance=tol
            )
            assert record.jf == (record.j_mean + record.f_mean) / 2
            jf_checks += 1
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0, f"metric suite took {elapsed:.1f}s"
    report(f"metrics vs oracles (1000 masks <= 64x64, {elapsed:.1f}s, {jf_checks} J&F checks)")


W, H = 20, 16


def _scripted_backends(judgments, rects, velocity):
    return Backends(
        selector=MockSelector(judgments={t: YES_TEXT if yes else NO_TEXT
                                         for t, yes in judgments.items()}),
        segmenter=MockSegmenter(by_frame={t: f"rect:{x},{y},{w},{h}"
                                          for t, (x, y, w, h) in rects.items()}),
        propagator=MockPropagator(velocity=velocity),
    )


def _run_stream(backends, total, xi):
    state = online_init("q", xi, backends)
    masks = [online_step(state, Frame.blank(i, W, H)) for i in range(1, total + 1)]
    online_finish(state)
    return masks


def test_online_state_machine_equivalence():
    """online_step is bit-exact with the literal recurrence on 500 scripts."""
    rng = np.random.default_rng(123)
    for case in range(500):
        xi = int(rng.choice([1, 2, 4, 8]))
        total = int(rng.integers(1, 65))
        velocity = (int(rng.integers(-2, 3)), int(rng.integers(-2, 3)))
        judged = list(range(1, total + 1, xi))
        judgments = {t: bool(rng.random() < 0.5) for t in judged}
        rects = {t: (int(rng.integers(0, W - 4)), int(rng.integers(0, H - 4)),
                     int(rng.integers(1, 5)), int(rng.integers(1, 5))) for t in judged}

        got = _run_stream(_scripted_backends(judgments, rects, velocity), total, xi)

        def propagate(mask, anchor, t):
            return oracle_translate(mask, velocity[0] * (t - anchor), velocity[1] * (t - anchor))

        want = reference_online_simulator(
            judgments, lambda t: rect_mask(W, H, rects[t]), propagate, total, xi, W, H
        )
        first_yes = min((t for t in judged if judgments[t]), default=None)
        for t, (a, b) in enumerate(zip(got, want), start=1):
            assert masks_equal(a, b), f"case {case}: mismatch at t={t} (xi={xi}, T={total})"
            if first_yes is None or t < first_yes:
                assert a.count() == 0, f"case {case}: nonzero mask before first positive"

    # Causality: mutate everything after the prefix, prefix outputs unchanged.
    xi, total, prefix = 4, 24, 11
    judged = list(range(1, total + 1, xi))
    rng = np.random.default_rng(5)
    judgments = {t: bool(rng.random() < 0.6) for t in judged}
    rects = {t: (int(rng.integers(0, 12)), int(rng.integers(0, 8)), 3, 3) for t in judged}
    base = _run_stream(_scripted_backends(judgments, rects, (1, 0)), total, xi)
    mutated_j = {t: (not judgments[t] if t > prefix else judgments[t]) for t in judged}
    mutated_r = {t: ((0, 0, 1, 1) if t > prefix else rects[t]) for t in judged}
    altered = _run_stream(_scripted_backends(mutated_j, mutated_r, (1, 0)), total, xi)
    for t in range(prefix):
        assert masks_equal(base[t], altered[t]), f"causality violated at t={t + 1}"
    report("online state machine: 500-script equivalence, causality, null prefix")


def _two_rects_truth(scenario, clip):
    truth = []
    for obj in scenario.objects:
        masks = []
        for t in range(1, len(clip) + 1):
            masks.append(rect_mask(clip.width, clip.height, scenario.object_rect_at(obj, t)))
        truth.append(MaskSequence(instance_id=obj.frame_index, masks=tuple(masks)))
    return truth


def test_end_to_end_mock_pipeline(tmp_path):
    """two-rects scores J&F = 1.0 exactly in VIS and VOS; reruns identical."""
    start = time.perf_counter()
    scenario = load_mock_scenarios()["two-rects"]
    clip = scenario.build_clip()
    truth = _two_rects_truth(scenario, clip)

    result = run_reasoning_vis(clip, scenario.query, scenario.build_backends())
    assert len(result.instances) == 2 and not result.partial
    for inst, gt_seq in zip(result.instances, truth):
        record = evaluate_sequence(inst.resolved_sequence, list(gt_seq.masks))
        assert record.j_mean == 1.0 and record.f_mean == 1.0 and record.jf == 1.0

    union = run_reasoning_vos(clip, scenario.query, scenario.build_backends())
    gt_union = union_masks(truth)
    record = evaluate_sequence(union, list(gt_union.masks))
    assert record.jf == 1.0

    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["mock-demo", "--scenario", "two-rects", "--out", str(out1)]) == 0
    assert main(["mock-demo", "--scenario", "two-rects", "--out", str(out2)]) == 0
    files1 = sorted(p.relative_to(out1) for p in out1.rglob("*") if p.is_file())
    files2 = sorted(p.relative_to(out2) for p in out2.rglob("*") if p.is_file())
    assert files1 == files2 and files1
    for rel in files1:
        assert (out1 / rel).read_bytes() == (out2 / rel).read_bytes(), f"{rel} differs"

    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"end-to-end suite took {elapsed:.1f}s"
    report(f"end-to-end mock pipeline: J&F=1.0 both modes, byte-identical reruns ({elapsed:.1f}s)")


def test_grid_composition_properties():
    """Layout rules hold over randomized frame shapes."""
    rng = np.random.default_rng(99)
    for case in range(300):
        count = int(rng.integers(1, 9))
        width = int(rng.integers(1, 64))
        height = int(rng.integers(1, 64))
        cap = int(rng.integers(8, 512))
        frames = []
        for i in range(1, count + 1):
            pixels = np.full((height, width, 3), i * 7 % 251, dtype=np.uint8)
            frames.append(Frame(index=i, pixels=pixels))
        clip = VideoClip(frames=tuple(frames))
        grid = compose_grid(sample_candidates(clip, 1), clip, side_cap=cap)

        expected_orientation = "horizontal" if width <= height else "vertical"
        assert grid.orientation == expected_orientation, f"case {case}"
        assert max(grid.width, grid.height) <= cap, f"case {case}"
        assert len(grid.cell_rects) == count
        if grid.orientation == "horizontal":
            edges = [r.x for r in grid.cell_rects]
            ends = [r.x + r.width for r in grid.cell_rects]
            span = grid.width
            assert all(r.y == 0 and r.height == grid.height for r in grid.cell_rects)
        else:
            edges = [r.y for r in grid.cell_rects]
            ends = [r.y + r.height for r in grid.cell_rects]
            span = grid.height
            assert all(r.x == 0 and r.width == grid.width for r in grid.cell_rects)
        assert edges[0] == 0 and ends[-1] == span
        for a_end, b_start in zip(ends, edges[1:]):
            assert a_end == b_start, f"case {case}: cells overlap or leave gaps"
        # Temporal order: on unscaled grids every cell shows exactly its own
        # frame's fill value.
        full_long = max(height, width * count) if expected_orientation == "horizontal" else max(
            width, height * count
        )
        if full_long <= cap:
            for i, r in enumerate(grid.cell_rects):
                cell = grid.image[r.y : r.y + r.height, r.x : r.x + r.width]
                assert np.all(cell == (i + 1) * 7 % 251), f"case {case}: temporal order broken"
    report("grid composition layout properties (300 random shapes)")
