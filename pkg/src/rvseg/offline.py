"""Offline reasoning pipeline: sample -> grid -> CoT select -> per-instance
segment -> propagate -> overlap resolution, plus the union reduction that
turns the instance-level output into a single object-level sequence.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from .backends.base import Backends
from .core import (
    InstanceSelection,
    MaskSequence,
    VideoClip,
    resolve_non_overlap,
    union_masks,
)
from .errors import BackendError, RunError, TranscriptParseError
from .parsing import parse_output_list
from .prompts import build_offline_prompt
from .sampling import (
    DEFAULT_CANDIDATE_TARGET,
    DEFAULT_SIDE_CAP,
    SamplingPlan,
    compose_grid,
    compute_xi_offline,
    sample_candidates,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    """Knobs for an offline run. The candidate target generalizes the
    4/8/16 ablation values; 4..8 candidates is the recommended band."""

    candidate_target: int = DEFAULT_CANDIDATE_TARGET
    grid_side_cap: int = DEFAULT_SIDE_CAP
    non_overlap: bool = True
    vos_union: bool = False
    worker_limit: int = 4

    def __post_init__(self):
        if self.candidate_target < 1:
            raise ValueError(f"candidate_target must be >= 1, got {self.candidate_target}")
        if self.worker_limit < 1:
            raise ValueError(f"worker_limit must be >= 1, got {self.worker_limit}")


@dataclass(frozen=True, eq=False)
class InstanceResult:
    """One instance's trajectory before and after overlap resolution."""

    selection: InstanceSelection
    raw_sequence: MaskSequence
    resolved_sequence: MaskSequence


@dataclass(eq=False)
class OfflineRunResult:
    """Everything an offline run produced, for output writing and manifests."""

    instances: list[InstanceResult]
    plan: SamplingPlan
    prompt: str
    transcript: str
    selections: list[InstanceSelection]
    warnings: list[str] = field(default_factory=list)
    partial: bool = False
    timings: dict[str, float] = field(default_factory=dict)


def _propagate_instance(
    clip: VideoClip, backends: Backends, selection: InstanceSelection
) -> MaskSequence:
    """Segment the key mask on the source frame, then track it over the
    whole clip (backward to frame 1 and forward to frame T)."""
    anchor = selection.source_frame_index
    key_mask = backends.segmenter.segment(clip.frame(anchor), selection.description)
    session = backends.propagator.open(clip)
    try:
        backends.propagator.seed(session, anchor, key_mask)
        backward = backends.propagator.run(session, 1, anchor)
        forward = backends.propagator.run(session, anchor, len(clip))
    finally:
        backends.propagator.close(session)
    masks = tuple(backward[:-1]) + tuple(forward)
    return MaskSequence(instance_id=selection.object_index, masks=masks)


def run_reasoning_vis(
    clip: VideoClip,
    query: str,
    backends: Backends,
    config: RunConfig = RunConfig(),
) -> OfflineRunResult:
    """Run the instance-level pipeline; k may be 0 (empty result).

    A selector failure or an unparseable transcript aborts the run; a
    per-instance segment/propagate failure drops that instance with a
    warning and the result is flagged partial.
    """
    if not query:
        raise ValueError("query must be non-empty")
    warnings: list[str] = []
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    xi = compute_xi_offline(len(clip), config.candidate_target)
    plan = sample_candidates(clip, xi)
    grid = compose_grid(plan, clip, config.grid_side_cap)
    prompt = build_offline_prompt(plan.candidate_count, query)
    timings["prepare_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    transcript = backends.selector.select_keyframes(grid, prompt)
    timings["select_s"] = time.perf_counter() - t0

    try:
        parsed = parse_output_list(transcript, plan.candidate_count, warn=warnings.append)
    except TranscriptParseError as exc:
        raise RunError(f"selector transcript unparseable: {exc}", transcript=transcript) from exc

    selections = [
        replace(sel, source_frame_index=plan.source_frame_for(sel.candidate_index))
        for sel in parsed
    ]

    t0 = time.perf_counter()
    raw_results: list[tuple[InstanceSelection, MaskSequence]] = []
    partial = False
    if selections:
        with ThreadPoolExecutor(max_workers=config.worker_limit) as pool:
            futures = {
                pool.submit(_propagate_instance, clip, backends, sel): sel for sel in selections
            }
            for future, sel in futures.items():
                try:
                    raw_results.append((sel, future.result()))
                except BackendError as exc:
                    partial = True
                    warnings.append(f"instance {sel.object_index} dropped: {exc}")
                    logger.warning("instance %d dropped: %s", sel.object_index, exc)
    timings["segment_propagate_s"] = time.perf_counter() - t0

    # Eq.-order precedence: overlap resolution runs in ascending object index.
    raw_results.sort(key=lambda pair: pair[0].object_index)
    raw_sequences = [seq for _, seq in raw_results]
    resolved = resolve_non_overlap(raw_sequences) if config.non_overlap else raw_sequences

    instances = [
        InstanceResult(selection=sel, raw_sequence=raw, resolved_sequence=res)
        for (sel, raw), res in zip(raw_results, resolved)
    ]
    return OfflineRunResult(
        instances=instances,
        plan=plan,
        prompt=prompt,
        transcript=transcript,
        selections=selections,
        warnings=warnings,
        partial=partial,
        timings=timings,
    )


def union_of_instances(result: OfflineRunResult, clip: VideoClip) -> MaskSequence:
    """The object-level reduction: union all instance sequences (all-empty
    when the selector found nothing)."""
    if not result.instances:
        return MaskSequence.empty(1, clip.width, clip.height, len(clip))
    return union_masks([inst.resolved_sequence for inst in result.instances])


def run_reasoning_vos(
    clip: VideoClip,
    query: str,
    backends: Backends,
    config: RunConfig = RunConfig(),
) -> MaskSequence:
    """Object-level variant: one sequence, the union of all instances."""
    result = run_reasoning_vis(clip, query, backends, config)
    return union_of_instances(result, clip)
