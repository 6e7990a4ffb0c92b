"""Pipeline engine and evaluation harness for reasoning video
instance/object segmentation.

Three pluggable agents (a chain-of-thought keyframe selector, a
text-prompted image segmenter, and a video mask propagator) are orchestrated
into an offline instance-level pipeline and an online streaming pipeline,
with deterministic mock backends and a J/F benchmark harness.
"""

__version__ = "0.1.0"

from .core import (
    BinaryMask,
    Frame,
    InstanceSelection,
    MaskSequence,
    Query,
    RleRecord,
    VideoClip,
    decode_mask_rle,
    encode_mask_rle,
    masks_equal,
    resolve_non_overlap,
    sequences_equal,
    union_masks,
)
from .offline import InstanceResult, OfflineRunResult, RunConfig, run_reasoning_vis, run_reasoning_vos
from .online import OnlineState, online_init, online_step, reference_online_simulator
from .sampling import GridImage, SamplingPlan, compose_grid, compute_xi_offline, sample_candidates

__all__ = [
    "BinaryMask",
    "Frame",
    "InstanceSelection",
    "MaskSequence",
    "Query",
    "RleRecord",
    "VideoClip",
    "decode_mask_rle",
    "encode_mask_rle",
    "masks_equal",
    "resolve_non_overlap",
    "sequences_equal",
    "union_masks",
    "InstanceResult",
    "OfflineRunResult",
    "RunConfig",
    "run_reasoning_vis",
    "run_reasoning_vos",
    "OnlineState",
    "online_init",
    "online_step",
    "reference_online_simulator",
    "GridImage",
    "SamplingPlan",
    "compose_grid",
    "compute_xi_offline",
    "sample_candidates",
]
