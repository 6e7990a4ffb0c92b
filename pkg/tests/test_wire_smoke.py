"""Optional smoke test against live serving endpoints.

Skipped unless RVSEG_SEGMENTER_ENDPOINT and RVSEG_PROPAGATOR_ENDPOINT are
set. Asserts only that a short clip completes with non-empty masks; scores
are logged, never asserted.
"""

import logging
import os

import numpy as np
import pytest

from rvseg.backends.base import Backends
from rvseg.backends.mock import MockSelector
from rvseg.backends.wire import HttpPropagator, HttpSegmenter
from rvseg.core import Frame, InstanceSelection, VideoClip
from rvseg.offline import run_reasoning_vis
from rvseg.parsing import format_output_list

logger = logging.getLogger(__name__)

SEGMENTER = os.environ.get("RVSEG_SEGMENTER_ENDPOINT", "")
PROPAGATOR = os.environ.get("RVSEG_PROPAGATOR_ENDPOINT", "")

pytestmark = pytest.mark.skipif(
    not (SEGMENTER and PROPAGATOR),
    reason="set RVSEG_SEGMENTER_ENDPOINT and RVSEG_PROPAGATOR_ENDPOINT to run",
)


def test_short_clip_completes_with_nonempty_masks():
    rng = np.random.default_rng(0)
    frames = tuple(
        Frame(index=i, pixels=rng.integers(0, 255, size=(24, 32, 3), dtype=np.uint8))
        for i in range(1, 7)
    )
    clip = VideoClip(frames=frames)
    transcript = format_output_list([InstanceSelection(1, 1, "rect:4,4,10,8")])
    backends = Backends(
        selector=MockSelector(transcript=transcript),
        segmenter=HttpSegmenter(SEGMENTER),
        propagator=HttpPropagator(PROPAGATOR),
    )
    result = run_reasoning_vis(clip, "smoke query", backends)
    assert result.instances, f"run dropped all instances: {result.warnings}"
    seq = result.instances[0].resolved_sequence
    assert len(seq) == len(clip)
    nonempty = sum(1 for m in seq.masks if m.count())
    logger.info("smoke run: %d/%d non-empty masks", nonempty, len(seq))
    assert nonempty > 0
