"""Online streaming pipeline: periodic binary keyframe judgment, greedy
keyframe replacement, and incremental propagation.

Frames arrive strictly in order; predictions for frame t depend only on
frames 1..t and the query. Until some judged frame is accepted as a
keyframe the stream outputs all-zero masks.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .backends.base import Backends, PropagationSession
from .core import BinaryMask, Frame
from .errors import BackendError
from .parsing import parse_binary_selectivity
from .prompts import build_online_prompt

logger = logging.getLogger(__name__)

DEFAULT_ONLINE_XI = 4


class StreamBuffer:
    """Growing frame store satisfying the FrameSource protocol.

    Propagation sessions opened on the buffer see frames appended later,
    which is what lets one session be extended as the stream advances.
    """

    def __init__(self):
        self._frames: list[Frame] = []

    def append(self, frame: Frame) -> None:
        expected = len(self._frames) + 1
        if frame.index != expected:
            raise ValueError(f"stream expected frame {expected}, got index {frame.index}")
        if self._frames and (frame.width, frame.height) != (self.width, self.height):
            raise ValueError(
                f"frame {frame.index} is {frame.width}x{frame.height}, "
                f"expected {self.width}x{self.height}"
            )
        self._frames.append(frame)

    def __len__(self) -> int:
        return len(self._frames)

    def frame(self, index: int) -> Frame:
        if not 1 <= index <= len(self._frames):
            raise ValueError(f"frame index {index} outside 1..{len(self._frames)}")
        return self._frames[index - 1]

    @property
    def width(self) -> int:
        return self._frames[0].width

    @property
    def height(self) -> int:
        return self._frames[0].height


@dataclass(eq=False)
class OnlineState:
    """Single-owner state of one stream; steps are strictly sequential."""

    query: str
    xi: int
    backends: Backends
    buffer: StreamBuffer = field(default_factory=StreamBuffer)
    keyframe: Frame | None = None
    keyframe_index: int = 0  # 0 while no keyframe has been selected
    key_mask: BinaryMask | None = None
    session: PropagationSession | None = None
    last_judged_t: int = 0
    events: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def online_init(query: str, xi: int = DEFAULT_ONLINE_XI, backends: Backends | None = None) -> OnlineState:
    """Fresh stream state: no keyframe, no session, nothing judged yet."""
    if not query:
        raise ValueError("query must be non-empty")
    if xi < 1:
        raise ValueError(f"xi must be >= 1, got {xi}")
    if backends is None:
        raise ValueError("backends are required")
    return OnlineState(query=query, xi=xi, backends=backends)


def _judge(state: OnlineState, frame: Frame) -> bool:
    prompt = build_online_prompt(state.query)
    try:
        response = state.backends.selector.judge_frame(frame, prompt)
    except BackendError as exc:
        state.warnings.append(f"judgment at t={frame.index} failed, treated as negative: {exc}")
        state.events.append({"type": "judgment", "t": frame.index, "selected": False, "failed": True})
        return False
    parsed = parse_binary_selectivity(response)
    if parsed.ambiguous:
        state.warnings.append(f"judgment at t={frame.index} ambiguous, treated as negative")
    state.events.append(
        {"type": "judgment", "t": frame.index, "selected": parsed.value, "ambiguous": parsed.ambiguous}
    )
    return parsed.value


def _replace_keyframe(state: OnlineState, frame: Frame) -> None:
    try:
        key_mask = state.backends.segmenter.segment(frame, state.query)
    except BackendError as exc:
        state.warnings.append(
            f"segmenter failed at keyframe t={frame.index}, keeping previous keyframe: {exc}"
        )
        return
    if state.session is not None:
        state.backends.propagator.close(state.session)
    session = state.backends.propagator.open(state.buffer)
    state.backends.propagator.seed(session, frame.index, key_mask)
    state.session = session
    state.keyframe = frame
    state.keyframe_index = frame.index
    state.key_mask = key_mask
    state.events.append({"type": "keyframe_switch", "t": frame.index})


def online_step(state: OnlineState, frame: Frame) -> BinaryMask:
    """Consume the next frame and return its mask.

    Frames are judged at t = 1, xi+1, 2xi+1, ...; an accepted frame
    unconditionally replaces the keyframe (greedy) and re-seeds a fresh
    propagation session there. Judgment failures count as a negative so the
    stream never stalls; segmenter failures keep the previous keyframe.
    """
    state.buffer.append(frame)  # also enforces in-order arrival
    t = frame.index

    if (t - 1) % state.xi == 0:
        state.last_judged_t = t
        if _judge(state, frame):
            _replace_keyframe(state, frame)

    if state.session is None:
        return BinaryMask.zeros(frame.width, frame.height)
    return state.backends.propagator.run(state.session, t, t)[0]


def online_finish(state: OnlineState) -> None:
    """Release the active session, if any."""
    if state.session is not None:
        state.backends.propagator.close(state.session)
        state.session = None


JudgmentScript = Mapping[int, bool]
SegmentOracle = Callable[[int], BinaryMask]
PropagateOracle = Callable[[BinaryMask, int, int], BinaryMask]


def reference_online_simulator(
    judgments: JudgmentScript,
    segment_oracle: SegmentOracle,
    propagate_oracle: PropagateOracle,
    total_frames: int,
    xi: int,
    width: int,
    height: int,
) -> list[BinaryMask]:
    """Literal, from-scratch evaluation of the online recurrence.

    For every frame t it recomputes the keyframe pointer chain and the mask
    from the recurrence alone, with the keyframe pointer taken at the most
    recent judged step s = floor((t-1)/xi)*xi + 1 (the published pointer
    indexing points one period past t whenever xi divides t, so the intent,
    "the most recently selected keyframe", is applied instead). Used only by
    tests as the equivalence oracle for ``online_step``.
    """
    if xi < 1:
        raise ValueError(f"xi must be >= 1, got {xi}")
    pointer: dict[int, int] = {0: 0}
    judged = range(1, total_frames + 1, xi)
    for t in judged:
        selected = bool(judgments.get(t, False))
        pointer[t] = t if selected else pointer[max(t - xi, 0)]

    masks = []
    for t in range(1, total_frames + 1):
        s = (t - 1) // xi * xi + 1
        anchor = pointer[s]
        if anchor == 0:
            masks.append(BinaryMask.zeros(width, height))
        else:
            key_mask = segment_oracle(anchor)
            masks.append(propagate_oracle(key_mask, anchor, t))
    return masks
