"""Abstract interfaces for the three model agents.

The pipeline only ever talks to these interfaces; concrete backends are
either wire clients (``rvseg.backends.wire``) or deterministic mocks
(``rvseg.backends.mock``). Backend handles are shareable across workers;
a PropagationSession is single-owner.
"""

from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

from ..core import BinaryMask, Frame
from ..errors import SessionUsageError
from ..sampling import GridImage


@dataclass(frozen=True)
class SelectorConfig:
    """Connection and decoding settings for the keyframe selector."""

    endpoint: str = ""
    model: str = "gpt-4o"
    api_key: str = ""
    temperature: float = 0.5
    max_output_tokens: int = 2500
    timeout: float = 120.0
    max_attempts: int = 3
    backoff_base: float = 1.0
    seed: int | None = None

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature}")
        if self.max_output_tokens < 1:
            raise ValueError(f"max_output_tokens must be >= 1, got {self.max_output_tokens}")
        if self.max_attempts < 1:
            raise ValueError(f"max_attempts must be >= 1, got {self.max_attempts}")


@runtime_checkable
class FrameSource(Protocol):
    """Anything that can hand out frames by 1-based index.

    ``VideoClip`` satisfies this for fixed clips; the online pipeline uses a
    growing buffer, so sessions opened on it can be extended as the stream
    advances.
    """

    def __len__(self) -> int: ...

    def frame(self, index: int) -> Frame: ...

    @property
    def width(self) -> int: ...

    @property
    def height(self) -> int: ...


_session_counter = itertools.count(1)


@dataclass
class PropagationSession:
    """State of one tracking session; owned by a single worker."""

    source: FrameSource
    session_id: str = field(default_factory=lambda: f"session-{next(_session_counter)}")
    anchor_index: int | None = None
    anchor_mask: BinaryMask | None = None
    closed: bool = False

    @property
    def seeded(self) -> bool:
        return self.anchor_index is not None

    def require_seeded(self) -> None:
        if not self.seeded:
            raise SessionUsageError(f"{self.session_id}: run before seed")
        if self.closed:
            raise SessionUsageError(f"{self.session_id}: session is closed")


class KeyframeSelector(ABC):
    """The reasoning agent that picks keyframes (offline) or judges them (online)."""

    @abstractmethod
    def select_keyframes(self, grid: GridImage, prompt: str) -> str:
        """Return the model's full response text for a grid image + prompt."""

    @abstractmethod
    def judge_frame(self, frame: Frame, prompt: str) -> str:
        """Return the model's full response text for a single frame + prompt."""


class ImageSegmenter(ABC):
    """Text-prompted image segmenter producing a key mask on one frame."""

    @abstractmethod
    def segment(self, frame: Frame, description: str) -> BinaryMask:
        """Mask with the frame's dimensions; may be empty if nothing matches."""


class VideoPropagator(ABC):
    """Video processor that tracks a seeded mask across frames."""

    @abstractmethod
    def open(self, source: FrameSource) -> PropagationSession: ...

    @abstractmethod
    def seed(self, session: PropagationSession, frame_index: int, mask: BinaryMask) -> None: ...

    @abstractmethod
    def run(self, session: PropagationSession, start: int, stop: int) -> list[BinaryMask]:
        """Masks for frames start..stop inclusive; the seeded frame returns the seed."""

    def close(self, session: PropagationSession) -> None:
        session.closed = True


@dataclass(frozen=True)
class Backends:
    """The three agents bundled for a pipeline run."""

    selector: KeyframeSelector
    segmenter: ImageSegmenter
    propagator: VideoPropagator


def check_seed_args(session: PropagationSession, frame_index: int, mask: BinaryMask) -> None:
    """Shared validation for seeding: index in range, dimensions match."""
    total = len(session.source)
    if not 1 <= frame_index <= total:
        raise SessionUsageError(
            f"{session.session_id}: seed frame {frame_index} outside clip range 1..{total}"
        )
    if (mask.width, mask.height) != (session.source.width, session.source.height):
        raise SessionUsageError(
            f"{session.session_id}: seed mask {mask.width}x{mask.height} does not match "
            f"clip {session.source.width}x{session.source.height}"
        )


def check_run_args(session: PropagationSession, start: int, stop: int) -> None:
    """Shared validation for run ranges."""
    session.require_seeded()
    total = len(session.source)
    if not (1 <= start <= stop <= total):
        raise SessionUsageError(
            f"{session.session_id}: run range {start}..{stop} invalid for clip of length {total}"
        )
