from .base import (
    Backends,
    FrameSource,
    ImageSegmenter,
    KeyframeSelector,
    PropagationSession,
    SelectorConfig,
    VideoPropagator,
)
from .mock import (
    MockPropagator,
    MockScenario,
    MockSegmenter,
    MockSelector,
    load_mock_scenarios,
    parse_rect_spec,
    rect_mask,
    translate_mask,
)
from .wire import HttpPropagator, HttpSegmenter, OpenAiSelector

__all__ = [
    "Backends",
    "FrameSource",
    "ImageSegmenter",
    "KeyframeSelector",
    "PropagationSession",
    "SelectorConfig",
    "VideoPropagator",
    "MockPropagator",
    "MockScenario",
    "MockSegmenter",
    "MockSelector",
    "load_mock_scenarios",
    "parse_rect_spec",
    "rect_mask",
    "translate_mask",
    "HttpPropagator",
    "HttpSegmenter",
    "OpenAiSelector",
]
