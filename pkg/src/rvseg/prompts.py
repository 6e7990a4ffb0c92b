"""Prompt construction for the keyframe selector.

Templates ship as versioned text assets; substitution is a single pass over
the two placeholders, so placeholder-looking text inside the query is never
re-expanded.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

_PLACEHOLDER = re.compile(r"\{num_keyframes\}|\{query\}")


def _load_asset(name: str) -> str:
    text = resources.files("rvseg").joinpath("prompt_assets", name).read_text(encoding="utf-8")
    # Assets are stored with a trailing newline; the prompt itself has none.
    return text.rstrip("\n")


@dataclass(frozen=True)
class PromptTemplate:
    mode: str  # "offline" | "online"
    template_text: str

    def render(self, *, num_keyframes: int | None = None, query: str) -> str:
        values = {"{query}": query}
        if num_keyframes is not None:
            values["{num_keyframes}"] = str(num_keyframes)

        def replace(match: re.Match) -> str:
            return values.get(match.group(0), match.group(0))

        return _PLACEHOLDER.sub(replace, self.template_text)


OFFLINE_TEMPLATE = PromptTemplate(mode="offline", template_text=_load_asset("offline_v1.txt"))
ONLINE_TEMPLATE = PromptTemplate(mode="online", template_text=_load_asset("online_v1.txt"))


def build_offline_prompt(num_keyframes: int, query: str) -> str:
    """Offline selector prompt for a grid of ``num_keyframes`` candidates."""
    if num_keyframes < 1:
        raise ValueError(f"num_keyframes must be >= 1, got {num_keyframes}")
    if not query:
        raise ValueError("query must be non-empty")
    return OFFLINE_TEMPLATE.render(num_keyframes=num_keyframes, query=query)


def build_online_prompt(query: str) -> str:
    """Per-frame binary keyframe judgment prompt."""
    if not query:
        raise ValueError("query must be non-empty")
    return ONLINE_TEMPLATE.render(query=query)
