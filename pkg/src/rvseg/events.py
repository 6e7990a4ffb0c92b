"""Structured run logging: one JSON object per event.

Keeps CoT transcripts, judgments and keyframe switches machine-inspectable
alongside the human-readable log.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any, IO


class EventLog:
    """Append-only JSONL event sink; also retains events in memory."""

    def __init__(self, path: str | os.PathLike | None = None):
        self.events: list[dict[str, Any]] = []
        self._fh: IO[str] | None = None
        if path is not None:
            Path(path).parent.mkdir(parents=True, exist_ok=True)
            self._fh = open(path, "w", encoding="utf-8")

    def emit(self, event_type: str, **payload: Any) -> None:
        event = {"event": event_type, **payload}
        self.events.append(event)
        if self._fh is not None:
            self._fh.write(json.dumps(event, sort_keys=True) + "\n")
            self._fh.flush()

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __enter__(self) -> "EventLog":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()
