"""In-memory propagation sessions with an idle TTL.

Frames are held decoded. Each session carries its own lock so concurrent
requests against one session serialize while distinct sessions proceed in
parallel; expired sessions are reaped lazily on store access.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field

import numpy as np


@dataclass
class Session:
    session_id: str
    frames: list[np.ndarray]
    seed_index: int | None = None
    seed_bits: np.ndarray | None = None
    last_access: float = field(default_factory=time.monotonic)
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def width(self) -> int:
        return self.frames[0].shape[1]

    @property
    def height(self) -> int:
        return self.frames[0].shape[0]


class SessionStore:
    def __init__(self, ttl_seconds: float = 600.0):
        self.ttl = ttl_seconds
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def _reap(self) -> None:
        now = time.monotonic()
        dead = [sid for sid, s in self._sessions.items() if now - s.last_access > self.ttl]
        for sid in dead:
            del self._sessions[sid]

    def create(self, frames: list[np.ndarray]) -> Session:
        session = Session(session_id=uuid.uuid4().hex, frames=frames)
        with self._lock:
            self._reap()
            self._sessions[session.session_id] = session
        return session

    def get(self, session_id: str) -> Session | None:
        with self._lock:
            self._reap()
            session = self._sessions.get(session_id)
            if session is not None:
                session.last_access = time.monotonic()
            return session

    def delete(self, session_id: str) -> bool:
        with self._lock:
            return self._sessions.pop(session_id, None) is not None

    def __len__(self) -> int:
        with self._lock:
            self._reap()
            return len(self._sessions)
