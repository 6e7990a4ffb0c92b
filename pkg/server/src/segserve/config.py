"""Server configuration from environment variables (prefix SEGSERVE_)."""

from __future__ import annotations

import os
from dataclasses import dataclass


@dataclass(frozen=True)
class ServerConfig:
    mode: str = "mock"  # "mock" | "real"
    mock_velocity: tuple[int, int] = (1, 0)
    session_ttl_seconds: float = 600.0
    # Import paths "module:attr" for real-model adapter factories.
    real_segmenter: str = ""
    real_propagator: str = ""

    def __post_init__(self):
        if self.mode not in ("mock", "real"):
            raise ValueError(f"mode must be 'mock' or 'real', got {self.mode!r}")
        if self.session_ttl_seconds <= 0:
            raise ValueError("session_ttl_seconds must be positive")


def config_from_env(environ=None) -> ServerConfig:
    env = os.environ if environ is None else environ
    velocity = env.get("SEGSERVE_VELOCITY", "1,0").split(",")
    return ServerConfig(
        mode=env.get("SEGSERVE_MODE", "mock"),
        mock_velocity=(int(velocity[0]), int(velocity[1])),
        session_ttl_seconds=float(env.get("SEGSERVE_SESSION_TTL", "600")),
        real_segmenter=env.get("SEGSERVE_REAL_SEGMENTER", ""),
        real_propagator=env.get("SEGSERVE_REAL_PROPAGATOR", ""),
    )
