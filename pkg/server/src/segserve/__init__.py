"""Serving shim exposing a text-prompted image segmenter and a video mask
propagator behind a fixed wire protocol, with a mock mode that mirrors the
pipeline's deterministic mocks for conformance testing."""

__version__ = "0.1.0"

from .app import create_app
from .config import ServerConfig, config_from_env

__all__ = ["create_app", "ServerConfig", "config_from_env"]
