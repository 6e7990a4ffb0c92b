"""Run configuration resolved from flags > environment > TOML file.

Endpoints and API keys may come from the environment; everything else
lives in the config file or on the command line. Unknown keys in the file
are rejected at startup.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .backends.base import SelectorConfig
from .errors import ConfigError

ENV_PREFIX = "RVSEG_"
ENV_KEYS = {
    "RVSEG_SELECTOR_ENDPOINT": ("selector", "endpoint"),
    "RVSEG_SELECTOR_API_KEY": ("selector", "api_key"),
    "RVSEG_SELECTOR_MODEL": ("selector", "model"),
    "RVSEG_SEGMENTER_ENDPOINT": (None, "segmenter_endpoint"),
    "RVSEG_PROPAGATOR_ENDPOINT": (None, "propagator_endpoint"),
}


@dataclass(frozen=True)
class CliConfig:
    candidate_target: int = 8
    grid_side_cap: int = 1024
    online_xi: int = 4
    worker_limit: int = 4
    log_level: str = "info"
    backend_mode: str = "mock"  # "mock" | "wire"
    non_overlap: bool = True
    segmenter_endpoint: str = ""
    propagator_endpoint: str = ""
    mock_fixture: str = ""  # path to a scenario JSON; empty = built-in set
    mock_scenario: str = "two-rects"
    selector: SelectorConfig = field(default_factory=SelectorConfig)

    def __post_init__(self):
        if self.backend_mode not in ("mock", "wire"):
            raise ConfigError(f"backend_mode must be 'mock' or 'wire', got {self.backend_mode!r}")
        if self.candidate_target < 1 or self.online_xi < 1 or self.worker_limit < 1:
            raise ConfigError("candidate_target, online_xi and worker_limit must be >= 1")


_TOP_LEVEL = {f.name for f in fields(CliConfig)} - {"selector"}
_SELECTOR_KEYS = {f.name for f in fields(SelectorConfig)}


def _reject_unknown(section: str, data: Mapping[str, Any], allowed: set[str]) -> None:
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"unknown {section} config keys: {', '.join(unknown)}")


def load_config_file(path: str | os.PathLike) -> dict[str, Any]:
    """Parse and validate a TOML config file into a flat override dict."""
    raw = Path(path).read_bytes()
    try:
        data = tomllib.loads(raw.decode("utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: invalid TOML: {exc}") from exc
    selector = data.pop("selector", {})
    if not isinstance(selector, dict):
        raise ConfigError(f"{path}: [selector] must be a table")
    _reject_unknown("top-level", data, _TOP_LEVEL)
    _reject_unknown("[selector]", selector, _SELECTOR_KEYS)
    if selector:
        data["selector"] = selector
    return data


def _env_overrides(environ: Mapping[str, str]) -> dict[str, Any]:
    overrides: dict[str, Any] = {}
    selector: dict[str, Any] = {}
    for key, (section, name) in ENV_KEYS.items():
        if key in environ and environ[key]:
            if section == "selector":
                selector[name] = environ[key]
            else:
                overrides[name] = environ[key]
    if selector:
        overrides["selector"] = selector
    return overrides


def _merge(base: dict[str, Any], override: Mapping[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if key == "selector" and isinstance(value, Mapping):
            inner = dict(merged.get("selector", {}))
            inner.update(value)
            merged["selector"] = inner
        else:
            merged[key] = value
    return merged


def resolve_config(
    file_path: str | os.PathLike | None = None,
    flag_overrides: Mapping[str, Any] | None = None,
    environ: Mapping[str, str] | None = None,
) -> CliConfig:
    """Build the effective config with precedence flags > env > file."""
    environ = os.environ if environ is None else environ
    merged: dict[str, Any] = {}
    if file_path is not None:
        merged = _merge(merged, load_config_file(file_path))
    merged = _merge(merged, _env_overrides(environ))
    if flag_overrides:
        cleaned = {k: v for k, v in flag_overrides.items() if v is not None}
        merged = _merge(merged, cleaned)

    selector_data = merged.pop("selector", {})
    try:
        selector = SelectorConfig(**selector_data)
        return CliConfig(selector=selector, **merged)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc
