"""Service configuration: defaults, config file, environment, CLI overrides.

Precedence, lowest to highest: built-in defaults, JSON config file,
ARCHIVESEARCH_* environment variables, CLI flags. Startup validates that
every referenced data file exists and fails fast naming the missing path.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError

ENV_PREFIX = "ARCHIVESEARCH_"


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    languages: tuple[str, ...] = ("en", "de")
    provider: str = "fixture"  # fixture | live
    provider_endpoint: str = ""
    archive_endpoint: str = "http://127.0.0.1:9009/cdx"
    archive_replay_template: str = "https://web.archive.org/web/{timestamp}/{url}"
    data_dir: Path = Path("data")
    cache_path: Path = Path("cache.db")
    static_dir: Path | None = None
    timeout_seconds: float = 5.0
    archive_concurrency: int = 4
    refresh_interval_days: int = 30
    seed_list_path: Path | None = None
    suggest_limit: int = 10
    related_limit: int = 8

    def entities_path(self, language: str) -> Path:
        return self.data_dir / f"entities.{language}.tsv"

    def views_path(self, language: str) -> Path:
        return self.data_dir / f"views.{language}.tsv"

    def links_path(self, language: str) -> Path:
        return self.data_dir / f"links.{language}.tsv"

    def interlang_path(self) -> Path:
        return self.data_dir / "interlang.tsv"

    def results_dir(self) -> Path:
        return self.data_dir / "results"

    def validate(self) -> "ServiceConfig":
        if not self.languages:
            raise ConfigError("at least one language must be configured")
        if self.provider not in ("fixture", "live"):
            raise ConfigError(f"provider must be 'fixture' or 'live', got {self.provider!r}")
        required = [self.entities_path(lang) for lang in self.languages]
        required.extend(self.links_path(lang) for lang in self.languages)
        if self.provider == "fixture":
            required.append(self.results_dir())
        for path in required:
            if not path.exists():
                raise ConfigError(f"configured path does not exist: {path}")
        if self.static_dir is not None and not self.static_dir.exists():
            raise ConfigError(f"configured path does not exist: {self.static_dir}")
        if self.seed_list_path is not None and not self.seed_list_path.exists():
            raise ConfigError(f"configured path does not exist: {self.seed_list_path}")
        return self


_PATH_FIELDS = {"data_dir", "cache_path", "static_dir", "seed_list_path"}
_INT_FIELDS = {"port", "archive_concurrency", "refresh_interval_days", "suggest_limit",
               "related_limit"}
_FLOAT_FIELDS = {"timeout_seconds"}


def _coerce(name: str, value):
    if value is None:
        return None
    if name == "languages":
        if isinstance(value, str):
            value = [v for v in value.split(",") if v]
        return tuple(value)
    if name in _PATH_FIELDS:
        return Path(value)
    if name in _INT_FIELDS:
        return int(value)
    if name in _FLOAT_FIELDS:
        return float(value)
    return value


def load_config(
    config_path: str | Path | None = None,
    env: dict[str, str] | None = None,
    **overrides,
) -> ServiceConfig:
    """Assemble a ServiceConfig from file, environment and explicit overrides.

    ``overrides`` with value None are ignored so CLI flags can pass through
    unset options.
    """
    env = os.environ if env is None else env
    known = {f.name for f in fields(ServiceConfig)}
    values: dict = {}

    if config_path is not None:
        config_path = Path(config_path)
        if not config_path.exists():
            raise ConfigError(f"config file does not exist: {config_path}")
        try:
            loaded = json.loads(config_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {config_path} is not valid JSON: {exc}") from exc
        for name, value in loaded.items():
            if name not in known:
                raise ConfigError(f"unknown config key {name!r} in {config_path}")
            values[name] = _coerce(name, value)

    for name in known:
        env_value = env.get(ENV_PREFIX + name.upper())
        if env_value is not None:
            values[name] = _coerce(name, env_value)

    for name, value in overrides.items():
        if name not in known:
            raise ConfigError(f"unknown config override {name!r}")
        if value is not None:
            values[name] = _coerce(name, value)

    return ServiceConfig(**values)
