"""Engine/service configuration: one JSON document plus environment
overrides of the form ``TRUSTBENCH_<SECTION>_<KEY>``."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .errors import ConfigParseError
from .gating import DEFAULT_PRIOR_WEIGHT, GatingThresholds
from .model import FallbackPolicy

ENV_PREFIX = "TRUSTBENCH_"


@dataclass
class ServerConfig:
    host: str = "127.0.0.1"
    port: int = 8420
    token: str = "change-me"
    cors_origin: str = "*"


@dataclass
class JudgeConfig:
    endpoint: str = ""
    model: str = ""
    deadline_ms: int = 30_000


@dataclass
class EngineConfig:
    prior_weight: float = DEFAULT_PRIOR_WEIGHT
    thresholds: GatingThresholds = field(default_factory=GatingThresholds)
    fallback_policy: FallbackPolicy = FallbackPolicy.CONSERVATIVE_FLOOR
    pending_ttl_minutes: int = 15


@dataclass
class PathsConfig:
    plugins_dir: str = "plugins"
    profiles_dir: str = "profiles"
    decision_log: str = "decisions.jsonl"


@dataclass
class Config:
    server: ServerConfig = field(default_factory=ServerConfig)
    judge: JudgeConfig = field(default_factory=JudgeConfig)
    engine: EngineConfig = field(default_factory=EngineConfig)
    paths: PathsConfig = field(default_factory=PathsConfig)


def _env_overrides() -> dict[str, dict[str, str]]:
    out: dict[str, dict[str, str]] = {}
    for key, value in os.environ.items():
        if not key.startswith(ENV_PREFIX):
            continue
        rest = key[len(ENV_PREFIX):].lower()
        section, _, name = rest.partition("_")
        if section and name:
            out.setdefault(section, {})[name] = value
    return out


def load_config(path: Optional[str | Path] = None) -> Config:
    doc: dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigParseError(f"config file not found: {path}")
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigParseError(f"config {path} is not valid JSON: {exc}") from exc

    for section, values in _env_overrides().items():
        doc.setdefault(section, {}).update(values)

    try:
        server_doc = doc.get("server") or {}
        judge_doc = doc.get("judge") or {}
        engine_doc = doc.get("engine") or {}
        paths_doc = doc.get("paths") or {}
        thresholds_doc = engine_doc.get("thresholds") or {}
        return Config(
            server=ServerConfig(
                host=str(server_doc.get("host", "127.0.0.1")),
                port=int(server_doc.get("port", 8420)),
                token=str(server_doc.get("token", "change-me")),
                cors_origin=str(server_doc.get("cors_origin", "*")),
            ),
            judge=JudgeConfig(
                endpoint=str(judge_doc.get("endpoint", "")),
                model=str(judge_doc.get("model", "")),
                deadline_ms=int(judge_doc.get("deadline_ms", 30_000)),
            ),
            engine=EngineConfig(
                prior_weight=float(engine_doc.get("prior_weight", DEFAULT_PRIOR_WEIGHT)),
                thresholds=GatingThresholds(
                    block_below=float(thresholds_doc.get("block_below", 0.40)),
                    confirm_below=float(thresholds_doc.get("confirm_below", 0.60)),
                    warn_below=float(thresholds_doc.get("warn_below", 0.80)),
                ),
                fallback_policy=FallbackPolicy(
                    engine_doc.get(
                        "fallback_policy", FallbackPolicy.CONSERVATIVE_FLOOR.value
                    )
                ),
                pending_ttl_minutes=int(engine_doc.get("pending_ttl_minutes", 15)),
            ),
            paths=PathsConfig(
                plugins_dir=str(paths_doc.get("plugins_dir", "plugins")),
                profiles_dir=str(paths_doc.get("profiles_dir", "profiles")),
                decision_log=str(paths_doc.get("decision_log", "decisions.jsonl")),
            ),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigParseError(f"invalid config value: {exc}") from exc
