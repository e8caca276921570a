"""Project configuration: file-based with environment overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from .model import Actor, Role

ENV_STORAGE = "DUPLA_STORAGE_PATH"
ENV_TERMINOLOGY = "DUPLA_TERMINOLOGY"
ENV_SEED = "DUPLA_SEED"


class ConfigError(Exception):
    """Raised for malformed project configuration."""


@dataclass
class ActorAccount:
    actor: Actor
    token: str
    expires: Optional[datetime] = None

    def expired(self) -> bool:
        return self.expires is not None and datetime.now(timezone.utc) >= self.expires


@dataclass
class ProjectConfig:
    storage_path: str = "dupla.db"
    registry_path: Optional[str] = None  # None -> built-in table
    terminology: Optional[str] = None  # file path or http(s):// URL
    variant: str = "strict"
    threshold: float = 0.67
    epsilon: float = 0.02
    seed: int = 0
    stale_after_round: Optional[int] = None
    accounts: list[ActorAccount] = field(default_factory=list)

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError(f"threshold must be within [0, 1], got {self.threshold}")
        if self.epsilon < 0:
            raise ConfigError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.variant not in ("strict", "lenient", "flexible", "relaxed"):
            raise ConfigError(f"unknown agreement variant: {self.variant!r}")
        tokens = [account.token for account in self.accounts]
        if len(tokens) != len(set(tokens)):
            raise ConfigError("actor tokens must be unique")


def load_config(path: str | Path) -> ProjectConfig:
    """Read a JSON config file and apply environment overrides."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text("utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> ProjectConfig:
    accounts = []
    for entry in raw.get("actors", []):
        try:
            actor = Actor(
                id=entry["id"],
                name=entry.get("name", entry["id"]),
                role=Role(entry["role"]),
                profile=entry.get("profile", ""),
            )
            expires = entry.get("expires")
            accounts.append(
                ActorAccount(
                    actor=actor,
                    token=entry["token"],
                    expires=datetime.fromisoformat(expires) if expires else None,
                )
            )
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad actor entry {entry!r}: {exc}") from exc
    config = ProjectConfig(
        storage_path=raw.get("storage", "dupla.db"),
        registry_path=raw.get("registry"),
        terminology=raw.get("terminology"),
        variant=raw.get("variant", "strict"),
        threshold=raw.get("threshold", 0.67),
        epsilon=raw.get("epsilon", 0.02),
        seed=raw.get("seed", 0),
        stale_after_round=raw.get("stale_after_round"),
        accounts=accounts,
    )
    if os.environ.get(ENV_STORAGE):
        config.storage_path = os.environ[ENV_STORAGE]
    if os.environ.get(ENV_TERMINOLOGY):
        config.terminology = os.environ[ENV_TERMINOLOGY]
    if os.environ.get(ENV_SEED):
        try:
            config.seed = int(os.environ[ENV_SEED])
        except ValueError as exc:
            raise ConfigError(f"{ENV_SEED} must be an integer") from exc
    return config
