"""Runtime configuration with precedence: CLI flag > env > ace.toml > default."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # 3.10
    import tomli as tomllib

from . import errors

DEFAULTS = {
    "mode": "replay",
    "base_url": "",
    "api_key": "",
    "model": "",
    "fixtures_dir": "./fixtures",
    "store_path": "./store",
    "bind_addr": "127.0.0.1:8756",
}

ENV_KEYS = {
    "mode": "ACE_LLM_MODE",
    "base_url": "ACE_LLM_BASE_URL",
    "api_key": "ACE_LLM_API_KEY",
    "model": "ACE_LLM_MODEL",
    "fixtures_dir": "ACE_FIXTURES_DIR",
    "store_path": "ACE_STORE_PATH",
    "bind_addr": "ACE_BIND_ADDR",
}

# ace.toml layout: [llm] mode/base_url/api_key/model/fixtures_dir,
# [store] path, [server] bind
TOML_KEYS = {
    "mode": ("llm", "mode"),
    "base_url": ("llm", "base_url"),
    "api_key": ("llm", "api_key"),
    "model": ("llm", "model"),
    "fixtures_dir": ("llm", "fixtures_dir"),
    "store_path": ("store", "path"),
    "bind_addr": ("server", "bind"),
}

MODES = ("live", "record", "replay")


@dataclass(frozen=True)
class Config:
    mode: str
    base_url: str
    api_key: str
    model: str
    fixtures_dir: str
    store_path: str
    bind_addr: str


def load_config(overrides=None, env=None, config_file=None) -> Config:
    """Resolve settings from all four layers.

    ``overrides`` holds CLI flag values (None entries ignored). When
    ``config_file`` is not given, ./ace.toml is used if present.
    """
    env = os.environ if env is None else env
    values = dict(DEFAULTS)

    path = Path(config_file) if config_file else Path("ace.toml")
    if config_file and not path.exists():
        raise errors.ConfigError(f"config file {path} not found")
    if path.exists():
        try:
            doc = tomllib.loads(path.read_text(encoding="utf-8"))
        except tomllib.TOMLDecodeError as exc:
            raise errors.ConfigError(f"bad config file {path}: {exc}")
        for name, (section, key) in TOML_KEYS.items():
            if section in doc and key in doc[section]:
                value = doc[section][key]
                if not isinstance(value, str):
                    raise errors.ConfigError(f"{section}.{key} must be a string")
                values[name] = value

    for name, env_key in ENV_KEYS.items():
        if env_key in env and env[env_key] != "":
            values[name] = env[env_key]

    for name, value in (overrides or {}).items():
        if value is not None:
            if name not in values:
                raise errors.ConfigError(f"unknown setting {name!r}")
            values[name] = value

    if values["mode"] not in MODES:
        raise errors.ConfigError(f"mode must be one of {MODES}, got {values['mode']!r}")
    return Config(**values)


def split_bind_addr(bind_addr: str):
    host, sep, port = bind_addr.rpartition(":")
    if not sep or not port.isdigit():
        raise errors.ConfigError(f"bind address must be host:port, got {bind_addr!r}")
    return host, int(port)
