import pytest

from ace import errors
from ace.config import DEFAULTS, Config, load_config, split_bind_addr

TOML = """\
[llm]
mode = "record"
base_url = "http://mirror.local/v1"
model = "test-model"

[store]
path = "/tmp/elsewhere"

[server]
bind = "0.0.0.0:9000"
"""


def test_defaults(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)  # no ace.toml around
    config = load_config(env={})
    assert config == Config(**DEFAULTS)
    assert config.mode == "replay"
    assert config.fixtures_dir == "./fixtures"


def test_toml_layer(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "ace.toml").write_text(TOML)
    config = load_config(env={})
    assert config.mode == "record"
    assert config.base_url == "http://mirror.local/v1"
    assert config.store_path == "/tmp/elsewhere"
    assert config.bind_addr == "0.0.0.0:9000"
    assert config.api_key == ""  # untouched layers keep defaults


def test_env_overrides_toml(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "ace.toml").write_text(TOML)
    config = load_config(env={"ACE_LLM_MODE": "replay", "ACE_STORE_PATH": "./s"})
    assert config.mode == "replay"
    assert config.store_path == "./s"
    assert config.base_url == "http://mirror.local/v1"


def test_flags_override_env(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    config = load_config(
        overrides={"mode": "record", "store_path": None},
        env={"ACE_LLM_MODE": "live", "ACE_STORE_PATH": "./from-env"},
    )
    assert config.mode == "record"
    assert config.store_path == "./from-env"  # None override is ignored


def test_empty_env_value_ignored(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    config = load_config(env={"ACE_LLM_MODE": ""})
    assert config.mode == "replay"


def test_explicit_config_file(tmp_path):
    path = tmp_path / "custom.toml"
    path.write_text(TOML)
    config = load_config(env={}, config_file=str(path))
    assert config.mode == "record"
    with pytest.raises(errors.ConfigError):
        load_config(env={}, config_file=str(tmp_path / "missing.toml"))


def test_bad_toml_rejected(tmp_path):
    path = tmp_path / "broken.toml"
    path.write_text("[llm\nmode=")
    with pytest.raises(errors.ConfigError):
        load_config(env={}, config_file=str(path))
    path.write_text("[llm]\nmode = 3\n")
    with pytest.raises(errors.ConfigError):
        load_config(env={}, config_file=str(path))


def test_invalid_mode_rejected(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    with pytest.raises(errors.ConfigError):
        load_config(env={"ACE_LLM_MODE": "cached"})
    with pytest.raises(errors.ConfigError):
        load_config(overrides={"mode": "offline"}, env={})


def test_unknown_override_rejected(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    with pytest.raises(errors.ConfigError):
        load_config(overrides={"verbosity": "high"}, env={})


def test_split_bind_addr():
    assert split_bind_addr("127.0.0.1:8756") == ("127.0.0.1", 8756)
    assert split_bind_addr("[::1]:90") == ("[::1]", 90)
    for bad in ("localhost", "host:", ":port", "host:abc"):
        with pytest.raises(errors.ConfigError):
            split_bind_addr(bad)
