import json

import pytest

from labbridge.config import BridgeConfig, ConfigError, load_config
from labbridge.templates import DEFAULT_TEMPLATES


def test_defaults_are_valid_and_offline():
    config = BridgeConfig()
    assert config.backend_url == ""
    assert config.templates == DEFAULT_TEMPLATES
    assert config.max_in_flight >= 1


def test_missing_template_role_is_rejected():
    templates = dict(DEFAULT_TEMPLATES)
    del templates["verify"]
    with pytest.raises(ConfigError):
        BridgeConfig(templates=templates)


def test_unknown_template_role_is_rejected():
    templates = dict(DEFAULT_TEMPLATES)
    templates["policy"] = "[NUMBER] [PRIMITIVE]"
    with pytest.raises(ConfigError):
        BridgeConfig(templates=templates)


def test_template_without_its_slots_is_rejected():
    templates = dict(DEFAULT_TEMPLATES)
    templates["verify"] = "Did step [NUMBER] finish? Reply Y or N."  # no [PRIMITIVE]
    with pytest.raises(ConfigError) as info:
        BridgeConfig(templates=templates)
    assert "[PRIMITIVE]" in str(info.value)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"timeout_s": 0.0},
        {"timeout_s": -1.0},
        {"max_retries": -1},
        {"max_in_flight": 0},
    ],
)
def test_bad_numbers_are_rejected(kwargs):
    with pytest.raises(ConfigError):
        BridgeConfig(**kwargs)


def test_load_config_without_a_file_gives_defaults():
    assert load_config(None) == BridgeConfig()


def test_load_config_overlays_the_file(tmp_path):
    path = tmp_path / "bridge.json"
    path.write_text(
        json.dumps(
            {
                "backend_url": "http://127.0.0.1:9000",
                "model": "bench-vlm",
                "timeout_s": 5,
                "templates": {"verify": "Step [NUMBER], [PRIMITIVE]: Y or N?"},
            }
        )
    )
    config = load_config(path)
    assert config.backend_url == "http://127.0.0.1:9000"
    assert config.model == "bench-vlm"
    assert config.timeout_s == 5.0
    assert config.templates["verify"] == "Step [NUMBER], [PRIMITIVE]: Y or N?"
    # untouched roles keep their defaults
    assert config.templates["plan"] == DEFAULT_TEMPLATES["plan"]


def test_load_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "bridge.json"
    path.write_text(json.dumps({"backend": "http://x"}))
    with pytest.raises(ConfigError):
        load_config(path)


def test_load_config_rejects_wrong_types(tmp_path):
    path = tmp_path / "bridge.json"
    path.write_text(json.dumps({"max_retries": "two"}))
    with pytest.raises(ConfigError):
        load_config(path)


def test_load_config_rejects_bad_json_and_missing_files(tmp_path):
    path = tmp_path / "bridge.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(path)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.json")


def test_load_config_rejects_non_object_documents(tmp_path):
    path = tmp_path / "bridge.json"
    path.write_text(json.dumps(["not", "an", "object"]))
    with pytest.raises(ConfigError):
        load_config(path)
