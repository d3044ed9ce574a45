import pytest
import yaml

from trustcheck import settings as to_test


def test_load_defaults():
    settings = to_test.load_settings()
    assert settings == to_test.Settings()
    assert settings.belief_asmas_depth == 4
    raw = to_test.load_settings(raw=True)
    assert raw["simulate"] == {"steps": 6, "seed": 0}
    assert raw["sink_completion"] in to_test.SINK_COMPLETION_MODES


def test_load_path(tmp_path):
    path = tmp_path / "settings.yaml"
    path.write_text(yaml.safe_dump({"belief_nesting_depth": 3, "simulate": {"seed": 42}}))
    settings = to_test.load_settings(str(path))
    assert settings.belief_nesting_depth == 3
    assert settings.simulate_seed == 42
    assert settings.simulate_steps == 6


@pytest.mark.parametrize(
    "settings_dict",
    [
        {"unknown": 1},
        {"belief_nesting_depth": "2"},
        {"strict_deterministic": 1},
        {"belief_nesting_depth": True},
        {"simulate": 6},
        {"simulate": {"rounds": 6}},
        {"sink_completion": "drop"},
        {"belief_nesting_depth": -1},
    ],
)
def test_validate_settings_rejects(settings_dict):
    try:
        to_test.validate_settings(settings_dict)
    except UserWarning:
        pass
    else:
        raise AssertionError(f"{settings_dict} should not validate")


def test_override():
    settings = to_test.Settings()
    assert settings.override(simulate_seed=None) == settings
    assert settings.override(simulate_seed=7).simulate_seed == 7
    assert settings.simulate_seed == 0
