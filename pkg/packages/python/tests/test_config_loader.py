import pytest
from entanglement_atlas.errors import InvalidConfiguration
from entanglement_atlas.loaders.config_loader import ConfigLoader
from entanglement_atlas.settings import Settings


def test_defaults_match_settings_dataclasses():
    assert ConfigLoader.load() == Settings()


def test_user_file_overrides_defaults(tmp_path):
    path = tmp_path / "settings.yaml"
    path.write_text("explorer:\n  parallel: 4\n  monteCarlo:\n    maxDenominator: 5\nlogging:\n  level: DEBUG\n")
    settings = ConfigLoader.load(str(path))
    assert settings.explorer.parallel == 4
    assert settings.explorer.monte_carlo.max_denominator == 5
    assert settings.explorer.monte_carlo.low == -9
    assert settings.logging.level == "DEBUG"
    assert settings.verify.seed == 20220607


def test_empty_user_file_keeps_defaults(tmp_path):
    path = tmp_path / "settings.yaml"
    path.write_text("")
    assert ConfigLoader.load(str(path)) == Settings()


@pytest.mark.parametrize("content", [
    "explorer:\n  workers: 4\n",
    "explorer:\n  parallel: many\n",
    "- parallel\n",
    "explorer: [1\n",
])
def test_invalid_user_files(tmp_path, content):
    path = tmp_path / "settings.yaml"
    path.write_text(content)
    with pytest.raises(InvalidConfiguration):
        ConfigLoader.load(str(path))


def test_missing_user_file(tmp_path):
    with pytest.raises(InvalidConfiguration):
        ConfigLoader.load(str(tmp_path / "missing.yaml"))


def test_user_file_with_include(tmp_path):
    (tmp_path / "explorer.yaml").write_text("parallel: {{ workers }}\n")
    path = tmp_path / "settings.yaml"
    path.write_text("explorer: !include\n  path: explorer.yaml\n  params:\n    workers: 3\n")
    assert ConfigLoader.load(str(path)).explorer.parallel == 3


def test_merge_dict():
    merged = ConfigLoader.merge_dict({"a": {"b": 1, "c": 2}, "d": 3}, {"a": {"c": 4}, "e": 5})
    assert merged == {"a": {"b": 1, "c": 4}, "d": 3, "e": 5}
