"""Tests for environment-driven settings."""

import pytest
from pydantic import ValidationError

from config import StitkitSettings, settings


class TestSettings:
    def test_defaults(self, monkeypatch):
        for name in ("STITKIT_SEED", "STITKIT_MAX_STATES", "STITKIT_LOG_LEVEL"):
            monkeypatch.delenv(name, raising=False)
        config = StitkitSettings(_env_file=None)
        assert config.seed == 0
        assert config.max_states == 5
        assert config.fuzz_models == 500
        assert config.log_level == "WARNING"

    def test_environment_overrides(self, monkeypatch):
        monkeypatch.setenv("STITKIT_SEED", "17")
        monkeypatch.setenv("STITKIT_MAX_STATES", "3")
        config = StitkitSettings(_env_file=None)
        assert config.seed == 17
        assert config.max_states == 3

    def test_log_level_is_uppercased(self, monkeypatch):
        monkeypatch.setenv("STITKIT_LOG_LEVEL", "debug")
        assert StitkitSettings(_env_file=None).log_level == "DEBUG"

    def test_bounds_are_validated(self, monkeypatch):
        monkeypatch.setenv("STITKIT_MAX_STATES", "0")
        with pytest.raises(ValidationError):
            StitkitSettings(_env_file=None)

    def test_examples_dir(self):
        assert settings.examples_dir == settings.data_dir / "examples"
        assert (settings.examples_dir / "f1.json").exists()
