"""STITKIT configuration - environment-driven defaults for search, fuzzing and the CLI."""

from __future__ import annotations

from pathlib import Path

from pydantic import Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

_PROJECT_ROOT = Path(__file__).parent


class StitkitSettings(BaseSettings):
    """STITKIT configuration. Every field can be overridden with a STITKIT_* variable."""

    model_config = SettingsConfigDict(
        env_prefix="STITKIT_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # --- Identity ---
    app_name: str = "STITKIT"
    app_version: str = "0.1.0"

    # --- Paths (computed from project root) ---
    stitkit_root: Path = _PROJECT_ROOT
    data_dir: Path = _PROJECT_ROOT / "data"

    # --- Determinism ---
    seed: int = 0

    # --- Bounded search ---
    max_states: int = Field(default=5, gt=0)
    agent_count: int = Field(default=2, gt=0)
    atom_count: int = Field(default=2, gt=0)
    max_seconds: float = Field(default=120.0, gt=0)

    # --- Fuzzing ---
    fuzz_models: int = Field(default=500, gt=0)
    fuzz_formula_depth: int = Field(default=2, ge=0)
    fuzz_formulas_per_schema: int = Field(default=3, gt=0)
    workers: int = Field(default=4, gt=0)

    # --- Output ---
    log_level: str = "WARNING"
    report_indent: int = 2

    @model_validator(mode="after")
    def _normalize_log_level(self):
        self.log_level = self.log_level.upper()
        return self

    @property
    def examples_dir(self) -> Path:
        return self.data_dir / "examples"


# Singleton
settings = StitkitSettings()
