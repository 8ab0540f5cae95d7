"""Configuration management for ctx-sim."""

import logging
import os
from dataclasses import asdict
from pathlib import Path
from typing import Optional

import click
import yaml

from .models import Config, FORMATS, MODES

logger = logging.getLogger(__name__)

BUDGET_ENV_VAR = "CTX_SIM_BUDGET"
BUDGET_RANGE = click.IntRange(min=1)


class ConfigManager:
    """Manages configuration loading and saving."""

    DEFAULT_CONFIG_PATH = Path.home() / ".ctx-sim" / "config.yaml"

    @classmethod
    def load_config(cls, config_path: Optional[Path] = None) -> Config:
        """Load configuration from file or create default."""
        if config_path is None:
            config_path = cls.DEFAULT_CONFIG_PATH

        config_data = {}
        if config_path.exists():
            try:
                with open(config_path, 'r') as f:
                    config_data = yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                logger.warning(f"Ignoring unreadable configuration {config_path}: {e}")
                config_data = {}
            if not isinstance(config_data, dict):
                logger.warning(f"Ignoring configuration {config_path}: expected a mapping")
                config_data = {}

        known = set(asdict(Config()))
        unknown = sorted(set(config_data) - known)
        if unknown:
            logger.warning(f"Ignoring unknown configuration keys: {', '.join(unknown)}")
        config = Config(**{k: v for k, v in config_data.items() if k in known})

        if config.default_mode not in MODES:
            logger.warning(f"Unknown default_mode {config.default_mode!r}, using probabilistic")
            config.default_mode = "probabilistic"
        if config.default_format not in FORMATS:
            logger.warning(f"Unknown default_format {config.default_format!r}, using json")
            config.default_format = "json"

        # Environment variables take precedence over config file
        budget = os.getenv(BUDGET_ENV_VAR)
        if budget:
            try:
                value = BUDGET_RANGE.convert(budget, None, None)
            except click.BadParameter as e:
                raise click.BadParameter(e.message, param_hint=BUDGET_ENV_VAR) from e
            config = config.with_budget(value)

        return config

    @classmethod
    def save_config(cls, config: Config, config_path: Optional[Path] = None) -> None:
        """Save configuration to file."""
        if config_path is None:
            config_path = cls.DEFAULT_CONFIG_PATH

        config_path.parent.mkdir(parents=True, exist_ok=True)

        with open(config_path, 'w') as f:
            yaml.dump(asdict(config), f, default_flow_style=False)

    @classmethod
    def create_default_config(cls, config_path: Optional[Path] = None) -> str:
        """Create default configuration file."""
        if config_path is None:
            config_path = cls.DEFAULT_CONFIG_PATH
        cls.save_config(Config(), config_path)
        return str(config_path)
