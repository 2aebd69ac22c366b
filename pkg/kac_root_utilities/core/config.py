"""Configuration management for Kac Root Utilities."""

import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator
from pydantic import ValidationError as PydanticValidationError

from .exceptions import ConfigurationError

DEFAULT_SEED = 20240229


def _env_flag(name: str) -> Optional[bool]:
    value = os.getenv(name)
    if value is None:
        return None
    return value.strip().lower() in ("1", "true", "yes", "on")


class Config(BaseModel):
    """Configuration settings for Kac Root Utilities."""

    # Application Configuration
    workers: int = Field(default=4, description="Number of worker threads")
    log_level: str = Field(default="INFO", description="Logging level")
    data_dir: Optional[str] = Field(default=None, description="Table cache path")
    default_seed: int = Field(default=DEFAULT_SEED, description="Master seed")

    # Output Configuration
    output_format: str = Field(default="table", description="Output format")
    verbose: bool = Field(default=False, description="Enable verbose output")
    debug: bool = Field(default=False, description="Enable debug mode")
    no_color: bool = Field(default=False, description="Disable colored output")

    @field_validator("workers")
    @classmethod
    def validate_workers(cls, v: int) -> int:
        """Clamp worker count."""
        if v < 1:
            return 1
        if v > 64:
            return 64
        return v

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level."""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in valid_levels:
            return "INFO"
        return v.upper()

    @field_validator("output_format")
    @classmethod
    def validate_output_format(cls, v: str) -> str:
        """Validate output format."""
        valid_formats = ["table", "json", "yaml", "csv"]
        if v.lower() not in valid_formats:
            return "table"
        return v.lower()

    @classmethod
    def load_config(
        cls, config_file: Optional[str] = None, **overrides: Any
    ) -> "Config":
        """Load configuration from a key=value file, the environment and flags.

        Flags passed as overrides win over the environment, which wins over
        the file.

        Raises:
            ConfigurationError: If an explicit file is missing or a value is invalid
        """
        env_files = [
            Path(".env"),
            Path.home() / ".kac-root-utilities.env",
        ]

        if config_file:
            if not Path(config_file).is_file():
                raise ConfigurationError(f"configuration file not found: {config_file}")
            env_files.insert(0, Path(config_file))

        for env_file in env_files:
            if env_file.exists():
                load_dotenv(env_file)
                break

        config_data: Dict[str, Any] = {
            "workers": os.getenv("KAC_WORKERS"),
            "log_level": os.getenv("KAC_LOG_LEVEL"),
            "data_dir": os.getenv("KAC_DATA_DIR"),
            "default_seed": os.getenv("KAC_SEED"),
            "output_format": os.getenv("KAC_OUTPUT_FORMAT"),
            "verbose": _env_flag("KAC_VERBOSE"),
            "debug": _env_flag("KAC_DEBUG"),
            "no_color": _env_flag("NO_COLOR"),
        }

        config_data.update({k: v for k, v in overrides.items() if v is not None})

        # Remove None values
        config_data = {k: v for k, v in config_data.items() if v is not None}

        try:
            return cls(**config_data)
        except PydanticValidationError as e:
            problems = "; ".join(
                f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()
            )
            raise ConfigurationError(f"invalid configuration ({problems})") from e

    def setup_logging(self) -> None:
        """Set up logging configuration."""
        log_format = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

        if self.debug:
            level = logging.DEBUG
        else:
            level = getattr(logging, self.log_level)

        logging.basicConfig(level=level, format=log_format, datefmt="%Y-%m-%d %H:%M:%S")

        # mpmath and numpy are quiet, matplotlib may be pulled in by users
        logging.getLogger("matplotlib").setLevel(logging.WARNING)

    def get_data_dir(self) -> Path:
        """Get the table cache directory."""
        if self.data_dir:
            data_dir = Path(self.data_dir)
        else:
            data_dir = Path.home() / "data" / "kac-root-utilities"

        data_dir.mkdir(parents=True, exist_ok=True)
        return data_dir

    def to_dict(self) -> Dict[str, Any]:
        """Convert configuration to dictionary."""
        return self.model_dump()

    def __str__(self) -> str:
        """String representation of configuration."""
        config_items = [
            f"workers: {self.workers}",
            f"log_level: {self.log_level}",
            f"seed: {self.default_seed}",
        ]
        if self.data_dir:
            config_items.append(f"data_dir: {self.data_dir}")
        return f"Config({', '.join(config_items)})"
