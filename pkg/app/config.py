import json
from functools import lru_cache
from pathlib import Path
from typing import Tuple, Union

from pydantic import ValidationError
from pydantic_settings import BaseSettings

from app.exceptions import ConfigError, ResultIOError
from app.models import CampaignConfig


class Settings(BaseSettings):
    # Application
    app_name: str = "ICS Fuzz - Ignored Collision Scenario Fuzzer"
    app_version: str = "1.0.0"

    # Campaign execution
    output_dir: str = "results"
    workers: int = 1

    # Logging
    log_level: str = "INFO"

    class Config:
        env_file = ".env"
        case_sensitive = False


@lru_cache()
def get_settings() -> Settings:
    return Settings()


settings = get_settings()


def format_validation_error(exc: ValidationError) -> str:
    """One `field.path: message` line per pydantic error"""
    lines = []
    for error in exc.errors():
        location = ".".join(str(part) for part in error["loc"]) or "<root>"
        lines.append(f"{location}: {error['msg']}")
    return "\n".join(lines)


def load_campaign_config(path: Union[str, Path]) -> Tuple[CampaignConfig, bytes]:
    """Read and validate a campaign config file, returning the raw bytes for digesting"""
    config_path = Path(path)
    try:
        raw = config_path.read_bytes()
    except OSError as e:
        raise ResultIOError(f"Cannot read config {config_path}: {e}") from e

    try:
        document = json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as e:
        raise ConfigError(f"{config_path}: not UTF-8 text ({e})") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{config_path}:{e.lineno}:{e.colno}: {e.msg}") from e

    try:
        config = CampaignConfig.model_validate(document)
    except ValidationError as e:
        raise ConfigError(f"{config_path}: invalid campaign config\n{format_validation_error(e)}") from e

    return config, raw
