import logging
from functools import lru_cache
from typing import ClassVar
from pathlib import Path
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict
from boundtransport.common.constants import LogLevel


class Configs(BaseSettings):
    BASE_DIR: ClassVar = Path(__file__).resolve().parent.parent
    model_config = SettingsConfigDict(
        env_file=BASE_DIR / ".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    BT_LOG: LogLevel = Field(LogLevel.INFO, json_schema_extra={"env": "BT_LOG"})
    BT_THREADS: int = Field(1, ge=1, json_schema_extra={"env": "BT_THREADS"})
    BT_OUTPUT_DIR: Path = Field(
        Path("results"), json_schema_extra={"env": "BT_OUTPUT_DIR"}
    )

    @property
    def log_level(self) -> int:
        return {
            LogLevel.ERROR: logging.ERROR,
            LogLevel.INFO: logging.INFO,
            LogLevel.DEBUG: logging.DEBUG,
        }[self.BT_LOG]


@lru_cache
def get_configs() -> Configs:
    """Get cached settings instance."""
    return Configs()  # type: ignore


config = get_configs()
