import logging
from typing import Optional

from pydantic import BaseSettings, validator

from .constants import ENV_PREFIX
from .errors import InvalidParameter

__all__ = ("Settings",)


class Settings(BaseSettings):
    """Process-wide options read from `UNMIX_*` environment variables."""

    threads: Optional[int] = None
    log_level: str = "WARNING"

    class Config:
        env_prefix = ENV_PREFIX

    @validator("threads")
    def check_threads(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < 1:
            raise InvalidParameter("threads", value, "must be at least 1")

        return value

    @validator("log_level")
    def normalize_log_level(cls, value: str) -> str:
        level: str = value.upper()

        if not isinstance(logging.getLevelName(level), int):
            raise InvalidParameter("log_level", value, "unknown logging level")

        return level
