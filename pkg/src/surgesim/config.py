import abc
import logging
import os
from typing import Optional, Self

from pydantic import BaseModel, ConfigDict, Field

__all__ = [
    'Environment',
    'SurgeSimEnv',
]


class Environment(abc.ABC, BaseModel):
    """Base class for configuration read from environment variables.

    Each declared field is loaded from the variable of the same name unless it is
    passed explicitly, in which case the explicit value wins.

    Example::

        class RunnerEnv(Environment):
            RUNNER_WORKERS: int = 1

        # with RUNNER_WORKERS=4 exported
        RunnerEnv().RUNNER_WORKERS                  # 4
        RunnerEnv(RUNNER_WORKERS=2).RUNNER_WORKERS  # 2
    """
    model_config = ConfigDict(extra='allow')

    def __init__(self, **kwargs):
        super().__init__(**self.__load(**kwargs))

    def __load(self, **kwargs) -> dict:
        return {
            var: value
            for var in self.__class__.model_fields
            if (value := kwargs.get(var, os.getenv(var))) is not None
        }

    def setvars(self) -> Self:
        """Exports the non-empty fields back into ``os.environ``.

        Worker processes spawned afterwards see the same configuration.
        """
        for var in self.__class__.model_fields:
            if (value := getattr(self, var)) is not None:
                os.environ[var] = str(value)

        return self


class SurgeSimEnv(Environment):
    """Process-level knobs; none of them is required.

    Attributes:
        SURGESIM_LOG_LEVEL (str): Root log level name.
        SURGESIM_LOG_PREFIX (Optional[str]): Prefix placed before each JSON log line.
        SURGESIM_WORKERS (int): Process pool size used by sweeps and heatmaps;
            1 keeps every cell in-process.
    """
    SURGESIM_LOG_LEVEL: str = 'INFO'
    SURGESIM_LOG_PREFIX: Optional[str] = None
    SURGESIM_WORKERS: int = Field(1, ge=1)

    @property
    def log_level(self) -> int:
        return logging.getLevelNamesMapping().get(
            self.SURGESIM_LOG_LEVEL.upper(), logging.INFO
        )
