"""
Structured, context-aware logging for simulation runs.

Every scenario run, sweep cell or heatmap cell logs under a scoped context whose key
items (scenario name, model, seed, swept value, ...) are appended to all log messages
emitted inside that scope and dropped again when the scope exits. Messages are
formatted as JSON lines so run logs can be filtered by key.

Basic usage::

    import logging
    from surgesim import logutils

    logutils.enable_log_context()
    logger = logging.getLogger(__name__)

    with logutils.logcontext() as lc:
        lc.set(scenario='spill-over', model='theory')
        logger.info('converged')

produces (some keys omitted)::

    {"message": "converged", "scenario": "spill-over", "model": "theory", "level": "INFO", ...}

Scopes nest: an inner scope sees its parent's items, may override them, and the
parent's values are restored when the inner scope exits. Contexts live in
``contextvars``, so threads start with an empty context while worker processes
rebuild theirs from the task arguments.
"""
import logging
from contextvars import ContextVar
from contextlib import AbstractContextManager, ContextDecorator
from typing import Optional, Self

import pythonjsonlogger.json as json_logger
from pythonjsonlogger.core import RESERVED_ATTRS

__all__ = [
    'logcontext',
    'enable_log_context',
    'set_log_context',
    'unset_log_context'
]


_LOG_CONTEXT = ContextVar('log-context', default={})
_LOG_CONTEXT_MGR = ContextVar('log-context-mgr')


class _ContextLogFilter(logging.Filter):
    """
    Appends the current log context key items to each LogRecord.
    """
    def filter(self, record: logging.LogRecord) -> bool:
        for key, value in _LOG_CONTEXT.get().items():
            record.__dict__[key] = value
        return True


_CONTEXT_LOG_FILTER = _ContextLogFilter()


def enable_log_context(
        level: int | str = logging.INFO,
        log_prefix: Optional[str] = None
):
    """
    Installs JSON formatting and the context filter on the root logger.

    Call once from the entry point before any simulation logs. Existing handlers are
    reused (and reformatted); a stream handler is added when there is none.

    Args:
        level (int | str): Root logger level.
        log_prefix (Optional[str]): Optional prompt-like prefix placed before the JSON
            message, delimited by a colon.
    """
    json_formatter = json_logger.JsonFormatter(
        "%(name) %(levelname) %(asctime) %(message) %(funcName) %(lineno)",
        rename_fields={
            'levelname': 'level',
            'asctime': 'time',
            'funcName': 'func',
        },
        json_ensure_ascii=False,
        prefix=f"{log_prefix}: " if log_prefix else '',
        reserved_attrs=RESERVED_ATTRS + ['taskName']
    )
    logger = logging.getLogger()
    logger.setLevel(level)
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(json_formatter)
        handler.addFilter(_CONTEXT_LOG_FILTER)
        logger.addHandler(handler)
        return

    for handler in logger.handlers:
        if not any(isinstance(f, _ContextLogFilter) for f in handler.filters):
            handler.addFilter(_CONTEXT_LOG_FILTER)

        if not isinstance(handler.formatter, json_logger.JsonFormatter):
            handler.setFormatter(json_formatter)


class logcontext(AbstractContextManager, ContextDecorator):
    """
    Local scope for log key items, usable as a context manager or a decorator.

    Example::

        @logcontext()
        def run_cell(value):
            set_log_context(sweep_value=value)
            ...

        with logcontext() as lc:
            lc.set(seed=7)
    """
    def __enter__(self) -> Self:
        self._previous_mgr_token = _LOG_CONTEXT_MGR.set(self)
        self._log_context = _LOG_CONTEXT.get().copy()
        self._previous_ctx_token = _LOG_CONTEXT.set(self._log_context)
        return self

    def __exit__(self, __exc_type, __exc_value, __traceback):
        _LOG_CONTEXT.reset(self._previous_ctx_token)
        _LOG_CONTEXT_MGR.reset(self._previous_mgr_token)

    def items(self) -> dict:
        return self._log_context.copy()

    def set(self, **kwargs):
        """
        Sets key items for the current scope; ``None`` values are ignored.
        """
        for key, value in kwargs.items():
            if value is not None:
                self._log_context[key] = value

    def unset(self, *args):
        """
        Removes key items from the current scope only.
        """
        for key in args:
            self._log_context.pop(key, None)


def set_log_context(**kwargs):
    """
    Sets key items into the innermost active log context.

    See:
        logcontext::set
    """
    ctx_mgr: logcontext = _LOG_CONTEXT_MGR.get()
    ctx_mgr.set(**kwargs)


def unset_log_context(*args):
    """
    Removes key items from the innermost active log context.

    See:
        logcontext::unset
    """
    ctx_mgr: logcontext = _LOG_CONTEXT_MGR.get()
    ctx_mgr.unset(*args)
