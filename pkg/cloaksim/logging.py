"""Module for configuring the workbench's log output.

"""
import dataclasses
import datetime
import enum
import logging
import logging.handlers
import pathlib
import sys
import typing

import json_log_formatter  # type: ignore

_HUMAN_READABLE_LOG_FORMAT: typing.Final[str] = \
    '%(asctime)s - [%(module_tag)s] %(levelname)s - %(message)s%(extra_info)s'
"""Format of human-readable log lines."""

_DEFAULT_MODULE_TAG: typing.Final[str] = 'cloaksim'
"""Tag used for loggers outside the cloaksim package."""

_STANDARD_RECORD_ATTRIBUTES: typing.Final[frozenset[str]] = frozenset(
    vars(logging.makeLogRecord({})).keys()) | {'message', 'asctime'}
"""Attributes present on every log record (no extra information)."""


class LogFormat(enum.Enum):
    """Enumeration of the supported log formats.

    """
    HUMAN_READABLE = 0
    JSON = 1

    @staticmethod
    def from_name(name: str) -> 'LogFormat':
        """Find an enumeration member by its name.

        Parameters
        ----------
        name : str
            The name to search for (case-insensitive).

        Raises
        ------
        NameError
            If no enumeration member can be found for the given name.

        """
        for log_format in LogFormat:
            if log_format.name.lower() == name.lower():
                return log_format
        raise NameError(name)


@dataclasses.dataclass(frozen=True)
class LogFile:
    """Rotating log file settings.

    Attributes
    ----------
    file_path : pathlib.Path
        The path of the log file.
    max_bytes : int
        The size at which the file is rotated.
    backup_count : int
        The number of rotated files to keep.

    """
    file_path: pathlib.Path
    max_bytes: int
    backup_count: int


def module_tag(logger_name: str) -> str:
    """Derive the short module tag that prefixes a log line.

    Parameters
    ----------
    logger_name : str
        The dotted logger name (e.g. "cloaksim.ite").

    Returns
    -------
    str
        The module tag (e.g. "ite").

    """
    parts = logger_name.split('.')
    if parts[0] != 'cloaksim' or len(parts) == 1:
        return _DEFAULT_MODULE_TAG
    return parts[-1]


class _ContextFilter(logging.Filter):
    def filter(self, record: logging.LogRecord) -> bool:
        record.module_tag = module_tag(record.name)
        extra = {
            key: value
            for key, value in vars(record).items()
            if key not in _STANDARD_RECORD_ATTRIBUTES
            and key not in ('module_tag', 'extra_info')
        }
        record.extra_info = ('' if len(extra) == 0 else ' - ' + ', '.join(
            f'{key}: {value}' for key, value in extra.items()))
        return True


class _JsonFormatter(json_log_formatter.JSONFormatter):
    def json_record(self, message: str, extra: typing.Dict[str, typing.Any],
                    record: logging.LogRecord) -> typing.Dict[str, typing.Any]:
        extra.pop('extra_info', None)
        extra['message'] = message
        extra['name'] = record.name
        extra['module'] = extra.pop('module_tag', module_tag(record.name))
        extra['levelname'] = record.levelname
        extra['time'] = datetime.datetime.fromtimestamp(
            record.created, tz=datetime.timezone.utc).isoformat()
        if record.exc_info:
            extra['exc_info'] = self.formatException(record.exc_info)
        return {key: _to_json_value(value) for key, value in extra.items()}


def _to_json_value(value: typing.Any) -> typing.Any:
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)


def _create_formatter(log_format: LogFormat) -> logging.Formatter:
    if log_format is LogFormat.JSON:
        return _JsonFormatter()
    return logging.Formatter(_HUMAN_READABLE_LOG_FORMAT)


def initialize_logger(logger: logging.Logger,
                      log_format: LogFormat = LogFormat.HUMAN_READABLE,
                      standard_output: bool = True,
                      log_file: typing.Optional[LogFile] = None,
                      debug: bool = False) -> None:
    """Initialize a logger with console and/or file handlers.

    Parameters
    ----------
    logger : logging.Logger
        The logger to initialize (typically the root logger).
    log_format : LogFormat
        The format of the emitted log lines.
    standard_output : bool
        True if log lines are written to standard error.
    log_file : LogFile or None
        The rotating log file settings (no file logging if None).
    debug : bool
        True if debug messages are to be emitted.

    Raises
    ------
    OSError
        If the log file cannot be opened.

    """
    logger.setLevel(logging.DEBUG if debug else logging.INFO)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    formatter = _create_formatter(log_format)
    handlers: typing.List[logging.Handler] = []
    if standard_output:
        handlers.append(logging.StreamHandler(sys.stderr))
    if log_file is not None:
        log_file.file_path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(
            logging.handlers.RotatingFileHandler(
                log_file.file_path, maxBytes=log_file.max_bytes,
                backupCount=log_file.backup_count))
    for handler in handlers:
        handler.setFormatter(formatter)
        handler.addFilter(_ContextFilter())
        logger.addHandler(handler)
