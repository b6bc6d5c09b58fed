"""Main workbench application module.

"""
import logging
import pathlib
import sys
import typing

from cloaksim.configuration import Document
from cloaksim.configuration import RunConfig
from cloaksim.configuration import config
from cloaksim.configuration import get_run_config
from cloaksim.configuration import load_config
from cloaksim.logging import LogFile
from cloaksim.logging import LogFormat
from cloaksim.logging import initialize_logger

_logger = logging.getLogger(__name__)


def initialize_application(file_path: typing.Optional[str] = None,
                           preset: typing.Optional[str] = None,
                           overrides: typing.Sequence[Document] = ()) \
        -> RunConfig:
    """Initialize the workbench application by loading the configuration
    and configuring logging.

    Parameters
    ----------
    file_path : str or None
        The path to the configuration file.
    preset : str or None
        The name of the preset merged over the configuration file.
    overrides : sequence of dict
        The partial configuration documents applied last.

    Returns
    -------
    RunConfig
        The effective run settings.

    """
    # Logging for loading the configuration
    logging.basicConfig(level=logging.INFO)
    try:
        load_config(file_path, preset=preset, overrides=overrides)
        run_config = get_run_config()
    except Exception:
        _logger.critical('unable to load the configuration', exc_info=True)
        sys.exit(1)
    # Reconfigure logging based on the loaded configuration
    root_logger = logging.getLogger()
    log_format = LogFormat.from_name(config['application']['log']['format'])
    standard_output = config['application']['log']['console']['enabled']
    if not config['application']['log']['file']['enabled']:
        log_file = None
    else:
        file_path = config['application']['log']['file']['name']
        max_bytes = config['application']['log']['file']['max_bytes']
        backup_count = config['application']['log']['file']['backup_count']
        log_file = LogFile(pathlib.Path(file_path), max_bytes, backup_count)
    debug = config['application']['debug']
    try:
        initialize_logger(root_logger, log_format, standard_output, log_file,
                          debug)
    except Exception:
        _logger.critical('unable to initialize logging', exc_info=True)
        sys.exit(1)
    return run_config
