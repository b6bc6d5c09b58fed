import pathlib
import unittest.mock

import pytest

from cloaksim.application import initialize_application
from cloaksim.configuration import ConfigError
from cloaksim.logging import LogFile
from cloaksim.logging import LogFormat


def _config_dict(log_format, console_enabled, file_enabled):
    return {
        'application': {
            'debug': True,
            'log': {
                'format': log_format.name.lower(),
                'console': {
                    'enabled': console_enabled
                },
                'file': {
                    'enabled': file_enabled,
                    'name': 'cloaksim.log',
                    'max_bytes': 0,
                    'backup_count': 0
                }
            }
        }
    }


@pytest.mark.parametrize('file_enabled', [True, False])
@pytest.mark.parametrize('console_enabled', [True, False])
@pytest.mark.parametrize('log_format',
                         [log_format for log_format in LogFormat])
@unittest.mock.patch('cloaksim.application.get_run_config')
@unittest.mock.patch('cloaksim.application.initialize_logger')
@unittest.mock.patch('cloaksim.application.load_config')
@unittest.mock.patch('cloaksim.application.config')
def test_initialize_application_correct(mock_config, mock_load_config,
                                        mock_initialize_logger,
                                        mock_get_run_config, log_format,
                                        console_enabled, file_enabled):
    mock_config_dict = _config_dict(log_format, console_enabled,
                                    file_enabled)
    mock_config.__getitem__.side_effect = mock_config_dict.__getitem__
    overrides = [{'mesh': {'h': 0.05}}]

    run_config = initialize_application('config.yml', 'table1', overrides)

    assert run_config is mock_get_run_config.return_value
    mock_load_config.assert_called_once_with('config.yml', preset='table1',
                                             overrides=overrides)
    assert mock_initialize_logger.call_count == 1
    arguments = mock_initialize_logger.call_args.args
    assert arguments[1] is log_format
    assert arguments[2] is console_enabled
    if file_enabled:
        assert arguments[3] == LogFile(pathlib.Path('cloaksim.log'), 0, 0)
    else:
        assert arguments[3] is None
    assert arguments[4] is True


@unittest.mock.patch('cloaksim.application.logging.basicConfig')
@unittest.mock.patch('cloaksim.application.load_config',
                     side_effect=ConfigError('invalid configuration'))
def test_initialize_application_load_config_exception(
        mock_load_config, mock_basicConfig):
    with pytest.raises(SystemExit):
        initialize_application()


@unittest.mock.patch('cloaksim.application.logging.basicConfig')
@unittest.mock.patch('cloaksim.application.get_run_config',
                     side_effect=ConfigError('invalid configuration'))
@unittest.mock.patch('cloaksim.application.load_config')
def test_initialize_application_run_config_exception(
        mock_load_config, mock_get_run_config, mock_basicConfig):
    with pytest.raises(SystemExit):
        initialize_application()


@unittest.mock.patch('cloaksim.application.initialize_logger',
                     side_effect=Exception)
@unittest.mock.patch('cloaksim.application.logging.basicConfig')
@unittest.mock.patch('cloaksim.application.get_run_config')
@unittest.mock.patch('cloaksim.application.load_config')
@unittest.mock.patch('cloaksim.application.config')
def test_initialize_application_initialize_logger_exception(
        mock_config, mock_load_config, mock_get_run_config, mock_basicConfig,
        mock_initialize_logger):
    mock_config_dict = _config_dict(LogFormat.JSON, True, True)
    mock_config.__getitem__.side_effect = mock_config_dict.__getitem__

    with pytest.raises(SystemExit):
        initialize_application()
