import json
import logging

import pytest

from cloaksim.logging import LogFile
from cloaksim.logging import LogFormat
from cloaksim.logging import initialize_logger
from cloaksim.logging import module_tag


@pytest.fixture
def logger():
    logger = logging.getLogger('cloaksim.tests.logging')
    logger.propagate = False
    yield logger
    for handler in list(logger.handlers):
        handler.close()
        logger.removeHandler(handler)


@pytest.mark.parametrize('log_format',
                         [log_format for log_format in LogFormat])
def test_log_format_from_name_correct(log_format):
    assert LogFormat.from_name(log_format.name.lower()) is log_format


def test_log_format_from_name_error():
    with pytest.raises(NameError):
        LogFormat.from_name('xml')


@pytest.mark.parametrize(('logger_name', 'tag'),
                         [('cloaksim.ite', 'ite'),
                          ('cloaksim.business.cloaking', 'cloaking'),
                          ('cloaksim', 'cloaksim'), ('scipy', 'cloaksim')])
def test_module_tag_correct(logger_name, tag):
    assert module_tag(logger_name) == tag


@pytest.mark.parametrize('debug', [True, False])
@pytest.mark.parametrize('standard_output', [True, False])
def test_initialize_logger_handlers_correct(logger, tmp_path, standard_output,
                                            debug):
    log_file = LogFile(tmp_path / 'logs' / 'cloaksim.log', 1024, 2)
    initialize_logger(logger, standard_output=standard_output,
                      log_file=log_file, debug=debug)
    assert len(logger.handlers) == (2 if standard_output else 1)
    assert logger.level == (logging.DEBUG if debug else logging.INFO)
    assert log_file.file_path.parent.is_dir()


def test_initialize_logger_human_readable_correct(logger, tmp_path):
    log_file = LogFile(tmp_path / 'cloaksim.log', 1024, 2)
    initialize_logger(logger, standard_output=False, log_file=log_file)
    logger.info('mesh generated', extra={'h': 0.1})
    line = log_file.file_path.read_text()
    assert '[logging] INFO - mesh generated - h: 0.1' in line


def test_initialize_logger_json_correct(logger, tmp_path):
    log_file = LogFile(tmp_path / 'cloaksim.log', 1024, 2)
    initialize_logger(logger, LogFormat.JSON, standard_output=False,
                      log_file=log_file)
    logger.warning('poor fit', extra={'residual': 0.5, 'kappa': 1 + 2j})
    record = json.loads(log_file.file_path.read_text().splitlines()[0])
    assert record['message'] == 'poor fit'
    assert record['levelname'] == 'WARNING'
    assert record['module'] == 'logging'
    assert record['residual'] == 0.5
    assert record['kappa'] == '(1+2j)'
    assert 'extra_info' not in record


def test_initialize_logger_replaces_handlers_correct(logger, tmp_path):
    initialize_logger(logger)
    initialize_logger(logger)
    assert len(logger.handlers) == 1
