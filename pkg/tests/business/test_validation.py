import math
import unittest.mock

import pytest

from cloaksim.business.validation import VALIDATION_FILE_NAME
from cloaksim.business.validation import ValidationInteractor
from cloaksim.business.validation import ValidationInteractorError


def test_run_quick_suite_passes(tmp_path):
    report = ValidationInteractor().run(quick=True, output_directory=tmp_path)

    assert report.failures == []
    assert report.passed
    assert len(report.checks) == len(ValidationInteractor().quick_checks())
    assert report.path == tmp_path / VALIDATION_FILE_NAME
    lines = report.path.read_text().splitlines()
    assert lines[0] == 'name,passed,value,threshold,seconds'
    assert len(lines) == len(report.checks) + 1


def test_run_mass_perturbation_fails():
    report = ValidationInteractor(mass_perturbation=0.01).run(quick=True)

    assert not report.passed
    assert 'element_matrices_p1' in report.failures
    assert 'element_matrices_p2' in report.failures
    assert 'global_mass' in report.failures
    assert 'bessel_wronskian' not in report.failures
    assert report.path is None


def test_run_raising_check_fails():
    def measure():
        raise ValueError('broken check')

    with unittest.mock.patch.object(ValidationInteractor, 'quick_checks',
                                    return_value=[('broken', measure, 1.0)]):
        report = ValidationInteractor().run(quick=True)

    check = report.checks[0]
    assert check.name == 'broken'
    assert not check.passed
    assert math.isnan(check.value)
    assert report.failures == ['broken']


def test_run_write_error(tmp_path):
    with unittest.mock.patch.object(ValidationInteractor, 'quick_checks',
                                    return_value=[]):
        with unittest.mock.patch(
                'cloaksim.business.validation.write_validation',
                side_effect=OSError):
            with pytest.raises(ValidationInteractorError):
                ValidationInteractor().run(quick=True,
                                           output_directory=tmp_path)


@pytest.mark.slow
def test_run_full_suite_passes():
    report = ValidationInteractor().run()

    assert report.failures == []
    assert len(report.checks) == (len(ValidationInteractor().quick_checks()) +
                                  len(ValidationInteractor().slow_checks()))
