from cloaksim.business.cloaking import CloakingInteractor
from cloaksim.business.cloaking import CloakingInteractorError
from cloaksim.business.eigenvalues import EigenvalueInteractor
from cloaksim.business.eigenvalues import EigenvalueInteractorError
from cloaksim.business.sweeps import SweepInteractor
from cloaksim.business.sweeps import SweepInteractorError
from cloaksim.business.validation import ValidationInteractor
from cloaksim.business.validation import ValidationInteractorError


def test_eigenvalue_interactor_get_error_class_correct():
    assert EigenvalueInteractor().get_error_class() is \
        EigenvalueInteractorError
    assert EigenvalueInteractor.get_error_class() is \
        EigenvalueInteractorError


def test_cloaking_interactor_get_error_class_correct():
    assert CloakingInteractor().get_error_class() is CloakingInteractorError
    assert CloakingInteractor.get_error_class() is CloakingInteractorError


def test_validation_interactor_get_error_class_correct():
    assert ValidationInteractor().get_error_class() is \
        ValidationInteractorError
    assert ValidationInteractor.get_error_class() is \
        ValidationInteractorError


def test_sweep_interactor_get_error_class_correct():
    assert SweepInteractor().get_error_class() is SweepInteractorError
    assert SweepInteractor.get_error_class() is SweepInteractorError
