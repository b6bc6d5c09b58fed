import pytest

from cloaksim.exceptions import BaseError
from cloaksim.exceptions import CloakSimError
from cloaksim.exceptions import ErrorCreator


class _Error(CloakSimError):
    pass


class _Creator(ErrorCreator[_Error]):
    @classmethod
    def get_error_class(cls):
        return _Error

    def fail(self, message, **kwargs):
        raise self._create_error(message, **kwargs)


def test_base_error_str_without_details_correct():
    assert str(BaseError('some message')) == 'some message'


def test_base_error_str_with_details_correct():
    error = BaseError('some message', h=0.1, mode='lossy1')
    assert str(error) == 'some message (h: 0.1, mode: lossy1)'
    assert error.details == {'h': 0.1, 'mode': 'lossy1'}


def test_create_error_correct():
    with pytest.raises(_Error) as exception_info:
        _Creator().fail('some message', kappa=1.5)
    assert exception_info.value.details == {'kappa': 1.5}
    assert exception_info.value.__cause__ is None


def test_create_error_chains_active_exception_correct():
    creator = _Creator()
    with pytest.raises(_Error) as exception_info:
        try:
            raise ValueError('inner')
        except ValueError:
            creator.fail('outer')
    assert isinstance(exception_info.value.__cause__, ValueError)

