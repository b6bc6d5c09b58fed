import pytest

from cloaksim.entities import CavityCondition
from cloaksim.entities import ScatterMode


@pytest.mark.parametrize('condition', [c for c in CavityCondition])
def test_cavity_condition_from_name_correct(condition):
    assert CavityCondition.from_name(condition.value.upper()) is condition


def test_cavity_condition_from_name_error():
    with pytest.raises(NameError):
        CavityCondition.from_name('robin')


@pytest.mark.parametrize('mode', [mode for mode in ScatterMode])
def test_scatter_mode_from_name_correct(mode):
    assert ScatterMode.from_name(mode.value) is mode


def test_scatter_mode_from_name_error():
    with pytest.raises(NameError):
        ScatterMode.from_name('sound_hard')


@pytest.mark.parametrize(('mode', 'condition'), [
    (ScatterMode.IDEALIZED_DIRICHLET, CavityCondition.DIRICHLET),
    (ScatterMode.IDEALIZED_NEUMANN, CavityCondition.NEUMANN),
    (ScatterMode.LOSSY1, CavityCondition.DIRICHLET),
    (ScatterMode.LOSSY2, CavityCondition.NEUMANN),
    (ScatterMode.PENETRABLE, None)
])
def test_scatter_mode_cavity_condition_correct(mode, condition):
    assert mode.cavity_condition is condition


@pytest.mark.parametrize('mode', [mode for mode in ScatterMode])
def test_scatter_mode_is_idealized_correct(mode):
    assert mode.is_idealized == mode.value.startswith('idealized')
