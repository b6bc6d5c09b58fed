import pytest

from cloaksim.configuration import PRESETS
from cloaksim.configuration import merge_documents
from cloaksim.configuration import parse_run_config

_COARSE_H = 0.2

_GRID_POINTS = 11


@pytest.fixture
def make_run_config(tmp_path):
    def make_run_config(document=None, preset=None):
        base = {} if preset is None else PRESETS[preset]
        base = merge_documents(
            base, {
                'mesh': {
                    'h': _COARSE_H
                },
                'scatter': {
                    'grid_points': _GRID_POINTS
                },
                'output': {
                    'directory': str(tmp_path / 'output')
                }
            })
        return parse_run_config(merge_documents(base, document or {}))

    return make_run_config
