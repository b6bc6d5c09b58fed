"""Module for writing the workbench's CSV and ASCII reports.

"""
import csv
import dataclasses
import logging
import pathlib
import typing

import numpy as np
import scipy.sparse  # type: ignore

from cloaksim.geometry import Mesh
from cloaksim.geometry import RegionTag
from cloaksim.herglotz import HerglotzKernel
from cloaksim.ite import EigenPair
from cloaksim.oracles import RadialRoot
from cloaksim.scatter import FieldSample

_logger = logging.getLogger(__name__)

PathLike = typing.Union[str, pathlib.Path]


@dataclasses.dataclass(frozen=True)
class RatioRow:
    """Row of a scattering ratio report.

    Attributes
    ----------
    kappa : float
        The wavenumber.
    mode : str
        The scattering mode keyword.
    ratio : float
        The scattering ratio on the evaluation circle.
    fit_residual : float
        The relative collocation residual of the Herglotz fit.
    dofs : int
        The number of scattering DoFs.
    h : float
        The mesh size.
    lossy_norm : float
        The L2 norm of the total field in the lossy layer (NaN for
        modes without one).

    """
    kappa: float
    mode: str
    ratio: float
    fit_residual: float
    dofs: int
    h: float
    lossy_norm: float = float('nan')


@dataclasses.dataclass(frozen=True)
class SweepRow:
    """Row of a parameter sweep report.

    Attributes
    ----------
    value : float
        The parameter value of the run.
    outputs : dict
        The named outputs of the run (empty if the run failed).
    error : str or None
        The error message of a failed run.

    """
    value: float
    outputs: typing.Mapping[str, float]
    error: typing.Optional[str] = None


def _write_rows(path: PathLike, header: typing.Sequence[str],
                rows: typing.Iterable[typing.Sequence[typing.Any]]) \
        -> pathlib.Path:
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', newline='', encoding='utf-8') as file:
        writer = csv.writer(file)
        writer.writerow(header)
        writer.writerows(rows)
    _logger.info('report written', extra={'path': str(path)})
    return path


def write_eigenvalues(pairs: typing.Sequence[EigenPair],
                      path: PathLike) -> pathlib.Path:
    """Write eigenvalues as rows "index, re_kappa, im_kappa, residual".

    """
    return _write_rows(path, ('index', 're_kappa', 'im_kappa', 'residual'),
                       ((index, float(pair.kappa.real),
                         float(pair.kappa.imag), float(pair.residual))
                        for index, pair in enumerate(pairs)))


def write_eigenfunction(values: np.ndarray, path: PathLike) -> pathlib.Path:
    """Write the DoF values of an eigenfunction as rows
    "node_index, re, im".

    """
    return _write_rows(path, ('node_index', 're', 'im'),
                       ((index, float(value.real), float(value.imag))
                        for index, value in enumerate(
                            np.asarray(values, dtype=complex))))


def write_kernel(kernel: HerglotzKernel, path: PathLike) -> pathlib.Path:
    """Write a Herglotz kernel as rows "theta_i, re_g, im_g, omega_i".

    """
    quadrature = kernel.quadrature
    return _write_rows(path, ('theta_i', 're_g', 'im_g', 'omega_i'),
                       ((float(theta), float(g.real), float(g.imag),
                         float(omega))
                        for theta, g, omega in zip(
                            quadrature.angles, kernel.g, quadrature.weights)))


def write_ratio_report(rows: typing.Sequence[RatioRow],
                       path: PathLike) -> pathlib.Path:
    """Write scattering ratio rows
    "kappa, mode, ratio, fit_residual, dofs, h, lossy_norm".

    """
    return _write_rows(path, [field.name for field in dataclasses.fields(
        RatioRow)], (dataclasses.astuple(row) for row in rows))


def write_fields(samples: typing.Sequence[FieldSample],
                 path: PathLike) -> pathlib.Path:
    """Write field samples as rows
    "x, y, re_us, im_us, re_ui, im_ui, re_u, im_u, masked" (the field
    columns of masked points are empty).

    """
    return _write_rows(
        path, ('x', 'y', 're_us', 'im_us', 're_ui', 'im_ui', 're_u', 'im_u',
               'masked'),
        ((sample.x, sample.y, *_field_columns(sample), int(sample.masked))
         for sample in samples))


def _field_columns(sample: FieldSample) -> typing.Tuple[typing.Any, ...]:
    values = (sample.scattered, sample.incident, sample.total)
    columns: typing.List[typing.Any] = []
    for value in values:
        columns.extend(('', '') if value is None else (value.real,
                                                       value.imag))
    return tuple(columns)


def write_roots(roots: typing.Sequence[RadialRoot],
                path: PathLike) -> pathlib.Path:
    """Write radial eigenvalue roots as rows "m, kappa".

    """
    return _write_rows(path, ('m', 'kappa'),
                       ((root.order, root.kappa) for root in roots))


def write_sweep(axis: str, rows: typing.Sequence[SweepRow],
                path: PathLike) -> pathlib.Path:
    """Write sweep rows with one column per output name (in order of
    first appearance) and a trailing error column.

    """
    names: typing.List[str] = []
    for row in rows:
        names.extend(name for name in row.outputs if name not in names)
    return _write_rows(path, [axis] + names + ['error'],
                       ([row.value] +
                        [row.outputs.get(name, float('nan'))
                         for name in names] + [row.error or '']
                        for row in rows))


def write_validation(checks: typing.Sequence[typing.Any],
                     path: PathLike) -> pathlib.Path:
    """Write validation checks as rows
    "name, passed, value, threshold, seconds".

    """
    return _write_rows(path, ('name', 'passed', 'value', 'threshold',
                              'seconds'),
                       ((check.name, int(check.passed), check.value,
                         check.threshold, check.seconds) for check in checks))


def write_matrix(matrix: scipy.sparse.spmatrix,
                 path: PathLike) -> pathlib.Path:
    """Write a sparse matrix in coordinate text format "i j re [im]" (the
    imaginary column only for complex matrices).

    """
    coo = scipy.sparse.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    is_complex = np.iscomplexobj(coo.data)
    lines = []
    for i, j, value in zip(coo.row[order].tolist(), coo.col[order].tolist(),
                           coo.data[order].tolist()):
        if is_complex:
            lines.append(f'{i} {j} {value.real!r} {value.imag!r}')
        else:
            lines.append(f'{i} {j} {float(value)!r}')
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text('\n'.join(lines) + '\n')
    return path


def write_mesh_summary(mesh: Mesh, path: PathLike) -> pathlib.Path:
    """Write the size, quality and region areas of a mesh as rows
    "quantity, value".

    """
    rows: typing.List[typing.Tuple[str, float]] = [
        ('nodes', mesh.node_count), ('triangles', mesh.triangle_count),
        ('h', mesh.h), ('diameter', mesh.diameter),
        ('min_angle', float(np.min(mesh.min_angles())))
    ]
    rows.extend((f'area_{region.keyword}', mesh.region_area(region))
                for region in RegionTag if mesh.has_region(region))
    return _write_rows(path, ('quantity', 'value'), rows)
