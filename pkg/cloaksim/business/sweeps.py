"""Business logic for parameter sweeps over the eigenvalue and cloaking
pipelines.

"""
import concurrent.futures
import dataclasses
import logging
import pathlib
import typing

from cloaksim.business.base import Interactor
from cloaksim.business.base import InteractorError
from cloaksim.business.cloaking import CloakingInteractor
from cloaksim.business.eigenvalues import EigenvalueInteractor
from cloaksim.configuration import RunConfig
from cloaksim.configuration import SweepAxis
from cloaksim.configuration import SweepPipeline
from cloaksim.reports import SweepRow
from cloaksim.reports import write_sweep

_logger = logging.getLogger(__name__)

SWEEP_FILE_NAME: typing.Final[str] = 'sweep.csv'


class SweepInteractorError(InteractorError):
    """Exception class for all sweep interactor errors.

    """
    pass


@dataclasses.dataclass(frozen=True)
class SweepReport:
    rows: typing.List[SweepRow]
    path: typing.Optional[pathlib.Path]


def apply_sweep_value(run_config: RunConfig, axis: SweepAxis,
                      value: float) -> RunConfig:
    """Derive the run settings of a single sweep value.

    """
    if axis is SweepAxis.H:
        return dataclasses.replace(
            run_config, mesh=dataclasses.replace(run_config.mesh, h=value))
    if axis is SweepAxis.TAU:
        return dataclasses.replace(
            run_config,
            scatter=dataclasses.replace(run_config.scatter, tau=value))
    if axis is SweepAxis.N_A:
        return dataclasses.replace(
            run_config,
            scatter=dataclasses.replace(run_config.scatter, n_core=value))
    if axis is SweepAxis.R:
        return dataclasses.replace(
            run_config,
            herglotz=dataclasses.replace(run_config.herglotz,
                                         regularizer=value))
    return dataclasses.replace(
        run_config,
        herglotz=dataclasses.replace(run_config.herglotz,
                                     directions=int(round(value))))


class SweepInteractor(Interactor):
    """Interactor for running one pipeline per value of a swept
    parameter.

    """
    @classmethod
    def get_error_class(cls) -> type[InteractorError]:
        # Docstring inherited
        return SweepInteractorError

    def run(self, run_config: RunConfig, write: bool = True) -> SweepReport:
        """Run the configured sweep.

        Independent runs execute concurrently; the rows keep the order
        of the sweep values and failed runs are recorded per row.

        Raises
        ------
        SweepInteractorError
            If no sweep values are configured or the report cannot be
            written.

        """
        settings = run_config.sweep
        if len(settings.values) == 0:
            raise self._create_error('no sweep values configured',
                                     axis=settings.axis.value)
        pipeline = settings.effective_pipeline
        rows: typing.List[typing.Optional[SweepRow]] = [None] * len(
            settings.values)
        with concurrent.futures.ThreadPoolExecutor(
                max_workers=settings.number_workers) as executor:
            futures_indices = {
                executor.submit(
                    self.__run_value,
                    apply_sweep_value(run_config, settings.axis, value),
                    pipeline): index
                for index, value in enumerate(settings.values)
            }
            for future in concurrent.futures.as_completed(futures_indices):
                index = futures_indices[future]
                value = settings.values[index]
                try:
                    rows[index] = SweepRow(value, future.result())
                except Exception as error:
                    _logger.warning('sweep run failed', extra={
                        'axis': settings.axis.value,
                        'value': value
                    }, exc_info=True)
                    rows[index] = SweepRow(value, {}, str(error))
        completed = [row for row in rows if row is not None]
        path = None
        if write:
            directory = run_config.output_directory
            try:
                path = write_sweep(settings.axis.value, completed,
                                   directory / SWEEP_FILE_NAME)
            except Exception:
                raise self._create_error('unable to write the sweep report',
                                         directory=str(directory))
        return SweepReport(completed, path)

    def __run_value(self, run_config: RunConfig,
                    pipeline: SweepPipeline) -> typing.Dict[str, float]:
        outputs: typing.Dict[str, float] = {}
        if pipeline is SweepPipeline.ITE:
            solution = EigenvalueInteractor().compute_eigenvalues(run_config)
            for index, pair in enumerate(solution.pairs):
                outputs[f're_kappa_{index}'] = float(pair.kappa.real)
                outputs[f'im_kappa_{index}'] = float(pair.kappa.imag)
            return outputs
        for result in CloakingInteractor().compute_modes(run_config):
            name = result.mode.value
            outputs[f'kappa_{name}'] = result.row.kappa
            outputs[f'ratio_{name}'] = result.row.ratio
            outputs[f'fit_residual_{name}'] = result.row.fit_residual
            outputs[f'lossy_norm_{name}'] = result.row.lossy_norm
        return outputs
