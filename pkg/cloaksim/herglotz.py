"""Module for Herglotz wave functions: direction quadrature, collocation
and Tikhonov-regularized kernel fitting.

A Herglotz wave function with kernel g is approximated by the quadrature
sum u(x) = sum_i g_i exp(i kappa x . xi_i) omega_i over the directions
xi_i on the unit circle.

"""
import dataclasses
import logging
import math
import typing

import numpy as np
import numpy.typing as npt
import scipy.linalg  # type: ignore

from cloaksim.exceptions import CloakSimError
from cloaksim.fem import DofMap
from cloaksim.fem import FieldInterpolator
from cloaksim.geometry import Shape
from cloaksim.ite import EigenPair
from cloaksim.ite import extract_eigenfunctions

_logger = logging.getLogger(__name__)

DEFAULT_DIRECTION_COUNT: typing.Final[int] = 64

DEFAULT_REGULARIZER: typing.Final[float] = 1e-8

_MIN_DIRECTION_COUNT: typing.Final[int] = 4

_CHOLESKY_CONDITION_LIMIT: typing.Final[float] = 1e10
"""Largest estimated normal matrix condition solved by Cholesky."""


class HerglotzError(CloakSimError):
    """Exception class for all Herglotz kernel errors.

    """
    pass


@dataclasses.dataclass(frozen=True, eq=False)
class DirectionQuadrature:
    """Trapezoidal quadrature on the unit circle.

    Attributes
    ----------
    angles : np.ndarray
        The (M,) direction angles theta_i = 2 pi i / M.
    directions : np.ndarray
        The (M, 2) unit directions xi_i.
    weights : np.ndarray
        The (M,) weights omega_i = 2 pi / M.

    """
    angles: np.ndarray
    directions: np.ndarray
    weights: np.ndarray

    @property
    def count(self) -> int:
        return len(self.angles)


def direction_quadrature(count: int) -> DirectionQuadrature:
    """Build the equispaced direction quadrature.

    Raises
    ------
    HerglotzError
        If fewer than four directions are requested.

    """
    if count < _MIN_DIRECTION_COUNT:
        raise HerglotzError('too few quadrature directions', count=count)
    angles = 2.0 * math.pi * np.arange(count) / count
    return DirectionQuadrature(
        angles, np.column_stack((np.cos(angles), np.sin(angles))),
        np.full(count, 2.0 * math.pi / count))


@dataclasses.dataclass(frozen=True, eq=False)
class HerglotzKernel:
    """Discrete Herglotz kernel.

    Attributes
    ----------
    quadrature : DirectionQuadrature
        The direction quadrature.
    g : np.ndarray
        The (M,) complex kernel values.
    kappa : float
        The wavenumber.
    regularizer : float
        The Tikhonov regularization parameter used for the fit.
    fit_residual : float
        The relative collocation residual ||A g - W|| / ||W|| (0 for
        vanishing data).
    interior_error : float
        The relative error against the fitted field at the mesh nodes
        (NaN if not computed).

    """
    quadrature: DirectionQuadrature
    g: np.ndarray
    kappa: float
    regularizer: float = 0.0
    fit_residual: float = 0.0
    interior_error: float = math.nan


def plane_wave_kernel(kappa: float, direction_index: int = 0,
                      count: int = DEFAULT_DIRECTION_COUNT) -> HerglotzKernel:
    """Build the kernel of the plane wave exp(i kappa x . xi_j) (a single
    nonzero kernel value 1 / omega_j).

    """
    quadrature = direction_quadrature(count)
    if not 0 <= direction_index < count:
        raise HerglotzError('direction index out of range',
                            direction_index=direction_index)
    g = np.zeros(count, dtype=complex)
    g[direction_index] = 1.0 / quadrature.weights[direction_index]
    return HerglotzKernel(quadrature, g, kappa)


def build_collocation(points: npt.ArrayLike, quadrature: DirectionQuadrature,
                      kappa: float) -> np.ndarray:
    """Build the (N, M) collocation matrix with entries
    exp(i kappa x_j . xi_i) omega_i.

    Raises
    ------
    HerglotzError
        If the point set is empty or kappa is not a finite real number.

    """
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(points) == 0:
        raise HerglotzError('empty collocation point set')
    if isinstance(kappa, complex) or not math.isfinite(kappa):
        raise HerglotzError('wavenumber must be a finite real number',
                            kappa=kappa)
    phases = kappa * (points @ quadrature.directions.T)
    return np.exp(1j * phases) * quadrature.weights[np.newaxis, :]


def solve_kernel(matrix: np.ndarray, samples: npt.ArrayLike,
                 regularizer: float, quadrature: DirectionQuadrature,
                 kappa: float) -> HerglotzKernel:
    """Solve the Tikhonov normal equation (r I + A* A) g = A* W.

    Well-conditioned normal matrices are factorized by Cholesky; for
    tiny regularization parameters the equivalent stacked least-squares
    problem [A; sqrt(r) I] g = [W; 0] is solved instead.

    Raises
    ------
    HerglotzError
        If the regularization parameter is not positive or the matrix
        and data shapes do not match.

    """
    if not regularizer > 0:
        raise HerglotzError('regularization parameter must be positive',
                            regularizer=regularizer)
    samples = np.asarray(samples, dtype=complex).ravel()
    if matrix.shape != (len(samples), quadrature.count):
        raise HerglotzError('collocation matrix shape mismatch',
                            shape=matrix.shape, samples=len(samples))
    data_norm = float(np.linalg.norm(samples))
    if data_norm == 0.0:
        return HerglotzKernel(quadrature,
                              np.zeros(quadrature.count, dtype=complex),
                              kappa, regularizer, 0.0)
    normal_matrix = regularizer * np.eye(quadrature.count) + \
        matrix.conj().T @ matrix
    right_hand_side = matrix.conj().T @ samples
    spectral_norm = float(np.linalg.norm(matrix, 2))**2
    if spectral_norm / regularizer < _CHOLESKY_CONDITION_LIMIT:
        factor = scipy.linalg.cho_factor(normal_matrix)
        g = scipy.linalg.cho_solve(factor, right_hand_side)
    else:
        stacked = np.vstack(
            (matrix, math.sqrt(regularizer) * np.eye(quadrature.count)))
        g = scipy.linalg.lstsq(
            stacked,
            np.concatenate((samples, np.zeros(quadrature.count))))[0]
    fit_residual = float(np.linalg.norm(matrix @ g - samples) / data_norm)
    return HerglotzKernel(quadrature, g, kappa, regularizer, fit_residual)


def evaluate(kernel: HerglotzKernel, points: npt.ArrayLike) -> np.ndarray:
    """Evaluate the Herglotz wave function at (P, 2) points."""
    points = np.asarray(points, dtype=float)
    phases = kernel.kappa * (points @ kernel.quadrature.directions.T)
    return np.exp(1j * phases) @ (kernel.g * kernel.quadrature.weights)


def gradient(kernel: HerglotzKernel, points: npt.ArrayLike) -> np.ndarray:
    """Evaluate the (P, 2) gradient of the Herglotz wave function."""
    points = np.asarray(points, dtype=float)
    phases = kernel.kappa * (points @ kernel.quadrature.directions.T)
    weighted = np.exp(1j * phases) * (kernel.g * kernel.quadrature.weights)
    return weighted @ (1j * kernel.kappa * kernel.quadrature.directions)


def fit_eigenfunction(pair: EigenPair, dofmap: DofMap, domain: Shape,
                      curve: typing.Optional[Shape] = None,
                      directions: int = DEFAULT_DIRECTION_COUNT,
                      points: typing.Optional[int] = None,
                      regularizer: float = DEFAULT_REGULARIZER) \
        -> HerglotzKernel:
    """Fit a Herglotz kernel to the eigenfunction w of an eigenpair.

    Parameters
    ----------
    pair : EigenPair
        The eigenpair (with real kappa).
    dofmap : DofMap
        The DoF map the eigenpair was computed on.
    domain : Shape
        The shape of Omega.
    curve : Shape or None
        The fitting curve inside the closure of Omega (the boundary of
        Omega if None).
    directions : int
        The number of quadrature directions M.
    points : int or None
        The number of fitting points N (2 M if None).
    regularizer : float
        The Tikhonov regularization parameter r.

    Returns
    -------
    HerglotzKernel
        The fitted kernel.

    Raises
    ------
    HerglotzError
        If kappa is complex or the curve leaves Omega.

    """
    if not pair.is_real:
        raise HerglotzError('eigenvalue is complex', kappa=pair.kappa)
    curve = domain if curve is None else curve
    count = 2 * directions if points is None else points
    samples = curve.sample(count)
    if not np.all(domain.gauge(samples) <= 1.0 + 1e-9):
        raise HerglotzError('fitting curve leaves the domain')
    _, w = extract_eigenfunctions(pair, dofmap)
    interpolator = FieldInterpolator(dofmap)
    values = interpolator.evaluate(w, samples, extrapolate=True)
    kappa = pair.kappa.real
    quadrature = direction_quadrature(directions)
    kernel = solve_kernel(build_collocation(samples, quadrature, kappa),
                          values, regularizer, quadrature, kappa)
    nodes = dofmap.mesh.nodes
    nodal = w[:len(nodes)]
    interior_error = float(
        np.linalg.norm(evaluate(kernel, nodes) - nodal) /
        np.linalg.norm(nodal))
    kernel = dataclasses.replace(kernel, interior_error=interior_error)
    _logger.info(
        'Herglotz kernel fitted', extra={
            'kappa': kappa,
            'directions': directions,
            'fit_residual': kernel.fit_residual,
            'interior_error': interior_error
        })
    return kernel
