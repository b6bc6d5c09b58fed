"""Module for the independent analytic references: Bessel functions of
integer order, radially symmetric interior transmission eigenvalues and
Mie series for discs.

"""
import dataclasses
import enum
import logging
import math
import typing

import numpy as np
import numpy.typing as npt
import scipy.optimize  # type: ignore

from cloaksim.entities import CavityCondition
from cloaksim.exceptions import CloakSimError

_logger = logging.getLogger(__name__)

MAX_ARGUMENT: typing.Final[float] = 100.0
"""Largest supported Bessel function argument."""

_SERIES_LIMIT: typing.Final[float] = 1.0
"""Arguments below this limit use the ascending series."""

_ASYMPTOTIC_LIMIT: typing.Final[float] = 30.0
"""Arguments above this limit use the Hankel asymptotic expansion."""

_EULER_GAMMA: typing.Final[float] = 0.5772156649015329

_RESCALE_THRESHOLD: typing.Final[float] = 1e250
"""Magnitude at which the backward recurrence is rescaled."""

_MIE_EXTRA_ORDERS: typing.Final[int] = 20
"""Orders kept in the Mie series beyond ceil(kappa * radius)."""


class OracleError(CloakSimError):
    """Exception class for all analytic reference errors.

    """
    pass


class BesselKind(enum.Enum):
    """Enumeration of the Bessel function kinds.

    """
    J = 'J'
    Y = 'Y'


def _validate_argument(kind: BesselKind, order: int, x: float) -> None:
    if order < 0:
        raise OracleError('negative Bessel function order', order=order)
    lower_ok = x > 0 if kind is BesselKind.Y else x >= 0
    if not (lower_ok and x <= MAX_ARGUMENT):
        raise OracleError('Bessel function argument out of range',
                          kind=kind.value, x=x)


def _ascending_series(order: int, x: float) -> float:
    half = 0.5 * x
    term = half**order / math.factorial(order)
    total = term
    k = 0
    while abs(term) > 1e-17 * abs(total):
        k += 1
        term *= -half * half / (k * (k + order))
        total += term
    return total


def _miller_sequence(max_order: int, x: float) -> np.ndarray:
    # Backward recurrence J_{n-1} = (2n / x) J_n - J_{n+1}, normalized
    # by J_0 + 2 sum(J_2k) = 1
    largest = max(max_order, x, 1.0)
    start = 2 * ((int(largest) + 20 + int(math.sqrt(40.0 * largest))) // 2)
    sequence = np.zeros(start + 2)
    sequence[start] = 1.0
    for n in range(start, 0, -1):
        sequence[n - 1] = 2.0 * n / x * sequence[n] - sequence[n + 1]
        if abs(sequence[n - 1]) > _RESCALE_THRESHOLD:
            sequence[n - 1:] /= _RESCALE_THRESHOLD
    norm = sequence[0] + 2.0 * np.sum(sequence[2:start + 1:2])
    return sequence[:start + 1] / norm


def _hankel_asymptotic(order: int, x: float) -> typing.Tuple[float, float]:
    mu = 4.0 * order * order
    p, q = 1.0, 0.0
    term = 1.0
    for k in range(1, 200):
        term *= (mu - (2 * k - 1)**2) / (8.0 * k * x)
        sign = -1.0 if (k // 2) % 2 == 1 else 1.0
        if k % 2 == 0:
            p += sign * term
        else:
            q += sign * term
        if abs(term) < 1e-17:
            break
    chi = x - (0.5 * order + 0.25) * math.pi
    scale = math.sqrt(2.0 / (math.pi * x))
    return (scale * (p * math.cos(chi) - q * math.sin(chi)),
            scale * (p * math.sin(chi) + q * math.cos(chi)))


def _j_sequence(max_order: int, x: float) -> np.ndarray:
    if x == 0.0:
        values = np.zeros(max_order + 1)
        values[0] = 1.0
        return values
    if x < _SERIES_LIMIT:
        return np.array(
            [_ascending_series(order, x) for order in range(max_order + 1)])
    if x > _ASYMPTOTIC_LIMIT and max_order < x:
        values = np.empty(max(max_order + 1, 2))
        values[0] = _hankel_asymptotic(0, x)[0]
        values[1] = _hankel_asymptotic(1, x)[0]
        for n in range(1, max_order):
            values[n + 1] = 2.0 * n / x * values[n] - values[n - 1]
        return values[:max_order + 1]
    return _miller_sequence(max_order, x)[:max_order + 1]


def _y_zero_one(x: float) -> typing.Tuple[float, float]:
    if x > _ASYMPTOTIC_LIMIT:
        return _hankel_asymptotic(0, x)[1], _hankel_asymptotic(1, x)[1]
    terms = int(x) + 41
    if x < _SERIES_LIMIT:
        j = np.array(
            [_ascending_series(order, x) for order in range(terms + 2)])
    else:
        j = _miller_sequence(terms + 1, x)
    logarithm = math.log(0.5 * x) + _EULER_GAMMA
    k = np.arange(1, (terms - 1) // 2 + 1)
    signs = np.where(k % 2 == 0, 1.0, -1.0)
    y0 = 2.0 / math.pi * (logarithm * j[0] -
                          2.0 * np.sum(signs * j[2 * k] / k))
    y1 = 2.0 / math.pi * (-j[0] / x + logarithm * j[1] + np.sum(
        signs * (j[2 * k - 1] - j[2 * k + 1]) / k))
    return float(y0), float(y1)


def _y_sequence(max_order: int, x: float) -> np.ndarray:
    values = np.empty(max(max_order + 1, 2))
    values[0], values[1] = _y_zero_one(x)
    for n in range(1, max_order):
        values[n + 1] = 2.0 * n / x * values[n] - values[n - 1]
    return values[:max_order + 1]


def bessel_sequence(kind: BesselKind, max_order: int,
                    x: float) -> np.ndarray:
    """Evaluate Bessel functions of orders 0 to max_order.

    Parameters
    ----------
    kind : BesselKind
        The kind (J or Y).
    max_order : int
        The largest order.
    x : float
        The argument (0 <= x <= 100, x > 0 for Y).

    Returns
    -------
    np.ndarray
        The max_order + 1 function values.

    Raises
    ------
    OracleError
        If the order or the argument is out of range.

    """
    _validate_argument(kind, max_order, x)
    if kind is BesselKind.J:
        return _j_sequence(max_order, x)
    return _y_sequence(max_order, x)


def bessel(kind: BesselKind, order: int, x: float) -> float:
    """Evaluate a Bessel function of integer order.

    Raises
    ------
    OracleError
        If the order or the argument is out of range.

    """
    return float(bessel_sequence(kind, order, x)[order])


def bessel_derivative(kind: BesselKind, order: int, x: float) -> float:
    """Evaluate the derivative of a Bessel function of integer order.

    Raises
    ------
    OracleError
        If the order or the argument is out of range.

    """
    values = bessel_sequence(kind, order + 1, x)
    return float(_derivatives(values)[order])


def _derivatives(values: np.ndarray) -> np.ndarray:
    # C_m' = (C_{m-1} - C_{m+1}) / 2 and C_0' = -C_1 for orders up to
    # len(values) - 2
    derivatives = np.empty(len(values) - 1, dtype=values.dtype)
    derivatives[0] = -values[1]
    derivatives[1:] = 0.5 * (values[:-2] - values[2:])
    return derivatives


def hankel1(order: int, x: float) -> complex:
    """Evaluate the Hankel function of the first kind."""
    return complex(bessel(BesselKind.J, order, x),
                   bessel(BesselKind.Y, order, x))


def bessel_zero(order: int, index: int = 1) -> float:
    """Find the index-th positive zero of J_order (bracketing on a 0.1
    grid followed by root refinement).

    Raises
    ------
    OracleError
        If the zero lies beyond the supported argument range.

    """
    if index < 1:
        raise OracleError('zero index must be positive', index=index)
    found = 0
    previous_x = 0.1
    previous = bessel(BesselKind.J, order, previous_x)
    for x in np.arange(0.2, MAX_ARGUMENT, 0.1):
        current = bessel(BesselKind.J, order, float(x))
        if previous * current < 0:
            found += 1
            if found == index:
                return float(
                    scipy.optimize.brentq(
                        lambda t: bessel(BesselKind.J, order, t), previous_x,
                        float(x), xtol=1e-14))
        previous_x, previous = float(x), current
    raise OracleError('Bessel function zero out of range', order=order,
                      index=index)


@dataclasses.dataclass(frozen=True)
class RadialProblem:
    """Radially symmetric interior transmission eigenvalue problem on
    concentric discs.

    Attributes
    ----------
    n_c : float
        The refractive index of the shell.
    cavity_radius : float
        The radius of the cavity D.
    outer_radius : float
        The radius of Omega.
    cavity_condition : CavityCondition
        The boundary condition on the cavity boundary.

    """
    n_c: float
    cavity_radius: float
    outer_radius: float
    cavity_condition: CavityCondition

    def __post_init__(self) -> None:
        if not self.n_c > 0:
            raise OracleError('refractive index must be positive',
                              n_c=self.n_c)
        if not 0 < self.cavity_radius < self.outer_radius:
            raise OracleError('radii are not nested',
                              cavity_radius=self.cavity_radius,
                              outer_radius=self.outer_radius)


@dataclasses.dataclass(frozen=True)
class RadialRoot:
    """Radially symmetric interior transmission eigenvalue.

    Attributes
    ----------
    kappa : float
        The eigenvalue.
    order : int
        The angular order m of the eigenfunctions.
    multiplicity : int
        The multiplicity (1 for m = 0, 2 otherwise).

    """
    kappa: float
    order: int
    multiplicity: int


def radial_determinant(problem: RadialProblem, kappa: float,
                       order: int) -> float:
    """Evaluate the balanced determinant whose zeros are the radially
    symmetric interior transmission eigenvalues of the given order.

    The unknowns are the coefficients of v = a J_m(k r) + b Y_m(k r) in
    the shell (k = kappa sqrt(n_c)) and of w = c J_m(kappa r). The rows
    impose the cavity condition on v at the cavity radius and the
    continuity of the values and of the radial derivatives of v and w at
    the outer radius.

    """
    k = kappa * math.sqrt(problem.n_c)
    inner, outer = problem.cavity_radius, problem.outer_radius
    j_inner = bessel_sequence(BesselKind.J, order + 1, k * inner)
    y_inner = bessel_sequence(BesselKind.Y, order + 1, k * inner)
    j_outer = bessel_sequence(BesselKind.J, order + 1, k * outer)
    y_outer = bessel_sequence(BesselKind.Y, order + 1, k * outer)
    j_free = bessel_sequence(BesselKind.J, order + 1, kappa * outer)
    if problem.cavity_condition is CavityCondition.DIRICHLET:
        cavity_row = [j_inner[order], y_inner[order], 0.0]
    else:
        cavity_row = [
            _derivatives(j_inner)[order],
            _derivatives(y_inner)[order], 0.0
        ]
    matrix = np.array([
        cavity_row, [j_outer[order], y_outer[order], -j_free[order]],
        [
            k * _derivatives(j_outer)[order], k * _derivatives(y_outer)[order],
            -kappa * _derivatives(j_free)[order]
        ]
    ])
    # Positive row and column scalings leave the sign pattern intact
    matrix /= np.max(np.abs(matrix), axis=1, keepdims=True)
    matrix /= np.max(np.abs(matrix), axis=0, keepdims=True)
    return float(np.linalg.det(matrix))


def radial_ite_roots(problem: RadialProblem, lower: float, upper: float,
                     max_order: int = 6, step: float = 1e-3,
                     tolerance: float = 1e-9) -> typing.List[RadialRoot]:
    """Find the radially symmetric interior transmission eigenvalues in
    an interval.

    Parameters
    ----------
    problem : RadialProblem
        The concentric disc problem.
    lower : float
        The lower end of the kappa interval.
    upper : float
        The upper end of the kappa interval.
    max_order : int
        The largest angular order m.
    step : float
        The scanning step for sign changes.
    tolerance : float
        The root refinement tolerance.

    Returns
    -------
    list of RadialRoot
        The roots sorted by kappa.

    Raises
    ------
    OracleError
        If the interval is empty or not positive.

    """
    if not 0 < lower < upper:
        raise OracleError('invalid kappa interval', lower=lower, upper=upper)
    if upper * math.sqrt(problem.n_c) * problem.outer_radius > MAX_ARGUMENT:
        raise OracleError('kappa interval exceeds Bessel argument range',
                          upper=upper)
    count = max(2, int(math.ceil((upper - lower) / step)) + 1)
    grid = np.linspace(lower, upper, count)
    roots = []
    for order in range(max_order + 1):
        multiplicity = 1 if order == 0 else 2
        values = np.array([
            radial_determinant(problem, float(kappa), order)
            for kappa in grid
        ])
        for index in range(count - 1):
            if values[index] == 0.0:
                roots.append(
                    RadialRoot(float(grid[index]), order, multiplicity))
            elif values[index] * values[index + 1] < 0:
                kappa = scipy.optimize.brentq(
                    lambda k: radial_determinant(problem, k, order),
                    grid[index], grid[index + 1], xtol=tolerance)
                roots.append(RadialRoot(float(kappa), order, multiplicity))
        if values[-1] == 0.0:
            roots.append(RadialRoot(float(grid[-1]), order, multiplicity))
    roots.sort(key=lambda root: (root.kappa, root.order))
    _logger.info('radial eigenvalues found',
                 extra={'roots': len(roots), 'lower': lower, 'upper': upper})
    return roots


class MieKind(enum.Enum):
    """Enumeration of the disc scattering problems with series
    solutions.

    """
    SOUND_SOFT = 'sound_soft'
    PENETRABLE = 'penetrable'


def mie_order_count(kappa: float, radius: float) -> int:
    """Largest order kept in the Mie series."""
    return int(math.ceil(kappa * radius)) + _MIE_EXTRA_ORDERS


def mie_series(kappa: float, radius: float, points: npt.ArrayLike,
               kind: MieKind = MieKind.SOUND_SOFT,
               index: typing.Optional[float] = None,
               direction_angle: float = 0.0,
               extra_terms: int = 0) -> np.ndarray:
    """Evaluate the scattered field of a plane wave exp(i kappa x.d),
    d = (cos(direction_angle), sin(direction_angle)), by a disc centred
    at the origin.

    Parameters
    ----------
    kappa : float
        The wavenumber.
    radius : float
        The disc radius.
    points : array_like
        The (P, 2) evaluation points outside the disc.
    kind : MieKind
        The disc problem.
    index : float or None
        The refractive index of a penetrable disc.
    direction_angle : float
        The incidence angle.
    extra_terms : int
        Additional series orders beyond the default truncation.

    Returns
    -------
    np.ndarray
        The (P,) complex scattered field values.

    Raises
    ------
    OracleError
        If a point lies inside the disc or the parameters are invalid.

    """
    if not (kappa > 0 and radius > 0):
        raise OracleError('wavenumber and radius must be positive',
                          kappa=kappa, radius=radius)
    if kind is MieKind.PENETRABLE and (index is None or not index > 0):
        raise OracleError('penetrable disc requires a positive index',
                          index=index)
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    rho = np.hypot(points[:, 0], points[:, 1])
    if np.any(rho < radius * (1.0 - 1e-12)):
        raise OracleError('evaluation point inside the disc')
    theta = np.arctan2(points[:, 1], points[:, 0]) - direction_angle
    max_order = mie_order_count(kappa, radius) + extra_terms
    coefficients = _mie_coefficients(kappa, radius, kind, index, max_order)
    orders = np.arange(max_order + 1)
    values = np.empty(len(points), dtype=complex)
    for point_index, (r, angle) in enumerate(zip(rho, theta)):
        argument = kappa * r
        hankel = (bessel_sequence(BesselKind.J, max_order, argument) +
                  1j * bessel_sequence(BesselKind.Y, max_order, argument))
        values[point_index] = np.sum(coefficients * hankel *
                                     np.cos(orders * angle))
    return values


def _mie_coefficients(kappa: float, radius: float, kind: MieKind,
                      index: typing.Optional[float],
                      max_order: int) -> np.ndarray:
    orders = np.arange(max_order + 1)
    neumann_factors = np.where(orders == 0, 1.0, 2.0)
    incident = neumann_factors * 1j**orders
    argument = kappa * radius
    j = bessel_sequence(BesselKind.J, max_order + 1, argument)
    y = bessel_sequence(BesselKind.Y, max_order + 1, argument)
    hankel = j + 1j * y
    if kind is MieKind.SOUND_SOFT:
        return -incident * j[:-1] / hankel[:-1]
    assert index is not None
    inner_wavenumber = kappa * math.sqrt(index)
    j_inner = bessel_sequence(BesselKind.J, max_order + 1,
                              inner_wavenumber * radius)
    j_prime = _derivatives(j)
    hankel_prime = _derivatives(hankel)
    j_inner_prime = _derivatives(j_inner)
    numerator = (inner_wavenumber * j_inner_prime * j[:-1] -
                 kappa * j_prime * j_inner[:-1])
    denominator = (kappa * hankel_prime * j_inner[:-1] -
                   inner_wavenumber * j_inner_prime * hankel[:-1])
    return incident * numerator / denominator
