"""Wave packets over consecutive eigenstates and their time-dependent expectation values."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy import stats

from . import errors
from .qsystems import EigenSystem, Observable, energy, energy_gap, matrix_block, transition_frequency
from .spectral import ComplexArray, FloatArray, TimeLike

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-12
RESIDUE_TOLERANCE = 1e-10

# physics notation: n, N
# pylint: disable=invalid-name


def _check_band(system: EigenSystem, n: int, N: int) -> None:
    if N < 0:
        raise errors.InvalidPacketError(f"half width {N=} must be non-negative")
    if n - N <= 0:
        raise errors.InvalidPacketError(f"packet needs n - N > 0, got {n=}, {N=}")
    if n - N < system.ground_level:
        raise errors.InvalidPacketError(f"packet band starts below the ground level of {system.kind.value}")


@dataclass(frozen=True, eq=False)
class WavePacket:
    r"""Superposition :math:`\sum_{m=-N}^{N} c_m |n+m\rangle` of consecutive eigenstates.

    N = 0 is the single-eigenstate packet. Coefficients are stored read-only and must have unit norm.

    Attributes
    ----------
    system: EigenSystem
        The model the eigenstates belong to.
    center: int
        Center quantum number n.
    half_width: int
        Half width N.
    coefficients: ndarray
        Complex c_m for m = -N..N.
    """

    system: EigenSystem
    center: int
    half_width: int
    coefficients: ComplexArray

    def __post_init__(self) -> None:
        _check_band(self.system, self.center, self.half_width)
        coefficients = np.array(self.coefficients, dtype=np.complex128)
        if coefficients.shape != (2 * self.half_width + 1,):
            raise errors.InvalidPacketError(
                f"expected {2 * self.half_width + 1} coefficients, got shape {coefficients.shape}"
            )
        norm = float(np.sum(np.abs(coefficients) ** 2))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise errors.InvalidPacketError(f"coefficients must have unit norm, got {norm=}")
        coefficients.flags.writeable = False
        object.__setattr__(self, "coefficients", coefficients)

    @property
    def hbar(self) -> float:
        """Planck constant of the underlying system."""
        return self.system.hbar

    @property
    def offsets(self) -> npt.NDArray[np.int64]:
        """m = -N..N."""
        return np.arange(-self.half_width, self.half_width + 1)

    @property
    def levels(self) -> npt.NDArray[np.int64]:
        """Quantum numbers n+m."""
        return self.center + self.offsets

    @property
    def weights(self) -> FloatArray:
        """Occupation probabilities |c_m|^2."""
        return np.abs(self.coefficients) ** 2


@dataclass(frozen=True, eq=False)
class ExpectationSeries:
    """Expectation values of one observable on one packet over a time grid.

    Attributes
    ----------
    observable: Observable
        The observable.
    times: ndarray
        Strictly increasing times.
    values: ndarray
        Real expectation values at each time.
    center: int
        Packet center n.
    half_width: int
        Packet half width N.
    hbar: float
        Planck constant.
    max_residue: float
        Largest relative imaginary residue seen before taking the real part.
    """

    observable: Observable
    times: FloatArray
    values: FloatArray
    center: int
    half_width: int
    hbar: float
    max_residue: float = 0.0

    def __post_init__(self) -> None:
        times = np.array(self.times, dtype=np.float64)
        values = np.array(self.values, dtype=np.float64)
        if times.ndim != 1 or times.size == 0:
            raise ValueError("times must be a non-empty one-dimensional grid")
        if values.shape != times.shape:
            raise ValueError(f"{values.shape=} does not match {times.shape=}")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
            raise ValueError("times and values must be finite")
        times.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)


def equal_weight_packet(system: EigenSystem, n: int, N: int) -> WavePacket:
    """Packet with every c_m = 1/sqrt(2N+1)."""
    _check_band(system, n, N)
    count = 2 * N + 1
    return WavePacket(system, n, N, np.full(count, 1 / math.sqrt(count), dtype=np.complex128))


def general_packet(system: EigenSystem, n: int, N: int, coefficients: npt.ArrayLike) -> WavePacket:
    """Packet with the given coefficient profile, normalized to unit norm."""
    _check_band(system, n, N)
    profile = np.asarray(coefficients, dtype=np.complex128).ravel()
    if profile.size != 2 * N + 1:
        raise errors.InvalidPacketError(f"expected {2 * N + 1} coefficients, got {profile.size}")
    norm = float(np.linalg.norm(profile))
    if norm == 0.0 or not math.isfinite(norm):
        raise errors.InvalidPacketError("coefficient vector must have a finite nonzero norm")
    return WavePacket(system, n, N, profile / norm)


def gaussian_profile(N: int, sigma: float) -> FloatArray:
    """Unnormalized amplitudes exp(-m^2 / (2 sigma^2)) for m = -N..N."""
    if not sigma > 0:
        raise ValueError(f"{sigma=} must be positive")
    m = np.arange(-N, N + 1, dtype=np.float64)
    return np.exp(-(m**2) / (2 * sigma**2))


def poisson_profile(N: int, mean: float) -> FloatArray:
    """Amplitudes whose squares follow a Poisson distribution in k = m + N."""
    if not mean > 0:
        raise ValueError(f"{mean=} must be positive")
    k = np.arange(0, 2 * N + 1)
    return np.sqrt(stats.poisson.pmf(k, mean))


class _ExpectationKernel:
    """Matrix-element block and Bohr phases of a packet, computed once and swept over time.

    Phases are taken relative to E_n, which drops out of every expectation value.
    """

    def __init__(self, packet: WavePacket, obs: Observable):
        self.packet = packet
        self.observable = obs
        levels = packet.levels
        self.block = matrix_block(packet.system, obs, levels)
        self.frequencies = np.array(
            [transition_frequency(packet.system, packet.center, int(level)) for level in levels]
        )
        coefficients = packet.coefficients
        # bound on |value| used to scale the residue check
        self.scale = float(np.abs(coefficients) @ np.abs(self.block) @ np.abs(coefficients))

    def evaluate(self, times: FloatArray) -> tuple[FloatArray, float]:
        """Real expectation values on ``times`` and the largest relative imaginary residue."""
        evolved = self.packet.coefficients[:, None] * np.exp(-1j * np.multiply.outer(self.frequencies, times))
        raw = np.einsum("it,ij,jt->t", np.conj(evolved), self.block, evolved)
        residue = float(np.max(np.abs(raw.imag))) / max(self.scale, np.finfo(np.float64).tiny)
        if residue > RESIDUE_TOLERANCE:
            raise errors.ResidueError(
                f"<{self.observable.value}> has relative imaginary residue {residue:.3e} > {RESIDUE_TOLERANCE}"
            )
        logger.debug("evaluated <%s> at %d times, residue %.3e", self.observable.value, times.size, residue)
        return raw.real.copy(), residue


def _time_grid(times: TimeLike) -> FloatArray:
    grid = np.atleast_1d(np.asarray(times, dtype=np.float64))
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("time grid must be a non-empty one-dimensional sequence")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("time grid must be strictly increasing")
    return grid


def expectation(packet: WavePacket, obs: Observable | str, t: float) -> float:
    r"""Expectation value of ``obs`` at time t.

    .. math::
        \mathrm{Re} \sum_{m'} \sum_{m} \bar{c}_{m'} c_m \langle n+m'|f|n+m\rangle
        e^{i (E_{n+m'} - E_{n+m}) t / \hbar}

    with exact eigenvalues; for equal weights this is the 1/(2N+1) double sum.
    """
    kernel = _ExpectationKernel(packet, Observable.parse(obs))
    values, _ = kernel.evaluate(np.array([float(t)]))
    return float(values[0])


def expectation_series(packet: WavePacket, obs: Observable | str, times: TimeLike) -> ExpectationSeries:
    """Expectation values of ``obs`` over a strictly increasing time grid."""
    obs = Observable.parse(obs)
    grid = _time_grid(times)
    values, residue = _ExpectationKernel(packet, obs).evaluate(grid)
    return ExpectationSeries(
        observable=obs,
        times=grid,
        values=values,
        center=packet.center,
        half_width=packet.half_width,
        hbar=packet.hbar,
        max_residue=residue,
    )


def norm(packet: WavePacket) -> float:
    """Sum of |c_m|^2."""
    return float(np.sum(packet.weights))


def energy_mean(packet: WavePacket) -> float:
    """<H> = sum |c_m|^2 E_{n+m}."""
    gaps = np.array([energy_gap(packet.system, packet.center, int(level)) for level in packet.levels])
    return energy(packet.system, packet.center) + float(packet.weights @ gaps)


def energy_spread(packet: WavePacket) -> float:
    """Standard deviation of the energy, as a central moment of exact level gaps."""
    gaps = np.array([energy_gap(packet.system, packet.center, int(level)) for level in packet.levels])
    weights = packet.weights
    mean_gap = float(weights @ gaps)
    return math.sqrt(float(weights @ (gaps - mean_gap) ** 2))


def oscillation_amplitude(series: ExpectationSeries) -> float:
    """Half the peak-to-peak range of a series."""
    return float(np.max(series.values) - np.min(series.values)) / 2
