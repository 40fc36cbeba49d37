"""Integrable quantum models: spectra, matrix elements, closed-form oscillator expectations and classical orbits."""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import numpy.typing as npt

from . import errors
from .spectral import (
    ComplexArray,
    FloatArray,
    FourierCoefficients,
    PeriodicSignal,
    TimeLike,
    constant_coefficients,
    square_wave_coefficients,
    triangle_wave_coefficients,
)

# physics notation: n, N, E, L, mu
# pylint: disable=invalid-name


class SystemKind(str, enum.Enum):
    """Which integrable model an EigenSystem describes."""

    HARMONIC_OSCILLATOR = "harmonic_oscillator"
    INFINITE_SQUARE_WELL = "infinite_square_well"


class Observable(str, enum.Enum):
    """Observables with known matrix elements and classical counterparts."""

    X = "x"
    P = "p"
    X2 = "x2"
    P2 = "p2"
    H = "h"
    H2 = "h2"

    @classmethod
    def parse(cls, value: Observable | str) -> Observable:
        """Accept an Observable or its name, case-insensitively."""
        if isinstance(value, Observable):
            return value
        try:
            return cls(str(value).lower())
        except ValueError as err:
            raise errors.UnsupportedObservableError(
                f"{value=} is not one of {[obs.value for obs in cls]}"
            ) from err


@dataclass(frozen=True)
class EigenSystem:
    """Parameters of a one-dimensional integrable quantum model.

    Attributes
    ----------
    kind: SystemKind
        harmonic oscillator (levels n >= 0) or infinite square well on [0, L] (levels n >= 1).
    mass: float
        Particle mass mu.
    hbar: float
        Planck constant.
    omega: float
        Oscillator angular frequency; ignored by the well.
    length: float
        Well width L; ignored by the oscillator.
    """

    kind: SystemKind
    mass: float = 1.0
    hbar: float = 1.0
    omega: float = 1.0
    length: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", SystemKind(self.kind))
        for name in ("mass", "hbar", "omega", "length"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name}={value} must be a finite positive number")

    @classmethod
    def harmonic_oscillator(cls, mass: float = 1.0, omega: float = 1.0, hbar: float = 1.0) -> EigenSystem:
        """One-dimensional harmonic oscillator."""
        return cls(SystemKind.HARMONIC_OSCILLATOR, mass=mass, hbar=hbar, omega=omega)

    @classmethod
    def infinite_square_well(cls, mass: float = 1.0, length: float = 1.0, hbar: float = 1.0) -> EigenSystem:
        """Particle in a box on [0, L]."""
        return cls(SystemKind.INFINITE_SQUARE_WELL, mass=mass, hbar=hbar, length=length)

    @property
    def is_oscillator(self) -> bool:
        """True for the harmonic oscillator."""
        return self.kind is SystemKind.HARMONIC_OSCILLATOR

    @property
    def ground_level(self) -> int:
        """Lowest allowed quantum number."""
        return 0 if self.is_oscillator else 1

    @property
    def well_unit(self) -> float:
        r"""Well energy scale :math:`\pi^2 \hbar^2 / (2 \mu L^2)`, so that E_n = n^2 times this."""
        return math.pi**2 * self.hbar**2 / (2 * self.mass * self.length**2)

    def with_hbar(self, hbar: float) -> EigenSystem:
        """Same model at a different Planck constant."""
        return dataclasses.replace(self, hbar=hbar)


def _check_level(system: EigenSystem, n: int) -> None:
    if n < system.ground_level:
        raise errors.IndexRangeError(
            f"level {n=} is below the ground level {system.ground_level} of {system.kind.value}"
        )


def energy(system: EigenSystem, n: int) -> float:
    r"""Eigenvalue E_n: :math:`(n + 1/2)\hbar\omega` or :math:`n^2 \pi^2 \hbar^2 / (2 \mu L^2)`."""
    _check_level(system, n)
    if system.is_oscillator:
        return (n + 0.5) * system.hbar * system.omega
    return n**2 * system.well_unit


def transition_frequency(system: EigenSystem, n_from: int, n_to: int) -> float:
    r"""Exact :math:`(E_{n_{to}} - E_{n_{from}}) / \hbar`, formed without subtracting large energies."""
    _check_level(system, n_from)
    _check_level(system, n_to)
    k = n_to - n_from
    if system.is_oscillator:
        return k * system.omega
    return (n_to + n_from) * k * system.well_unit / system.hbar


def energy_gap(system: EigenSystem, n_from: int, n_to: int) -> float:
    """Exact E_{n_to} - E_{n_from}."""
    _check_level(system, n_from)
    _check_level(system, n_to)
    k = n_to - n_from
    if system.is_oscillator:
        return k * system.hbar * system.omega
    return (n_to + n_from) * k * system.well_unit


def classical_frequency(system: EigenSystem, n: int) -> float:
    """Bohr frequency at level n: the central difference (E_{n+1} - E_{n-1}) / (2 hbar).

    Exactly omega for the oscillator; n pi^2 hbar / (mu L^2) for the well, which is also the
    classical round-trip frequency at energy E_n.
    """
    if n < 2:
        raise errors.IndexRangeError(f"classical frequency needs {n=} >= 2")
    return transition_frequency(system, n - 1, n + 1) / 2


def classical_frequency_at_energy(system: EigenSystem, E: float) -> float:
    """Angular frequency of the classical orbit with energy E."""
    if not E > 0:
        raise ValueError(f"{E=} must be positive")
    if system.is_oscillator:
        return system.omega
    speed = math.sqrt(2 * E / system.mass)
    return math.pi * speed / system.length


def bohr_deviation(system: EigenSystem, n: int, N: int) -> float:
    """Largest relative miss of the Bohr relation over a packet band.

    max over |m|, |m'| <= N of |(E_{n+m'} - E_{n+m})/hbar - (m' - m) w_n| / w_n, with w_n = classical_frequency(n).
    Zero for the oscillator; N^2 / (2n) for the well.
    """
    if N < 0 or n - N < system.ground_level:
        raise errors.IndexRangeError(f"band n={n} +- {N} leaves the spectrum")
    w_n = classical_frequency(system, n)
    worst = 0.0
    for m_prime in range(-N, N + 1):
        for m in range(-N, N + 1):
            miss = abs(transition_frequency(system, n + m, n + m_prime) - (m_prime - m) * w_n) / w_n
            worst = max(worst, miss)
    return worst


IntArray = npt.NDArray[np.int64]


def _oscillator_block(system: EigenSystem, obs: Observable, rows: IntArray, cols: IntArray) -> ComplexArray:
    hbar, mu, omega = system.hbar, system.mass, system.omega
    low = np.minimum(rows, cols).astype(np.float64)
    delta = cols - rows
    block = np.zeros(np.broadcast(rows, cols).shape, dtype=np.complex128)
    if obs is Observable.X:
        scale = math.sqrt(hbar / (2 * mu * omega))
        block = np.where(np.abs(delta) == 1, scale * np.sqrt(low + 1), 0.0).astype(np.complex128)
    elif obs is Observable.P:
        scale = math.sqrt(mu * hbar * omega / 2)
        # <n|p|n+1> = -i s sqrt(n+1), <n+1|p|n> = +i s sqrt(n+1)
        block = np.where(delta == 1, -1j * scale * np.sqrt(low + 1), block)
        block = np.where(delta == -1, 1j * scale * np.sqrt(low + 1), block)
    elif obs in (Observable.X2, Observable.P2):
        if obs is Observable.X2:
            scale, sign = hbar / (2 * mu * omega), 1.0
        else:
            scale, sign = mu * hbar * omega / 2, -1.0
        diagonal = (2 * rows + 1) * scale
        ladder = sign * np.sqrt((low + 1) * (low + 2)) * scale
        block = np.where(delta == 0, diagonal, np.where(np.abs(delta) == 2, ladder, 0.0)).astype(np.complex128)
    else:
        levels = (rows + 0.5) * hbar * omega
        power = 1 if obs is Observable.H else 2
        block = np.where(delta == 0, levels**power, 0.0).astype(np.complex128)
    return block


def _well_block(system: EigenSystem, obs: Observable, rows: IntArray, cols: IntArray) -> ComplexArray:
    hbar, length = system.hbar, system.length
    m = rows.astype(np.float64)
    n = cols.astype(np.float64)
    same = rows == cols
    odd = (rows + cols) % 2 == 1
    difference = np.where(same, 1.0, m**2 - n**2)  # placeholder 1 on the diagonal, masked below
    if obs is Observable.X:
        off = -8 * length * m * n / (math.pi**2 * difference**2)
        return np.where(same, length / 2, np.where(odd, off, 0.0)).astype(np.complex128)
    if obs is Observable.P:
        off = -1j * hbar * 4 * m * n / (length * difference)
        return np.where(odd & ~same, off, 0.0).astype(np.complex128)
    if obs is Observable.X2:
        parity = np.where((rows + cols) % 2 == 0, 1.0, -1.0)
        off = parity * 8 * length**2 * m * n / (math.pi**2 * difference**2)
        diagonal = length**2 * (1.0 / 3.0 - 1.0 / (2 * math.pi**2 * n**2))
        return np.where(same, diagonal, off).astype(np.complex128)
    levels = n**2 * system.well_unit
    if obs is Observable.P2:
        return np.where(same, 2 * system.mass * levels, 0.0).astype(np.complex128)
    power = 1 if obs is Observable.H else 2
    return np.where(same, levels**power, 0.0).astype(np.complex128)


def matrix_block(
    system: EigenSystem, obs: Observable | str, rows: Sequence[int], cols: Sequence[int] | None = None
) -> ComplexArray:
    """Dense table of matrix elements <row|obs|col> for the given level lists.

    Arguments
    ---------
    system: EigenSystem
        The model.
    obs: Observable | str
        The observable.
    rows: Sequence[int]
        Bra quantum numbers.
    cols: Sequence[int], optional
        Ket quantum numbers; defaults to ``rows``.

    Returns
    -------
    ndarray
        Complex array of shape (len(rows), len(cols)).
    """
    obs = Observable.parse(obs)
    row_levels = np.asarray(rows, dtype=np.int64).reshape(-1, 1)
    col_levels = np.asarray(row_levels.ravel() if cols is None else cols, dtype=np.int64).reshape(1, -1)
    if row_levels.size and int(row_levels.min()) < system.ground_level:
        raise errors.IndexRangeError(f"row level {int(row_levels.min())} is below the ground level")
    if col_levels.size and int(col_levels.min()) < system.ground_level:
        raise errors.IndexRangeError(f"column level {int(col_levels.min())} is below the ground level")
    rows_grid, cols_grid = np.broadcast_arrays(row_levels, col_levels)
    if system.is_oscillator:
        return _oscillator_block(system, obs, rows_grid, cols_grid)
    return _well_block(system, obs, rows_grid, cols_grid)


def matrix_element(system: EigenSystem, obs: Observable | str, n_row: int, n_col: int) -> complex:
    """The matrix element <n_row|obs|n_col>."""
    return complex(matrix_block(system, obs, [n_row], [n_col])[0, 0])


def _check_oscillator_packet(system: EigenSystem, n: int, N: int) -> None:
    if not system.is_oscillator:
        raise errors.UnsupportedObservableError("closed-form expectations exist only for the harmonic oscillator")
    if N < 0:
        raise errors.InvalidPacketError(f"{N=} must be non-negative")
    if n - N <= 0:
        raise errors.InvalidPacketError(f"packet needs n - N > 0, got {n=}, {N=}")


def ho_ladder_sums(n: int, N: int) -> tuple[float, float]:
    """The two sums in the oscillator closed forms.

    Returns
    -------
    tuple[float, float]
        sum_{m=-N+1}^{N} sqrt(n+m) and sum_{m=-N+2}^{N} sqrt((n+m)(n+m-1)); empty sums are zero.
    """
    first = np.arange(-N + 1, N + 1, dtype=np.float64)
    second = np.arange(-N + 2, N + 1, dtype=np.float64)
    return float(np.sum(np.sqrt(n + first))), float(np.sum(np.sqrt((n + second) * (n + second - 1))))


def ho_expectation_closed_form(
    system: EigenSystem, obs: Observable | str, n: int, N: int, t: TimeLike
) -> float | FloatArray:
    r"""Expectation values on the equally-weighted oscillator packet in closed form.

    With :math:`S_1 = \sum_{m=-N+1}^{N}\sqrt{n+m}` and :math:`S_2 = \sum_{m=-N+2}^{N}\sqrt{(n+m)(n+m-1)}`:

    * H: :math:`(n+1/2)\hbar\omega`
    * H2: :math:`((n+1/2)\hbar\omega)^2 + (\hbar\omega)^2 N(N+1)/3`
    * X: :math:`\frac{2}{2N+1}\sqrt{\hbar/(2\mu\omega)}\,S_1\cos\omega t`
    * X2: :math:`(n+1/2)\frac{\hbar}{\mu\omega} + \frac{\hbar}{\mu\omega}\frac{S_2}{2N+1}\cos 2\omega t`
    * P: :math:`-\frac{2}{2N+1}\sqrt{\hbar\mu\omega/2}\,S_1\sin\omega t`
    * P2: :math:`(n+1/2)\mu\hbar\omega - \mu\hbar\omega\frac{S_2}{2N+1}\cos 2\omega t`

    The momentum carries the sign fixed by the ladder matrix elements and the phase convention of
    the packet, so that p = mu dx/dt.
    """
    obs = Observable.parse(obs)
    _check_oscillator_packet(system, n, N)
    hbar, mu, omega = system.hbar, system.mass, system.omega
    times = np.asarray(t, dtype=np.float64)
    first, second = ho_ladder_sums(n, N)
    count = 2 * N + 1
    level = (n + 0.5) * hbar * omega
    if obs is Observable.H:
        values = np.full_like(times, level)
    elif obs is Observable.H2:
        values = np.full_like(times, level**2 + (hbar * omega) ** 2 * N * (N + 1) / 3)
    elif obs is Observable.X:
        values = (2 / count) * math.sqrt(hbar / (2 * mu * omega)) * first * np.cos(omega * times)
    elif obs is Observable.P:
        values = -(2 / count) * math.sqrt(hbar * mu * omega / 2) * first * np.sin(omega * times)
    elif obs is Observable.X2:
        values = (n + 0.5) * hbar / (mu * omega) + (hbar / (mu * omega)) * (second / count) * np.cos(2 * omega * times)
    else:
        values = (n + 0.5) * mu * hbar * omega - mu * hbar * omega * (second / count) * np.cos(2 * omega * times)
    if values.ndim == 0:
        return float(values)
    return values


def _well_phase(system: EigenSystem, E: float, times: FloatArray) -> FloatArray:
    """Orbit phase wrapped into [-pi, pi); x = L |u| / pi starts at the left wall moving right."""
    w = classical_frequency_at_energy(system, E)
    return np.mod(w * times + math.pi, 2 * math.pi) - math.pi


def classical_trajectory(system: EigenSystem, obs: Observable | str, E: float, t: TimeLike) -> float | FloatArray:
    """Value of the classical counterpart of ``obs`` along the orbit of energy E.

    Oscillator: x = sqrt(2E/(mu w^2)) cos wt, p = -sqrt(2 mu E) sin wt, x^2 and p^2 their squares.
    Well: x bounces between 0 and L at speed sqrt(2E/mu) starting at x = 0 moving right; p is the matching
    square wave of height sqrt(2 mu E); x^2 is its pointwise square and p^2 is 2 mu E throughout.
    H and H^2 are E and E^2.
    """
    obs = Observable.parse(obs)
    if not E > 0:
        raise ValueError(f"{E=} must be positive")
    times = np.asarray(t, dtype=np.float64)
    mu = system.mass
    if obs is Observable.H:
        values = np.full_like(times, E)
    elif obs is Observable.H2:
        values = np.full_like(times, E**2)
    elif obs is Observable.P2 and not system.is_oscillator:
        values = np.full_like(times, 2 * mu * E)
    elif system.is_oscillator:
        omega = system.omega
        amplitude = math.sqrt(2 * E / (mu * omega**2))
        momentum = math.sqrt(2 * mu * E)
        if obs is Observable.X:
            values = amplitude * np.cos(omega * times)
        elif obs is Observable.P:
            values = -momentum * np.sin(omega * times)
        elif obs is Observable.X2:
            values = E / (mu * omega**2) * (1 + np.cos(2 * omega * times))
        else:
            values = mu * E * (1 - np.cos(2 * omega * times))
    else:
        phase = _well_phase(system, E, times)
        position = system.length * np.abs(phase) / math.pi
        momentum = math.sqrt(2 * mu * E) * np.sign(phase)
        values = {
            Observable.X: position,
            Observable.P: momentum,
            Observable.X2: position**2,
        }[obs]
    if values.ndim == 0:
        return float(values)
    return values


def classical_range(system: EigenSystem, obs: Observable | str, E: float) -> tuple[float, float]:
    """Smallest and largest value the classical quantity takes on the orbit of energy E."""
    obs = Observable.parse(obs)
    if not E > 0:
        raise ValueError(f"{E=} must be positive")
    mu = system.mass
    momentum = math.sqrt(2 * mu * E)
    if obs is Observable.H:
        return E, E
    if obs is Observable.H2:
        return E**2, E**2
    if obs is Observable.P:
        return -momentum, momentum
    if obs is Observable.P2:
        return (0.0, momentum**2) if system.is_oscillator else (momentum**2, momentum**2)
    if system.is_oscillator:
        amplitude = math.sqrt(2 * E / (mu * system.omega**2))
        return (-amplitude, amplitude) if obs is Observable.X else (0.0, amplitude**2)
    return (0.0, system.length) if obs is Observable.X else (0.0, system.length**2)


def classical_signal(system: EigenSystem, obs: Observable | str, E: float) -> PeriodicSignal:
    """The classical trajectory at energy E as a PeriodicSignal."""
    obs = Observable.parse(obs)
    period = 2 * math.pi / classical_frequency_at_energy(system, E)
    return PeriodicSignal(
        period=period,
        evaluator=lambda times: np.asarray(classical_trajectory(system, obs, E, times), dtype=np.float64),
        name=f"{system.kind.value}:{obs.value}",
    )


def classical_coefficients(
    system: EigenSystem, obs: Observable | str, E: float, max_order: int
) -> FourierCoefficients:
    """Analytic Fourier coefficients of the classical trajectory at energy E, truncated at ``max_order``."""
    obs = Observable.parse(obs)
    omega = classical_frequency_at_energy(system, E)
    mu = system.mass
    if obs is Observable.H:
        return constant_coefficients(max_order, E, omega)
    if obs is Observable.H2:
        return constant_coefficients(max_order, E**2, omega)
    if not system.is_oscillator:
        length = system.length
        if obs is Observable.X:
            return triangle_wave_coefficients(max_order, length, omega)
        if obs is Observable.P:
            return square_wave_coefficients(max_order, math.sqrt(2 * mu * E), omega)
        if obs is Observable.P2:
            return constant_coefficients(max_order, 2 * mu * E, omega)
        # x^2 = L^2 u^2 / pi^2 on u in [-pi, pi)
        s = np.arange(-max_order, max_order + 1)
        safe = np.where(s == 0, 1, s)
        parity = np.where(s % 2 == 0, 1.0, -1.0)
        coeffs = np.where(s == 0, length**2 / 3, 2 * length**2 * parity / (math.pi**2 * safe**2))
        return FourierCoefficients(
            max_order=max_order, omega=omega, coeffs=coeffs.astype(np.complex128), real_signal=True
        )
    coeffs = np.zeros(2 * max_order + 1, dtype=np.complex128)

    def put(s: int, value: complex) -> None:
        if abs(s) <= max_order:
            coeffs[s + max_order] = value

    if obs is Observable.X:
        amplitude = math.sqrt(2 * E / (mu * system.omega**2))
        put(1, amplitude / 2)
        put(-1, amplitude / 2)
    elif obs is Observable.P:
        momentum = math.sqrt(2 * mu * E)
        # -B sin wt = (iB/2) e^{iwt} - (iB/2) e^{-iwt}
        put(1, 0.5j * momentum)
        put(-1, -0.5j * momentum)
    elif obs is Observable.X2:
        scale = E / (mu * system.omega**2)
        put(0, scale)
        put(2, scale / 2)
        put(-2, scale / 2)
    else:
        put(0, mu * E)
        put(2, -mu * E / 2)
        put(-2, -mu * E / 2)
    return FourierCoefficients(max_order=max_order, omega=omega, coeffs=coeffs, real_signal=True)
