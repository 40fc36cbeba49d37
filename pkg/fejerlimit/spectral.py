"""Fourier-series machinery: coefficients, block sums, partial sums, Fejer means and overshoot metrics."""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
import numpy.typing as npt

from . import errors

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]
ComplexValue = Union[complex, ComplexArray]
TimeLike = Union[float, npt.ArrayLike]

# relative tolerance on f_{-s} = conj(f_s) for coefficient sets flagged as real signals
REALITY_TOLERANCE = 1e-12
OVERSHOOT_BLOCK_TERMS = 2**22

# we use single letter names for sums and indices, following the usual Fourier notation
# pylint: disable=invalid-name


class SummationKind(str, enum.Enum):
    """How a truncated Fourier series is summed."""

    PARTIAL = "partial"
    FEJER = "fejer"


@dataclass(frozen=True, eq=False)
class FourierCoefficients:
    r"""Complex Fourier coefficients :math:`f_s`, :math:`s = -S, \dots, S`, of a periodic quantity.

    The coefficient array is stored densely with index ``s + S`` and is made read-only on construction,
    so instances can be shared between threads and used as dictionary values without copying.

    Attributes
    ----------
    max_order: int
        The truncation order S >= 0.
    omega: float
        The fundamental angular frequency, in radians per unit time.
    coeffs: ndarray
        Complex array of length 2S+1.
    real_signal: bool, optional
        When True the coefficients describe a real signal and satisfy f_{-s} = conj(f_s).
    """

    max_order: int
    omega: float
    coeffs: ComplexArray
    real_signal: bool = False

    def __post_init__(self) -> None:
        if self.max_order < 0:
            raise ValueError(f"{self.max_order=} must be non-negative")
        if not self.omega > 0:
            raise ValueError(f"{self.omega=} must be positive")
        coeffs = np.array(self.coeffs, dtype=np.complex128)
        if coeffs.shape != (2 * self.max_order + 1,):
            raise ValueError(f"coefficient array has shape {coeffs.shape}, expected ({2 * self.max_order + 1},)")
        if self.real_signal:
            mirrored = np.conj(coeffs[::-1])
            scale = max(float(np.max(np.abs(coeffs))), 1.0)
            if np.max(np.abs(coeffs - mirrored)) > REALITY_TOLERANCE * scale:
                raise ValueError("coefficients flagged as real_signal must satisfy f_{-s} = conj(f_s)")
        coeffs.flags.writeable = False
        # frozen dataclass; the validated copy replaces the caller's array
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def orders(self) -> npt.NDArray[np.int64]:
        """Harmonic indices -S..S in storage order."""
        return np.arange(-self.max_order, self.max_order + 1)

    def coefficient(self, s: int) -> complex:
        """Return f_s."""
        if abs(s) > self.max_order:
            raise errors.IndexRangeError(f"harmonic {s=} outside [-{self.max_order}, {self.max_order}]")
        return complex(self.coeffs[s + self.max_order])

    def terms(self, beta: int, alpha: int, t: TimeLike) -> ComplexArray:
        r"""Individual terms :math:`f_s e^{i s \omega t}` for s = beta..alpha, stacked along axis 0."""
        s = np.arange(beta, alpha + 1)
        phases = np.exp(1j * self.omega * np.multiply.outer(s, np.asarray(t, dtype=np.float64)))
        weights = self.coeffs[s + self.max_order].reshape(s.shape + (1,) * np.ndim(t))
        return weights * phases

    def truncated(self, order: int) -> FourierCoefficients:
        """Return the coefficients with |s| <= order."""
        if not 0 <= order <= self.max_order:
            raise errors.IndexRangeError(f"{order=} outside [0, {self.max_order}]")
        start = self.max_order - order
        return FourierCoefficients(
            max_order=order,
            omega=self.omega,
            coeffs=self.coeffs[start : start + 2 * order + 1],
            real_signal=self.real_signal,
        )


@dataclass(frozen=True)
class PeriodicSignal:
    """A real periodic quantity f(t) with period T.

    Attributes
    ----------
    period: float
        The period T > 0.
    evaluator: Callable
        Vectorized map from times in [0, T) to real values.
    name: str, optional
        Label used in reports.
    """

    period: float
    evaluator: Callable[[FloatArray], FloatArray]
    name: str = "signal"

    def __post_init__(self) -> None:
        if not self.period > 0:
            raise ValueError(f"{self.period=} must be positive")

    @property
    def omega(self) -> float:
        """Fundamental angular frequency 2*pi/T."""
        return 2 * math.pi / self.period

    def __call__(self, t: TimeLike) -> FloatArray:
        """Evaluate the signal, wrapping t into [0, T)."""
        wrapped = np.mod(np.asarray(t, dtype=np.float64), self.period)
        return np.asarray(self.evaluator(wrapped), dtype=np.float64)


def _as_value(result: ComplexArray, t: TimeLike) -> ComplexValue:
    """Collapse 0-d results back to a Python complex for scalar time arguments."""
    if np.ndim(t) == 0:
        return complex(result)
    return result


def _check_block(coeffs: FourierCoefficients, alpha: int, beta: int) -> None:
    if beta > alpha:
        raise ValueError(f"{beta=} must be <= {alpha=}")
    if beta < -coeffs.max_order or alpha > coeffs.max_order:
        raise errors.IndexRangeError(
            f"block [{beta}, {alpha}] outside coefficient range [-{coeffs.max_order}, {coeffs.max_order}]"
        )


def _check_fejer(coeffs: FourierCoefficients, N: int) -> None:
    if N < 0:
        raise ValueError(f"{N=} must be non-negative")
    if 2 * N > coeffs.max_order:
        raise errors.IndexRangeError(f"2N = {2 * N} exceeds the coefficient order S = {coeffs.max_order}")


def compute_coefficients(
    signal: PeriodicSignal, max_order: int, samples_per_period: int | None = None
) -> FourierCoefficients:
    r"""Fourier coefficients of a real periodic signal by the uniform-grid rectangle rule.

    .. math::
        f_s = \frac{1}{K} \sum_{k=0}^{K-1} f(t_k) e^{-i s \omega t_k}, \quad t_k = k T / K

    Only s >= 0 is computed; negative orders are mirrored as complex conjugates, so the result is
    flagged ``real_signal`` by construction.
    The rule is spectrally accurate for smooth periodic signals.
    Discontinuous signals are accepted, but their coefficients are only accurate to O(1/K);
    sample the jump instants at the midpoint value for the best rate.

    Arguments
    ---------
    signal: PeriodicSignal
        The signal to transform.
    max_order: int
        Truncation order S >= 0.
    samples_per_period: int, optional
        Grid size K. Must be at least 8S + 8; defaults to that floor.

    Returns
    -------
    FourierCoefficients
        Coefficients for s = -S..S with omega = 2*pi/T.
    """
    if not signal.period > 0:
        raise ValueError(f"{signal.period=} must be positive")
    if max_order < 0:
        raise ValueError(f"{max_order=} must be non-negative")
    floor = 8 * max_order + 8
    if samples_per_period is None:
        samples_per_period = floor
    if samples_per_period < floor:
        raise errors.UndersampledError(f"{samples_per_period=} is below the sampling floor 8*max_order + 8 = {floor}")
    fractions = np.arange(samples_per_period) / samples_per_period
    times = signal.period * fractions
    values = signal(times)
    positive = np.empty(max_order + 1, dtype=np.complex128)
    for s in range(max_order + 1):
        positive[s] = np.mean(values * np.exp(-2j * math.pi * s * fractions))
    coeffs = np.concatenate([np.conj(positive[:0:-1]), positive])
    logger.debug("computed %d coefficients of %s from %d samples", coeffs.size, signal.name, samples_per_period)
    return FourierCoefficients(max_order=max_order, omega=signal.omega, coeffs=coeffs, real_signal=True)


def sigma(coeffs: FourierCoefficients, alpha: int, beta: int, t: TimeLike) -> ComplexValue:
    r"""Block sum :math:`\Sigma(\alpha, \beta) = \sum_{s=\beta}^{\alpha} f_s e^{i s \omega t}`."""
    _check_block(coeffs, alpha, beta)
    return _as_value(coeffs.terms(beta, alpha, t).sum(axis=0), t)


def partial_sum(coeffs: FourierCoefficients, l: int, t: TimeLike) -> ComplexValue:
    r"""The l-th partial sum of the Fourier series, :math:`\Sigma(l, -l)`."""
    if not 0 <= l <= coeffs.max_order:
        raise errors.IndexRangeError(f"partial sum order {l=} outside [0, {coeffs.max_order}]")
    return sigma(coeffs, l, -l, t)


def fejer_mean(coeffs: FourierCoefficients, N: int, t: TimeLike) -> ComplexValue:
    r"""Arithmetic mean of the partial sums of orders 0..2N.

    .. math::
        \frac{1}{2N+1} \sum_{l=0}^{2N} \Sigma(l, -l)

    The 2N+1 partial sums are accumulated one order at a time, so this is the mean of
    partial sums as written, not the kernel-weighted form.
    """
    _check_fejer(coeffs, N)
    terms = coeffs.terms(-2 * N, 2 * N, t)
    center = 2 * N
    running = np.array(terms[center])
    total = np.array(running)
    for l in range(1, 2 * N + 1):
        running = running + terms[center + l] + terms[center - l]
        total = total + running
    return _as_value(total / (2 * N + 1), t)


def double_sum(coeffs: FourierCoefficients, N: int, t: TimeLike) -> ComplexValue:
    r"""The rearranged packet sum :math:`\frac{1}{2N+1} \sum_{l=0}^{2N} \Sigma(2N - l, -l)`.

    Every block is summed on its own index range; the result equals :func:`fejer_mean`
    only through the exact rearrangement identity, which is what makes comparing the two meaningful.
    """
    _check_fejer(coeffs, N)
    terms = coeffs.terms(-2 * N, 2 * N, t)
    center = 2 * N
    total = np.zeros(terms.shape[1:], dtype=np.complex128)
    for l in range(2 * N + 1):
        # Sigma(2N - l, -l) covers s = -l .. 2N - l
        total = total + terms[center - l : center + 2 * N - l + 1].sum(axis=0)
    return _as_value(total / (2 * N + 1), t)


def packet_sum(coeffs: FourierCoefficients, N: int, t: TimeLike) -> ComplexValue:
    r"""Packet double sum with Bohr phases and Fourier-component matrix elements.

    .. math::
        \frac{1}{2N+1} \sum_{m'=-N}^{N} \sum_{m=-N}^{N} f_{m'-m} e^{i (m'-m) \omega t}

    This is the equally-weighted expectation once level spacings and matrix elements are replaced
    by their classical counterparts, summed pair by pair.
    """
    _check_fejer(coeffs, N)
    terms = coeffs.terms(-2 * N, 2 * N, t)
    center = 2 * N
    total = np.zeros(terms.shape[1:], dtype=np.complex128)
    for m_prime in range(-N, N + 1):
        for m in range(-N, N + 1):
            total = total + terms[center + m_prime - m]
    return _as_value(total / (2 * N + 1), t)


def fejer_weights(N: int) -> FloatArray:
    """Triangular Fejer-kernel weights 1 - |s|/(2N+1) for s = -2N..2N."""
    if N < 0:
        raise ValueError(f"{N=} must be non-negative")
    s = np.arange(-2 * N, 2 * N + 1)
    return 1.0 - np.abs(s) / (2 * N + 1)


def kernel_sum(coeffs: FourierCoefficients, N: int, t: TimeLike) -> ComplexValue:
    """Fejer mean written directly as a kernel-weighted trigonometric sum."""
    _check_fejer(coeffs, N)
    terms = coeffs.terms(-2 * N, 2 * N, t)
    weights = fejer_weights(N).reshape((-1,) + (1,) * np.ndim(t))
    return _as_value((weights * terms).sum(axis=0), t)


def evaluate(coeffs: FourierCoefficients, kind: SummationKind | str, order: int, t: TimeLike) -> ComplexValue:
    """Sum the series the requested way; ``order`` is l for partial sums and N for Fejer means."""
    kind = SummationKind(kind)
    if kind is SummationKind.PARTIAL:
        return partial_sum(coeffs, order, t)
    return fejer_mean(coeffs, order, t)


def overshoot_metric(
    coeffs: FourierCoefficients,
    summation_kind: SummationKind | str,
    order: int,
    lo: float,
    hi: float,
    t_grid: npt.ArrayLike,
) -> float:
    """Largest excursion of the summed series outside the band [lo, hi] over a time grid.

    Arguments
    ---------
    coeffs: FourierCoefficients
        Coefficients of the signal; Fejer means of parameter N need S >= 2N.
    summation_kind: SummationKind | str
        ``partial`` or ``fejer``.
    order: int
        Partial-sum order l, or Fejer parameter N.
    lo: float
        Lower edge of the band, usually the signal minimum.
    hi: float
        Upper edge of the band, usually the signal maximum.
    t_grid: array_like
        Evaluation times; should hold at least 16 * order points per period to resolve the kernel ripple.

    Returns
    -------
    float
        max over the grid of max(value - hi, lo - value, 0).
    """
    grid = np.asarray(t_grid, dtype=np.float64).ravel()
    if grid.size == 0:
        raise ValueError("t_grid must not be empty")
    if grid.size < 16 * order:
        logger.warning("overshoot grid of %d points may not resolve order %d ripple", grid.size, order)
    # blocks keep the stacked terms array near OVERSHOOT_BLOCK_TERMS entries
    width = 4 * order + 1 if SummationKind(summation_kind) is SummationKind.FEJER else 2 * order + 1
    blocks = min(grid.size, max(1, math.ceil(grid.size * width / OVERSHOOT_BLOCK_TERMS)))
    excess = 0.0
    for block in np.array_split(grid, blocks):
        values = np.real(np.asarray(evaluate(coeffs, summation_kind, order, block)))
        excess = max(excess, float(np.max(values - hi)), float(np.max(lo - values)))
    return excess


def period_grid(period: float, points: int, periods: int = 1) -> FloatArray:
    """Uniform grid of ``points`` samples per period over ``periods`` periods, endpoint excluded."""
    if not period > 0:
        raise ValueError(f"{period=} must be positive")
    if points < 1:
        raise ValueError(f"{points=} must be positive")
    total = points * periods
    return period * periods * (np.arange(total) / total)


def _empty_coefficients(max_order: int) -> ComplexArray:
    if max_order < 0:
        raise ValueError(f"{max_order=} must be non-negative")
    return np.zeros(2 * max_order + 1, dtype=np.complex128)


def constant_coefficients(max_order: int, value: float = 1.0, omega: float = 1.0) -> FourierCoefficients:
    """Coefficients of the constant signal f(t) = value."""
    coeffs = _empty_coefficients(max_order)
    coeffs[max_order] = value
    return FourierCoefficients(max_order=max_order, omega=omega, coeffs=coeffs, real_signal=True)


def cosine_coefficients(max_order: int, amplitude: float = 1.0, omega: float = 1.0) -> FourierCoefficients:
    """Coefficients of amplitude * cos(omega t): f_{+-1} = amplitude / 2."""
    coeffs = _empty_coefficients(max_order)
    if max_order >= 1:
        coeffs[max_order + 1] = coeffs[max_order - 1] = amplitude / 2
    return FourierCoefficients(max_order=max_order, omega=omega, coeffs=coeffs, real_signal=True)


def square_wave_coefficients(max_order: int, amplitude: float = 1.0, omega: float = 1.0) -> FourierCoefficients:
    r"""Coefficients of the square wave that is +amplitude on (0, T/2) and -amplitude on (T/2, T).

    :math:`f_s = 2 A / (i \pi s)` for odd s, zero otherwise.
    """
    coeffs = _empty_coefficients(max_order)
    s = np.arange(-max_order, max_order + 1)
    odd = s % 2 == 1
    coeffs[odd] = 2 * amplitude / (1j * math.pi * s[odd])
    return FourierCoefficients(max_order=max_order, omega=omega, coeffs=coeffs, real_signal=True)


def triangle_wave_coefficients(max_order: int, peak: float = 1.0, omega: float = 1.0) -> FourierCoefficients:
    r"""Coefficients of the triangle wave rising from 0 at t = 0 to ``peak`` at t = T/2.

    :math:`f_0 = A/2` and :math:`f_s = -2A / (\pi^2 s^2)` for odd s.
    """
    coeffs = _empty_coefficients(max_order)
    s = np.arange(-max_order, max_order + 1)
    odd = s % 2 == 1
    coeffs[max_order] = peak / 2
    coeffs[odd] = -2 * peak / (math.pi**2 * s[odd] ** 2)
    return FourierCoefficients(max_order=max_order, omega=omega, coeffs=coeffs, real_signal=True)


def constant_signal(value: float = 1.0, period: float = 2 * math.pi) -> PeriodicSignal:
    """f(t) = value."""
    return PeriodicSignal(period=period, evaluator=lambda t: np.full_like(t, value), name="constant")


def cosine_signal(amplitude: float = 1.0, period: float = 2 * math.pi) -> PeriodicSignal:
    """f(t) = amplitude * cos(2 pi t / T)."""
    omega = 2 * math.pi / period
    return PeriodicSignal(period=period, evaluator=lambda t: amplitude * np.cos(omega * t), name="cosine")


def square_wave_signal(amplitude: float = 1.0, period: float = 2 * math.pi) -> PeriodicSignal:
    """Square wave +amplitude on (0, T/2), -amplitude on (T/2, T), and 0 at the jump instants."""

    def evaluator(t: FloatArray) -> FloatArray:
        phase = t / period
        values = np.where(phase < 0.5, amplitude, -amplitude)
        return np.where((phase == 0.0) | (phase == 0.5), 0.0, values)

    return PeriodicSignal(period=period, evaluator=evaluator, name="square")


def triangle_wave_signal(peak: float = 1.0, period: float = 2 * math.pi) -> PeriodicSignal:
    """Triangle wave rising from 0 at t = 0 to ``peak`` at t = T/2 and back."""

    def evaluator(t: FloatArray) -> FloatArray:
        phase = t / period
        return 2 * peak * np.minimum(phase, 1.0 - phase)

    return PeriodicSignal(period=period, evaluator=evaluator, name="triangle")
