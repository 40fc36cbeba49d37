"""Classical-limit experiments.

Drives n -> infinity and hbar -> 0 with the action n*hbar fixed, and N -> infinity with N/n -> 0,
then measures how the packet expectation values approach the classical orbit, its Fejer means
and its Fourier partial sums.
"""

from __future__ import annotations

import enum
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
import numpy.typing as npt
from scipy import optimize

from . import errors
from .qsystems import (
    EigenSystem,
    Observable,
    classical_coefficients,
    classical_frequency,
    classical_range,
    classical_trajectory,
    energy,
    matrix_element,
)
from .spectral import (
    FloatArray,
    FourierCoefficients,
    PeriodicSignal,
    SummationKind,
    compute_coefficients,
    fejer_mean,
    overshoot_metric,
    partial_sum,
    period_grid,
)
from .wavepacket import (
    energy_mean,
    energy_spread,
    equal_weight_packet,
    expectation_series,
    gaussian_profile,
    general_packet,
    oscillation_amplitude,
    poisson_profile,
)

logger = logging.getLogger(__name__)

DEFAULT_GAMMA = 0.4
DEFAULT_TIME_POINTS = 256
ERROR_FLOOR = 1e-12
PHASE_CANDIDATES = 512

# physics notation: n, N, E
# pylint: disable=invalid-name


class Reference(str, enum.Enum):
    """What a quantum series is compared against."""

    CLASSICAL = "classical"
    FEJER = "fejer"
    PARTIAL = "partial"


@dataclass(frozen=True)
class LimitSchedule:
    """Schedule of (n, hbar, N) with the action J = n*hbar held fixed.

    Attributes
    ----------
    action: float
        The classical action J.
    n_values: tuple[int, ...]
        Strictly increasing center quantum numbers.
    gamma: float
        Exponent in N(n) = max(1, floor(n**gamma)), between 0 and 1.
    rounding: str, optional
        ``floor`` (default) or ``ceil`` for the power rule.
    """

    action: float
    n_values: tuple[int, ...]
    gamma: float = DEFAULT_GAMMA
    rounding: str = "floor"

    def __post_init__(self) -> None:
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        if not self.action > 0:
            raise errors.ScheduleError(f"{self.action=} must be positive")
        if not 0 < self.gamma < 1:
            raise errors.ScheduleError(f"{self.gamma=} must lie in (0, 1)")
        if self.rounding not in ("floor", "ceil"):
            raise errors.ScheduleError(f"{self.rounding=} must be 'floor' or 'ceil'")
        if not self.n_values:
            raise errors.ScheduleError("schedule needs at least one n")
        if any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise errors.ScheduleError(f"{self.n_values=} must be strictly increasing")
        for n in self.n_values:
            if n < 2:
                raise errors.ScheduleError(f"{n=} must be at least 2")
            if n - self.half_width(n) <= 0:
                raise errors.ScheduleError(f"N({n}) = {self.half_width(n)} violates n - N > 0")
        ratios = [self.half_width(n) / n for n in self.n_values]
        if any(b >= a for a, b in zip(ratios, ratios[1:])):
            raise errors.ScheduleError(f"N(n)/n must decrease along the schedule, got {ratios}")

    def half_width(self, n: int) -> int:
        """N(n) = max(1, floor(n**gamma)) or its ceil variant."""
        power = n**self.gamma
        rounded = math.ceil(power) if self.rounding == "ceil" else math.floor(power)
        return max(1, int(rounded))

    def hbar(self, n: int) -> float:
        """hbar(n) = J / n."""
        return self.action / n

    def points(self) -> list[tuple[int, float, int]]:
        """The (n, hbar, N) triples in schedule order."""
        return [(n, self.hbar(n), self.half_width(n)) for n in self.n_values]


@dataclass(frozen=True)
class ErrorNorms:
    """Sup-norm and RMS deviation of a series from a reference on the evaluation grid."""

    sup: float
    rms: float

    @classmethod
    def between(cls, values: FloatArray, reference: FloatArray) -> ErrorNorms:
        """Norms of values - reference."""
        difference = np.asarray(values) - np.asarray(reference)
        return cls(sup=float(np.max(np.abs(difference))), rms=float(np.sqrt(np.mean(difference**2))))


@dataclass(frozen=True)
class ScanPoint:
    """Result of one schedule point.

    Attributes
    ----------
    n, hbar, half_width:
        The schedule triple.
    reference_energy: float
        Classical reference energy, the packet mean <H>.
    frequency: float
        Classical frequency at level n; the grid spans one period of it.
    phase_offset: float
        Time offset applied to every reference (zero for the oscillator).
    scale: float
        Largest absolute value of the classical reference on the grid, for relative errors.
    errors: Mapping[Reference, ErrorNorms]
        Deviation of the quantum series from each reference.
    quantum_overshoot, fejer_overshoot, partial_overshoot: float
        Excursion beyond the classical range; references are measured on a dense grid.
    relative_energy_spread: float
        sqrt(<H^2> - <H>^2) / <H>.
    """

    n: int
    hbar: float
    half_width: int
    reference_energy: float
    frequency: float
    phase_offset: float
    scale: float
    errors: Mapping[Reference, ErrorNorms]
    quantum_overshoot: float
    fejer_overshoot: float
    partial_overshoot: float
    relative_energy_spread: float

    def relative_sup(self, reference: Reference | str) -> float:
        """Sup-norm error divided by the classical scale."""
        sup = self.errors[Reference(reference)].sup
        return sup / self.scale if self.scale > 0 else sup


@dataclass(frozen=True)
class RateFit:
    """Least-squares slope of log(error) against log(n), or the below-floor marker."""

    exponent: float | None
    below_floor: bool = False


@dataclass(frozen=True)
class ConvergenceReport:
    """All scan points of one classical-limit run, in schedule order."""

    system: EigenSystem
    observable: Observable
    schedule: LimitSchedule
    points: tuple[ScanPoint, ...]
    rates: Mapping[Reference, RateFit] = field(default_factory=dict)

    def sup_errors(self, reference: Reference | str) -> list[float]:
        """Sup-norm errors against ``reference`` along the schedule."""
        return [point.errors[Reference(reference)].sup for point in self.points]


def fit_phase_offset(
    times: FloatArray,
    quantum: FloatArray,
    classical: Callable[[FloatArray], FloatArray],
    period: float,
) -> float:
    """Time offset tau maximizing the cross-correlation sum_t q(t) c(t - tau) over one period.

    A grid search over PHASE_CANDIDATES offsets is refined with a bounded scalar minimization.
    """
    centered = quantum - np.mean(quantum)

    def correlation(tau: float) -> float:
        return float(centered @ classical(times - tau))

    step = period / PHASE_CANDIDATES
    candidates = step * np.arange(PHASE_CANDIDATES)
    scores = np.array([correlation(tau) for tau in candidates])
    best = float(candidates[int(np.argmax(scores))])
    refined = optimize.minimize_scalar(
        lambda tau: -correlation(tau), bounds=(best - step, best + step), method="bounded", options={"xatol": 1e-12}
    )
    tau = float(refined.x) if -refined.fun >= scores.max() else best
    return float(np.mod(tau, period))


def _overshoot(values: FloatArray, lo: float, hi: float) -> float:
    return float(max(np.max(values - hi), np.max(lo - values), 0.0))


def _scan_point(
    system: EigenSystem,
    obs: Observable,
    schedule: LimitSchedule,
    n: int,
    times: FloatArray | None,
    time_points: int,
) -> ScanPoint:
    hbar = schedule.hbar(n)
    N = schedule.half_width(n)
    model = system.with_hbar(hbar)
    packet = equal_weight_packet(model, n, N)
    frequency = classical_frequency(model, n)
    period = 2 * math.pi / frequency
    grid = period_grid(period, time_points) if times is None else np.asarray(times, dtype=np.float64)
    quantum = expectation_series(packet, obs, grid).values

    E = energy_mean(packet)
    lo, hi = classical_range(model, obs, E)

    def classical(shifted: FloatArray) -> FloatArray:
        return np.asarray(classical_trajectory(model, obs, E, shifted), dtype=np.float64)

    # constant classical quantities (well h, h2, p2) have no phase to fit
    tau = 0.0 if model.is_oscillator or lo == hi else fit_phase_offset(grid, quantum, classical, period)
    coeffs = classical_coefficients(model, obs, E, 2 * N)
    shifted = grid - tau
    references = {
        Reference.CLASSICAL: classical(shifted),
        Reference.FEJER: np.real(np.asarray(fejer_mean(coeffs, N, shifted))),
        Reference.PARTIAL: np.real(np.asarray(partial_sum(coeffs, N, shifted))),
    }
    norms = {ref: ErrorNorms.between(quantum, values) for ref, values in references.items()}
    dense = period_grid(2 * math.pi / coeffs.omega, max(4096, 64 * N))
    point = ScanPoint(
        n=n,
        hbar=hbar,
        half_width=N,
        reference_energy=E,
        frequency=frequency,
        phase_offset=tau,
        scale=float(np.max(np.abs(references[Reference.CLASSICAL]))),
        errors=norms,
        quantum_overshoot=_overshoot(quantum, lo, hi),
        fejer_overshoot=overshoot_metric(coeffs, SummationKind.FEJER, N, lo, hi, dense),
        partial_overshoot=overshoot_metric(coeffs, SummationKind.PARTIAL, N, lo, hi, dense),
        relative_energy_spread=energy_spread(packet) / E,
    )
    logger.debug(
        "n=%d N=%d: sup errors classical=%.3e fejer=%.3e partial=%.3e",
        n,
        N,
        norms[Reference.CLASSICAL].sup,
        norms[Reference.FEJER].sup,
        norms[Reference.PARTIAL].sup,
    )
    return point


def fit_power_law(n_values: Sequence[float], errors_: Sequence[float]) -> RateFit:
    """Slope of log(error) against log(n) by least squares.

    Errors at or below ERROR_FLOOR yield the below-floor marker instead of an exponent.
    """
    if len(n_values) != len(errors_):
        raise ValueError("n_values and errors must have the same length")
    if len(n_values) < 3:
        raise ValueError(f"rate fit needs at least 3 points, got {len(n_values)}")
    values = np.asarray(errors_, dtype=np.float64)
    if np.any(values <= ERROR_FLOOR):
        return RateFit(exponent=None, below_floor=True)
    slope, _ = np.polyfit(np.log(np.asarray(n_values, dtype=np.float64)), np.log(values), 1)
    return RateFit(exponent=float(slope))


def fit_rate(report: ConvergenceReport) -> dict[Reference, RateFit]:
    """Fitted convergence exponent of the sup-norm error for every reference."""
    n_values = [point.n for point in report.points]
    return {reference: fit_power_law(n_values, report.sup_errors(reference)) for reference in Reference}


def run_scan(
    system: EigenSystem,
    obs: Observable | str,
    schedule: LimitSchedule,
    times: npt.ArrayLike | None = None,
    time_points: int = DEFAULT_TIME_POINTS,
    max_workers: int = 1,
) -> ConvergenceReport:
    """Run the classical-limit scan.

    For each scheduled n the equally-weighted packet is built at hbar = J/n, its expectation series
    is compared with the classical orbit at the packet energy, with the Fejer mean of parameter N and
    with the order-N partial sum of that orbit's analytic Fourier series.
    The square-well references are shifted by a fitted time offset; oscillator phases are exact.

    Arguments
    ---------
    system: EigenSystem
        The model; its hbar is replaced along the schedule.
    obs: Observable | str
        The observable.
    schedule: LimitSchedule
        The limit schedule.
    times: array_like, optional
        Evaluation grid shared by all points. Defaults to ``time_points`` samples over one classical period.
    time_points: int, optional
        Default grid size.
    max_workers: int, optional
        Scan points evaluated concurrently; results always come back in schedule order.

    Returns
    -------
    ConvergenceReport
        Per-point errors plus fitted exponents when the schedule has at least 3 points.
    """
    obs = Observable.parse(obs)
    grid = None if times is None else np.asarray(times, dtype=np.float64)
    for n in schedule.n_values:
        if n - schedule.half_width(n) < system.ground_level:
            raise errors.ScheduleError(f"band around {n=} leaves the spectrum of {system.kind.value}")
    logger.info(
        "scan %s <%s>: J=%g gamma=%g n=%s",
        system.kind.value,
        obs.value,
        schedule.action,
        schedule.gamma,
        schedule.n_values,
    )

    def run(n: int) -> ScanPoint:
        return _scan_point(system, obs, schedule, n, grid, time_points)

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            points = tuple(pool.map(run, schedule.n_values))
    else:
        points = tuple(run(n) for n in schedule.n_values)
    report = ConvergenceReport(system=system, observable=obs, schedule=schedule, points=points)
    if len(points) >= 3:
        report = ConvergenceReport(system, obs, schedule, points, fit_rate(report))
    logger.info("scan finished with %d points", len(points))
    return report


@dataclass(frozen=True, eq=False)
class SummationComparison:
    """Partial sums and Fejer means of one signal at matched order."""

    order: int
    times: FloatArray
    signal: FloatArray
    partial: FloatArray
    fejer: FloatArray
    band: tuple[float, float]
    partial_overshoot: float
    fejer_overshoot: float


def compare_summations(
    signal: PeriodicSignal,
    order: int,
    times: npt.ArrayLike,
    coefficients: FourierCoefficients | None = None,
    band: tuple[float, float] | None = None,
) -> SummationComparison:
    """Evaluate the order-``order`` partial sum and the Fejer mean of parameter ``order`` side by side.

    Arguments
    ---------
    signal: PeriodicSignal
        The signal.
    order: int
        Partial-sum order l, used as the Fejer parameter N as well.
    times: array_like
        Evaluation grid; overshoots are measured on it.
    coefficients: FourierCoefficients, optional
        Analytic coefficients of order at least 2*order, cut back to 2*order; computed by quadrature when omitted.
    band: tuple[float, float], optional
        Range [lo, hi] of the signal; sampled from the signal on a dense grid when omitted.
    """
    if order < 0:
        raise ValueError(f"{order=} must be non-negative")
    grid = np.asarray(times, dtype=np.float64)
    if coefficients is None:
        coefficients = compute_coefficients(signal, 2 * order)
    else:
        coefficients = coefficients.truncated(2 * order)
    if band is None:
        sampled = signal(period_grid(signal.period, max(4096, 64 * order)))
        band = (float(np.min(sampled)), float(np.max(sampled)))
    lo, hi = band
    return SummationComparison(
        order=order,
        times=grid,
        signal=signal(grid),
        partial=np.real(np.asarray(partial_sum(coefficients, order, grid))),
        fejer=np.real(np.asarray(fejer_mean(coefficients, order, grid))),
        band=band,
        partial_overshoot=overshoot_metric(coefficients, SummationKind.PARTIAL, order, lo, hi, grid),
        fejer_overshoot=overshoot_metric(coefficients, SummationKind.FEJER, order, lo, hi, grid),
    )


@dataclass(frozen=True)
class AmplitudeRatio:
    """Amplitude of <x> on a shaped packet relative to the equally-weighted packet."""

    n: int
    half_width: int
    ratio: float


def coefficient_dependence(
    system: EigenSystem,
    schedule: LimitSchedule,
    profile: str = "gaussian",
    width_fraction: float = 1 / 3,
    obs: Observable | str = Observable.X,
    time_points: int = DEFAULT_TIME_POINTS,
) -> list[AmplitudeRatio]:
    """Compare shaped and equal-weight packets along a schedule.

    ``gaussian`` uses sigma = width_fraction * N; ``poisson`` uses mean = N.
    """
    obs = Observable.parse(obs)
    ratios: list[AmplitudeRatio] = []
    for n, hbar, N in schedule.points():
        model = system.with_hbar(hbar)
        if profile == "gaussian":
            weights = gaussian_profile(N, width_fraction * N)
        elif profile == "poisson":
            weights = poisson_profile(N, float(N))
        else:
            raise ValueError(f"unknown {profile=}")
        grid = period_grid(2 * math.pi / classical_frequency(model, n), time_points)
        equal = oscillation_amplitude(expectation_series(equal_weight_packet(model, n, N), obs, grid))
        shaped = oscillation_amplitude(expectation_series(general_packet(model, n, N, weights), obs, grid))
        ratios.append(AmplitudeRatio(n=n, half_width=N, ratio=shaped / equal))
        logger.debug("n=%d N=%d %s/equal amplitude ratio %.6f", n, N, profile, shaped / equal)
    return ratios


def energy_spread_scan(system: EigenSystem, schedule: LimitSchedule) -> list[tuple[int, int, float]]:
    """Relative energy spread sqrt(<H^2> - <H>^2)/<H> of the equal-weight packet along the schedule."""
    spreads: list[tuple[int, int, float]] = []
    for n, hbar, N in schedule.points():
        packet = equal_weight_packet(system.with_hbar(hbar), n, N)
        spreads.append((n, N, energy_spread(packet) / energy_mean(packet)))
    return spreads


def matrix_fourier_deviation(system: EigenSystem, obs: Observable | str, n: int, max_harmonic: int) -> float:
    """How far <n+s|f|n> is from the classical Fourier component f_s at energy E_n.

    Returns max over |s| <= max_harmonic of |<n+s|f|n> - f_s| divided by the largest |f_s|.
    """
    obs = Observable.parse(obs)
    if max_harmonic < 0 or n - max_harmonic < system.ground_level:
        raise errors.IndexRangeError(f"harmonics up to {max_harmonic} around {n=} leave the spectrum")
    coeffs = classical_coefficients(system, obs, energy(system, n), max_harmonic)
    quantum = np.array([matrix_element(system, obs, n + s, n) for s in range(-max_harmonic, max_harmonic + 1)])
    scale = float(np.max(np.abs(coeffs.coeffs)))
    return float(np.max(np.abs(quantum - coeffs.coeffs))) / scale
