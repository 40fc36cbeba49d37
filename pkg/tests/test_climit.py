"""Tests for the classical-limit harness"""

import math
import unittest
from unittest import mock

import numpy as np

from fejerlimit import errors
from fejerlimit.climit import (
    ErrorNorms,
    LimitSchedule,
    RateFit,
    Reference,
    coefficient_dependence,
    compare_summations,
    energy_spread_scan,
    fit_phase_offset,
    fit_power_law,
    fit_rate,
    matrix_fourier_deviation,
    run_scan,
)
from fejerlimit.qsystems import EigenSystem
from fejerlimit.spectral import (
    constant_signal,
    cosine_signal,
    period_grid,
    square_wave_coefficients,
    square_wave_signal,
)

# pylint: disable=invalid-name


class TestLimitSchedule(unittest.TestCase):
    """Schedules with fixed action and growing half width."""

    def test_points(self):
        """hbar = J/n and N = max(1, floor(n**gamma))."""
        schedule = LimitSchedule(action=1.0, n_values=(100, 1000, 10000), gamma=0.4)
        assert schedule.points() == [(100, 0.01, 6), (1000, 0.001, 15), (10000, 0.0001, 39)]
        assert LimitSchedule(1.0, (100, 1000, 10000), 0.4, rounding="ceil").half_width(100) == 7
        assert LimitSchedule(2.0, (2, 3), 0.1).half_width(2) == 1

    def test_validation(self):
        """Orders, exponents and bands are checked."""
        with self.assertRaises(errors.ScheduleError):
            _ = LimitSchedule(1.0, (1000, 100), 0.4)
        with self.assertRaises(errors.ScheduleError):
            _ = LimitSchedule(1.0, (100, 100), 0.4)
        with self.assertRaises(errors.ScheduleError):
            _ = LimitSchedule(1.0, (100,), 1.0)
        with self.assertRaises(errors.ScheduleError):
            _ = LimitSchedule(0.0, (100,), 0.4)
        with self.assertRaises(errors.ScheduleError):
            _ = LimitSchedule(1.0, (), 0.4)
        with self.assertRaises(errors.ScheduleError):
            _ = LimitSchedule(1.0, (100,), 0.4, rounding="round")
        # ceil(3**0.99) = 3 leaves no room below n
        with self.assertRaises(errors.ScheduleError):
            _ = LimitSchedule(1.0, (3,), 0.99, rounding="ceil")
        # N/n rises from 2/8 to 3/9
        with self.assertRaises(errors.ScheduleError):
            _ = LimitSchedule(1.0, (8, 9), 0.5)
        with self.assertRaises(ValueError):
            _ = LimitSchedule(1.0, (1, 10), 0.4)


class TestRateFit(unittest.TestCase):
    """Log-log least squares."""

    def test_exact_power_law(self):
        """Errors proportional to 1/n give exponent -1."""
        ns = [100, 1000, 10000]
        fit = fit_power_law(ns, [3.0 / n for n in ns])
        assert fit.exponent is not None
        assert abs(fit.exponent + 1.0) < 1e-10
        assert not fit.below_floor

    def test_floor(self):
        """Errors at the floor give the marker instead of an exponent."""
        assert fit_power_law([1, 2, 3], [0.0, 0.0, 0.0]) == RateFit(exponent=None, below_floor=True)
        assert fit_power_law([1, 2, 3], [1.0, 1e-13, 1e-3]).below_floor

    def test_too_few_points(self):
        """At least three points are needed."""
        with self.assertRaises(ValueError):
            _ = fit_power_law([1, 2], [1.0, 0.5])
        with self.assertRaises(ValueError):
            _ = fit_power_law([1, 2, 3], [1.0, 0.5])

    def test_error_norms(self):
        """Sup and RMS of the difference."""
        norms = ErrorNorms.between(np.array([1.0, 2.0]), np.array([1.0, 0.0]))
        assert norms == ErrorNorms(sup=2.0, rms=math.sqrt(2.0))


class TestPhaseOffset(unittest.TestCase):
    """Cross-correlation time alignment."""

    def test_shifted_cosine(self):
        """A delayed cosine is aligned to its delay."""
        times = period_grid(2 * math.pi, 256)
        tau = fit_phase_offset(times, np.cos(times - 0.7), np.cos, 2 * math.pi)
        assert abs(tau - 0.7) < 1e-6

    def test_wraps_into_period(self):
        """Offsets are reported in [0, T)."""
        times = period_grid(4.0, 128)

        def classical(t):
            return np.sin(2 * math.pi * t / 4.0)

        tau = fit_phase_offset(times, classical(times + 0.5), classical, 4.0)
        assert 0.0 <= tau < 4.0
        assert abs(tau - 3.5) < 1e-5


class TestCompareSummations(unittest.TestCase):
    """Partial sums against Fejer means at matched order."""

    def test_cosine(self):
        """Partial sums reproduce cos; the Fejer mean is damped by 2N/(2N+1)."""
        times = period_grid(2 * math.pi, 128)
        comparison = compare_summations(cosine_signal(), 3, times)
        np.testing.assert_allclose(comparison.partial, np.cos(times), atol=1e-12)
        np.testing.assert_allclose(comparison.fejer, (6 / 7) * np.cos(times), atol=1e-12)
        assert comparison.band == (-1.0, 1.0)
        assert comparison.partial_overshoot <= 1e-12
        assert comparison.fejer_overshoot == 0.0

    def test_constant(self):
        """No overshoot either way."""
        comparison = compare_summations(constant_signal(2.0), 4, period_grid(2 * math.pi, 64))
        assert comparison.partial_overshoot <= 1e-12
        assert comparison.fejer_overshoot <= 1e-12

    def test_square_wave(self):
        """Gibbs overshoot for partial sums only."""
        order = 99
        comparison = compare_summations(
            square_wave_signal(),
            order,
            period_grid(2 * math.pi, 64 * order),
            coefficients=square_wave_coefficients(2 * order),
            band=(-1.0, 1.0),
        )
        assert 0.15 <= comparison.partial_overshoot <= 0.22
        assert comparison.fejer_overshoot <= 1e-3
        assert comparison.signal.shape == comparison.partial.shape == comparison.fejer.shape

    def test_negative_order(self):
        """Orders are non-negative."""
        with self.assertRaises(ValueError):
            _ = compare_summations(cosine_signal(), -1, [0.0])

    def test_longer_coefficients_cut_back(self):
        """Coefficients beyond order 2l are ignored; shorter ones are refused."""
        order = 12
        times = period_grid(2 * math.pi, 64 * order)
        signal, band = square_wave_signal(), (-1.0, 1.0)
        exact = compare_summations(signal, order, times, square_wave_coefficients(2 * order), band)
        longer = compare_summations(signal, order, times, square_wave_coefficients(5 * order), band)
        np.testing.assert_array_equal(longer.partial, exact.partial)
        np.testing.assert_array_equal(longer.fejer, exact.fejer)
        assert longer.partial_overshoot == exact.partial_overshoot
        assert longer.fejer_overshoot == exact.fejer_overshoot
        with self.assertRaises(errors.IndexRangeError):
            _ = compare_summations(signal, order, times, square_wave_coefficients(order), band)


class TestScan(unittest.TestCase):
    """Small classical-limit scans."""

    HO = EigenSystem.harmonic_oscillator()
    SCHEDULE = LimitSchedule(action=1.0, n_values=(100, 400, 1600), gamma=0.4)

    def test_oscillator_position(self):
        """<x> approaches the classical cosine monotonically with a negative fitted exponent."""
        report = run_scan(self.HO, "x", self.SCHEDULE)
        errors_ = report.sup_errors(Reference.CLASSICAL)
        assert all(b < a for a, b in zip(errors_, errors_[1:]))
        assert [point.half_width for point in report.points] == [6, 10, 19]
        for point in report.points:
            assert point.phase_offset == 0.0
            assert abs(point.reference_energy - (point.n + 0.5) * point.hbar) < 1e-12
            for norms in point.errors.values():
                assert 0.0 <= norms.rms <= norms.sup
                assert math.isfinite(norms.sup)
            assert point.quantum_overshoot == 0.0
        classical_rate = report.rates[Reference.CLASSICAL]
        assert classical_rate.exponent is not None and classical_rate.exponent < 0
        assert set(report.rates) == set(Reference)
        assert report.rates == fit_rate(report)

    def test_oscillator_energy(self):
        """<H> equals the reference energy, so every error sits below the floor."""
        report = run_scan(self.HO, "h", self.SCHEDULE)
        for point in report.points:
            assert point.errors[Reference.CLASSICAL].sup <= 1e-12 * point.reference_energy
        assert report.rates[Reference.CLASSICAL].below_floor

    def test_workers_preserve_order(self):
        """Threaded scans give the same report in schedule order."""
        serial = run_scan(self.HO, "p", self.SCHEDULE, time_points=64)
        threaded = run_scan(self.HO, "p", self.SCHEDULE, time_points=64, max_workers=3)
        assert [point.n for point in threaded.points] == [100, 400, 1600]
        assert serial.sup_errors("partial") == threaded.sup_errors("partial")

    def test_explicit_times(self):
        """A caller grid is used as given; two points give no rates."""
        schedule = LimitSchedule(action=1.0, n_values=(100, 400), gamma=0.4)
        report = run_scan(self.HO, "x2", schedule, times=np.linspace(0.0, 1.0, 5))
        assert len(report.points) == 2
        assert not report.rates
        assert report.points[0].relative_sup("classical") < 0.2

    def test_unknown_observable(self):
        """Observables are validated before scanning."""
        with self.assertRaises(errors.UnsupportedObservableError):
            _ = run_scan(self.HO, "spin", self.SCHEDULE)

    def test_well_momentum(self):
        """Well <p> stays inside the classical momentum range, unlike the partial sum of the orbit."""
        well = EigenSystem.infinite_square_well()
        schedule = LimitSchedule(action=1.0, n_values=(200,), gamma=0.4)
        report = run_scan(well, "p", schedule)
        point = report.points[0]
        momentum = math.sqrt(2 * point.reference_energy)
        assert point.half_width == 8
        assert point.quantum_overshoot <= 1e-2 * 2 * momentum
        assert point.partial_overshoot >= 0.15 * momentum
        assert point.fejer_overshoot <= 1e-3 * momentum
        assert 0.0 <= point.phase_offset < 2 * math.pi / point.frequency * 1.01

    def test_well_constant_observables(self):
        """Energy and squared momentum are constant on the box orbit, so no phase is fitted."""
        well = EigenSystem.infinite_square_well()
        schedule = LimitSchedule(action=1.0, n_values=(200,), gamma=0.4)
        with mock.patch("fejerlimit.climit.fit_phase_offset") as fit:
            reports = {obs: run_scan(well, obs, schedule, time_points=64) for obs in ("h", "h2", "p2")}
        fit.assert_not_called()
        assert all(report.points[0].phase_offset == 0.0 for report in reports.values())
        # <p^2> = 2 mu <H> exactly; <H^2> keeps the (spread / E)^2 excess
        assert reports["h"].points[0].relative_sup("classical") <= 1e-12
        assert reports["p2"].points[0].relative_sup("classical") <= 1e-12
        assert 0.0 < reports["h2"].points[0].relative_sup("classical") < 0.01
        with mock.patch("fejerlimit.climit.fit_phase_offset", return_value=0.25) as fit:
            point = run_scan(well, "x", schedule, time_points=64).points[0]
        fit.assert_called_once()
        assert point.phase_offset == 0.25


class TestSideExperiments(unittest.TestCase):
    """Energy spread, coefficient dependence and matrix-element/Fourier agreement."""

    HO = EigenSystem.harmonic_oscillator()
    WELL = EigenSystem.infinite_square_well()

    def test_energy_spread_scan(self):
        """The relative spread sqrt(N(N+1)/3)/(n + 1/2) shrinks along the schedule."""
        schedule = LimitSchedule(action=1.0, n_values=(100, 1000, 10000), gamma=0.4)
        spreads = energy_spread_scan(self.HO, schedule)
        for n, N, spread in spreads:
            assert abs(spread - math.sqrt(N * (N + 1) / 3) / (n + 0.5)) < 1e-12
        assert spreads[0][2] > spreads[1][2] > spreads[2][2]

    def test_coefficient_dependence(self):
        """Shaped packets oscillate with a different amplitude than the equal-weight packet."""
        schedule = LimitSchedule(action=1.0, n_values=(100, 400), gamma=0.4)
        ratios = coefficient_dependence(self.HO, schedule, "poisson", time_points=128)
        assert [ratio.n for ratio in ratios] == [100, 400]
        assert all(ratio.ratio > 0 for ratio in ratios)
        with self.assertRaises(ValueError):
            _ = coefficient_dependence(self.HO, schedule, "uniform")

    def test_matrix_fourier_oscillator(self):
        """<n+s|x|n> approaches the classical f_s at E_n like 1/(4n)."""
        small = matrix_fourier_deviation(self.HO.with_hbar(1 / 100), "x", 100, 2)
        large = matrix_fourier_deviation(self.HO.with_hbar(1 / 10000), "x", 10000, 2)
        assert large < small
        assert large < 1e-4

    def test_matrix_fourier_well(self):
        """Box matrix elements approach the triangle-wave coefficients."""
        assert matrix_fourier_deviation(self.WELL, "x", 1000, 3) < 1e-2
        assert matrix_fourier_deviation(self.WELL, "p", 1000, 3) < 1e-2
        with self.assertRaises(errors.IndexRangeError):
            _ = matrix_fourier_deviation(self.WELL, "x", 3, 3)
