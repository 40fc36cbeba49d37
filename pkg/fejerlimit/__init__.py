"""Fejer means, Fourier partial sums and the classical limit of quantum expectation values"""

__version__ = "0.1.0"

# Modules imported here are simply for easier namespace resolution, e.g.,
# from fejerlimit import fejer_mean
# instead of
# from fejerlimit.spectral import fejer_mean
# So these are more interfaces to this library, and hence, no need to check if these are accessed

# pyright: reportUnusedImport=false

# pylint: disable=wrong-import-position
from .climit import (
    ConvergenceReport,
    ErrorNorms,
    LimitSchedule,
    RateFit,
    Reference,
    ScanPoint,
    SummationComparison,
    coefficient_dependence,
    compare_summations,
    energy_spread_scan,
    fit_phase_offset,
    fit_power_law,
    fit_rate,
    matrix_fourier_deviation,
    run_scan,
)
from .errors import (
    ConfigError,
    FejerLimitError,
    IndexRangeError,
    InvalidPacketError,
    ResidueError,
    ScheduleError,
    UndersampledError,
    UnsupportedObservableError,
)
from .qsystems import (
    EigenSystem,
    Observable,
    SystemKind,
    bohr_deviation,
    classical_coefficients,
    classical_frequency,
    classical_frequency_at_energy,
    classical_range,
    classical_signal,
    classical_trajectory,
    energy,
    energy_gap,
    ho_expectation_closed_form,
    ho_ladder_sums,
    matrix_block,
    matrix_element,
    transition_frequency,
)
from .spectral import (
    FourierCoefficients,
    PeriodicSignal,
    SummationKind,
    compute_coefficients,
    double_sum,
    evaluate,
    fejer_mean,
    fejer_weights,
    kernel_sum,
    overshoot_metric,
    packet_sum,
    partial_sum,
    period_grid,
    sigma,
)
from .tables import OutputFormat, Table
from .wavepacket import (
    ExpectationSeries,
    WavePacket,
    energy_mean,
    energy_spread,
    equal_weight_packet,
    expectation,
    expectation_series,
    gaussian_profile,
    general_packet,
    norm,
    oscillation_amplitude,
    poisson_profile,
)
