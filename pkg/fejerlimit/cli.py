"""Command-line front end for the fejerlimit experiments.

Exit codes: 0 on success, 1 when a numerical check fails, 2 on a configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Mapping, NoReturn, Sequence

import numpy as np

from . import __version__, errors
from .climit import LimitSchedule, Reference, compare_summations, run_scan
from .qsystems import EigenSystem, Observable, ho_expectation_closed_form
from .spectral import (
    FourierCoefficients,
    PeriodicSignal,
    constant_coefficients,
    constant_signal,
    cosine_coefficients,
    cosine_signal,
    double_sum,
    fejer_mean,
    period_grid,
    square_wave_coefficients,
    square_wave_signal,
    triangle_wave_coefficients,
    triangle_wave_signal,
)
from .tables import OutputFormat, Table, table_from_columns
from .wavepacket import equal_weight_packet, expectation_series

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)

SEED_ENV_VAR = "FEJERLIMIT_SEED"
DEFAULT_SEED = 42
IDENTITY_TOLERANCE = 1e-12
ORACLE_TOLERANCE = 1e-9
IDENTITY_TIMES_PER_TRIAL = 20
DEFAULT_ORDERS = {"identity-check": 64, "gibbs": 99, "compare": 99}
DEFAULT_HO_EXPECT_HALF_WIDTH = 5

COMMANDS = ("identity-check", "ho-expect", "gibbs", "scan", "compare")
SIGNALS = ("square", "cosine", "triangle", "constant")
SYSTEMS = ("ho", "well")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

# physics notation: N, S
# pylint: disable=invalid-name


@dataclass(frozen=True)
class RunConfig:
    """Validated settings of one CLI run; field names double as config-file keys."""

    command: str
    system: str = "ho"
    obs: str = "x"
    n_list: tuple[int, ...] = (100, 1000, 10000)
    gamma: float = 0.4
    action: float = 1.0
    mu: float = 1.0
    omega: float = 1.0
    length: float = 1.0
    hbar: float = 1.0
    times: int = 256
    order: int | None = None
    half_width: int | None = None
    trials: int = 100
    seed: int = DEFAULT_SEED
    signal: str = "square"
    workers: int = 1
    inject_fault: bool = False
    out: str | None = None
    format: str = "csv"
    log_level: str = "WARNING"

    def __post_init__(self) -> None:
        object.__setattr__(self, "n_list", _parse_n_list(self.n_list))
        object.__setattr__(self, "log_level", str(self.log_level).upper())
        if self.command not in COMMANDS:
            raise errors.ConfigError(f"command {self.command!r} must be one of {COMMANDS}")
        if self.system not in SYSTEMS:
            raise errors.ConfigError(f"system {self.system!r} must be one of {SYSTEMS}")
        try:
            Observable.parse(self.obs)
        except errors.UnsupportedObservableError as err:
            raise errors.ConfigError(str(err)) from err
        if self.format not in {fmt.value for fmt in OutputFormat}:
            raise errors.ConfigError(f"format {self.format!r} must be csv or json")
        if self.signal not in SIGNALS:
            raise errors.ConfigError(f"signal {self.signal!r} must be one of {SIGNALS}")
        if self.log_level not in LOG_LEVELS:
            raise errors.ConfigError(f"log level {self.log_level!r} must be one of {LOG_LEVELS}")
        for name in ("gamma", "action", "mu", "omega", "length", "hbar"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise errors.ConfigError(f"{name}={value!r} must be a finite positive number")
        for name in ("times", "trials", "workers"):
            if getattr(self, name) < 1:
                raise errors.ConfigError(f"{name}={getattr(self, name)} must be at least 1")
        if self.order is not None and self.order < 0:
            raise errors.ConfigError(f"{self.order=} must be non-negative")
        if self.half_width is not None and self.half_width < 0:
            raise errors.ConfigError(f"{self.half_width=} must be non-negative")
        if not self.n_list:
            raise errors.ConfigError("n_list must not be empty")
        if self.out is not None:
            parent = Path(self.out).resolve().parent
            if not parent.is_dir() or not os.access(parent, os.W_OK):
                raise errors.ConfigError(f"output directory {parent} is not writable")

    @property
    def resolved_order(self) -> int:
        """The --order value, or the command default."""
        if self.order is not None:
            return self.order
        return DEFAULT_ORDERS.get(self.command, 0)

    def echo(self) -> dict[str, Any]:
        """Settings that determine the output, for table metadata."""
        settings = dataclasses.asdict(self)
        for key in ("out", "log_level", "workers"):
            settings.pop(key)
        return settings


def _parse_n_list(value: Any) -> tuple[int, ...]:
    if isinstance(value, str):
        value = [item for item in value.replace(" ", "").split(",") if item]
    try:
        return tuple(int(item) for item in value)
    except (TypeError, ValueError) as err:
        raise errors.ConfigError(f"n_list {value!r} must be a list of integers") from err


class _ArgumentParser(argparse.ArgumentParser):
    """Raises ConfigError instead of exiting, so main() owns the exit code."""

    def error(self, message: str) -> NoReturn:
        raise errors.ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    """Argument parser; flags left out do not appear in the namespace."""
    parser = _ArgumentParser(
        prog="fejerlimit",
        description="Fejer-mean view of the classical limit of quantum expectation values.",
        argument_default=argparse.SUPPRESS,
    )
    parser.add_argument("--command", choices=COMMANDS, help="Experiment to run.")
    parser.add_argument("--config", help="TOML file whose keys are RunConfig field names.")
    parser.add_argument("--system", choices=SYSTEMS, help="ho (harmonic oscillator) or well (infinite square well).")
    parser.add_argument("--obs", choices=[obs.value for obs in Observable], help="Observable.")
    parser.add_argument("--n-list", dest="n_list", help="Comma-separated center quantum numbers.")
    parser.add_argument("--gamma", type=float, help="Exponent of the half-width rule N = floor(n**gamma).")
    parser.add_argument("--action", type=float, help="Fixed action J = n*hbar.")
    parser.add_argument("--mu", type=float, help="Particle mass.")
    parser.add_argument("--omega", type=float, help="Oscillator angular frequency.")
    parser.add_argument("--length", type=float, help="Well width.")
    parser.add_argument("--hbar", type=float, help="Planck constant for ho-expect.")
    parser.add_argument("--times", type=int, help="Time points per period.")
    parser.add_argument("--order", type=int, help="Coefficient order S, or the largest summation order.")
    parser.add_argument("--half-width", dest="half_width", type=int, help="Packet half width N.")
    parser.add_argument("--trials", type=int, help="Random trials for identity-check.")
    parser.add_argument("--seed", type=int, help=f"Random seed; falls back to ${SEED_ENV_VAR}, then {DEFAULT_SEED}.")
    parser.add_argument("--signal", choices=SIGNALS, help="Periodic signal for gibbs and compare.")
    parser.add_argument("--workers", type=int, help="Threads for scan points.")
    parser.add_argument("--inject-fault", dest="inject_fault", action="store_true", help="Corrupt one coefficient.")
    parser.add_argument("--out", help="Output path; stdout when omitted.")
    parser.add_argument("--format", choices=[fmt.value for fmt in OutputFormat], help="Output format.")
    parser.add_argument("--log-level", dest="log_level", help="Logging level on stderr.")
    return parser


def load_config_file(path: str | Path) -> dict[str, Any]:
    """Read a TOML config file, rejecting keys that are not RunConfig fields."""
    try:
        with open(path, "rb") as file:
            settings = tomllib.load(file)
    except (OSError, tomllib.TOMLDecodeError) as err:
        raise errors.ConfigError(f"cannot read config file {path}: {err}") from err
    known = {item.name for item in dataclasses.fields(RunConfig)}
    unknown = sorted(set(settings) - known)
    if unknown:
        raise errors.ConfigError(f"unknown config keys {unknown}")
    return settings


def build_config(argv: Sequence[str] | None = None, environ: Mapping[str, str] | None = None) -> RunConfig:
    """Merge defaults, the seed environment variable, the config file and flags, in increasing priority."""
    environ = os.environ if environ is None else environ
    flags = vars(build_parser().parse_args(argv))
    settings: dict[str, Any] = {}
    if SEED_ENV_VAR in environ:
        try:
            settings["seed"] = int(environ[SEED_ENV_VAR])
        except ValueError as err:
            raise errors.ConfigError(f"{SEED_ENV_VAR}={environ[SEED_ENV_VAR]!r} is not an integer") from err
    config_path = flags.pop("config", None)
    if config_path is not None:
        settings.update(load_config_file(config_path))
    settings.update(flags)
    if "command" not in settings:
        raise errors.ConfigError("a command is required (--command or the config file)")
    try:
        return RunConfig(**settings)
    except TypeError as err:
        raise errors.ConfigError(str(err)) from err


def _system(config: RunConfig, hbar: float | None = None) -> EigenSystem:
    hbar = config.hbar if hbar is None else hbar
    if config.system == "ho":
        return EigenSystem.harmonic_oscillator(mass=config.mu, omega=config.omega, hbar=hbar)
    return EigenSystem.infinite_square_well(mass=config.mu, length=config.length, hbar=hbar)


def _metadata(config: RunConfig) -> dict[str, Any]:
    return {"fejerlimit_version": __version__, "numpy_version": np.__version__, "config": config.echo()}


def _relative_deviation(values: np.ndarray, reference: np.ndarray) -> float:
    scale = float(np.max(np.abs(reference)))
    deviation = float(np.max(np.abs(values - reference)))
    return deviation / scale if scale > 0 else deviation


def cmd_identity_check(config: RunConfig) -> tuple[Table, bool]:
    """Compare double_sum with fejer_mean on random complex coefficients."""
    S = config.resolved_order
    rng = np.random.default_rng(config.seed)
    columns: dict[str, list[Any]] = {"trial": [], "N": [], "max_relative_deviation": []}
    for trial in range(config.trials):
        coeffs = rng.standard_normal(2 * S + 1) + 1j * rng.standard_normal(2 * S + 1)
        N = config.half_width if config.half_width is not None else int(rng.integers(0, S // 2 + 1))
        if 2 * N > S:
            raise errors.ConfigError(f"half width {N} needs order >= {2 * N}, got {S}")
        times = rng.uniform(0.0, 2 * math.pi, IDENTITY_TIMES_PER_TRIAL)
        reference = FourierCoefficients(max_order=S, omega=1.0, coeffs=coeffs)
        if config.inject_fault:
            coeffs = coeffs.copy()
            coeffs[S] = -coeffs[S]
        rearranged = FourierCoefficients(max_order=S, omega=1.0, coeffs=coeffs)
        deviation = _relative_deviation(
            np.asarray(double_sum(rearranged, N, times)), np.asarray(fejer_mean(reference, N, times))
        )
        columns["trial"].append(trial)
        columns["N"].append(N)
        columns["max_relative_deviation"].append(deviation)
    worst = max(columns["max_relative_deviation"])
    passed = worst <= IDENTITY_TOLERANCE
    footer = {"max_relative_deviation": worst, "tolerance": IDENTITY_TOLERANCE, "passed": passed}
    return table_from_columns("identity-check", columns, _metadata(config), footer), passed


def cmd_ho_expect(config: RunConfig) -> tuple[Table, bool]:
    """Oscillator expectation values from the generic engine next to the closed forms."""
    if config.system != "ho":
        raise errors.ConfigError("ho-expect needs --system ho")
    system = _system(config)
    n = config.n_list[0]
    N = DEFAULT_HO_EXPECT_HALF_WIDTH if config.half_width is None else config.half_width
    packet = equal_weight_packet(system, n, N)
    times = period_grid(2 * math.pi / system.omega, config.times)
    columns: dict[str, Any] = {"t": times}
    footer: dict[str, Any] = {}
    closed_columns: dict[str, Any] = {}
    for obs in Observable:
        engine = expectation_series(packet, obs, times).values
        closed = np.asarray(ho_expectation_closed_form(system, obs, n, N, times), dtype=np.float64)
        columns[obs.value] = engine
        closed_columns[f"{obs.value}_closed"] = closed
        footer[f"max_relative_deviation_{obs.value}"] = _relative_deviation(engine, closed)
    columns.update(closed_columns)
    passed = all(value <= ORACLE_TOLERANCE for value in footer.values())
    footer["tolerance"] = ORACLE_TOLERANCE
    footer["passed"] = passed
    return table_from_columns("ho-expect", columns, _metadata(config), footer), passed


def signal_setup(name: str, max_order: int) -> tuple[PeriodicSignal, FourierCoefficients, tuple[float, float]]:
    """Unit-amplitude test signal on a 2*pi period, its analytic coefficients and its range."""
    builders: dict[str, tuple[Callable[[], PeriodicSignal], Callable[[int], FourierCoefficients], tuple[float, float]]]
    builders = {
        "square": (square_wave_signal, square_wave_coefficients, (-1.0, 1.0)),
        "cosine": (cosine_signal, cosine_coefficients, (-1.0, 1.0)),
        "triangle": (triangle_wave_signal, triangle_wave_coefficients, (0.0, 1.0)),
        "constant": (constant_signal, constant_coefficients, (1.0, 1.0)),
    }
    make_signal, make_coefficients, band = builders[name]
    return make_signal(), make_coefficients(max_order), band


def cmd_gibbs(config: RunConfig) -> tuple[Table, bool]:
    """Overshoot of partial sums and Fejer means for orders 1..order."""
    top = config.resolved_order
    signal, coeffs, band = signal_setup(config.signal, 2 * max(top, 1))
    columns: dict[str, list[Any]] = {"order": [], "partial_overshoot": [], "fejer_overshoot": []}
    for order in range(1, top + 1):
        grid = period_grid(signal.period, max(4096, 64 * order))
        comparison = compare_summations(signal, order, grid, coefficients=coeffs, band=band)
        columns["order"].append(order)
        columns["partial_overshoot"].append(comparison.partial_overshoot)
        columns["fejer_overshoot"].append(comparison.fejer_overshoot)
    footer: dict[str, Any] = {"signal": config.signal}
    if top >= 1:
        footer["partial_overshoot_at_max_order"] = columns["partial_overshoot"][-1]
        footer["fejer_overshoot_max"] = max(columns["fejer_overshoot"])
    return table_from_columns("gibbs", columns, _metadata(config), footer), True


def cmd_compare(config: RunConfig) -> tuple[Table, bool]:
    """Signal, partial sum and Fejer mean side by side at one order."""
    order = config.resolved_order
    signal, coeffs, band = signal_setup(config.signal, 2 * order)
    grid = period_grid(signal.period, config.times)
    comparison = compare_summations(signal, order, grid, coefficients=coeffs, band=band)
    columns = {"t": grid, "signal": comparison.signal, "partial": comparison.partial, "fejer": comparison.fejer}
    footer = {
        "signal": config.signal,
        "order": order,
        "partial_overshoot": comparison.partial_overshoot,
        "fejer_overshoot": comparison.fejer_overshoot,
    }
    return table_from_columns("compare", columns, _metadata(config), footer), True


def cmd_scan(config: RunConfig) -> tuple[Table, bool]:
    """Classical-limit scan with fitted convergence exponents."""
    schedule = LimitSchedule(action=config.action, n_values=config.n_list, gamma=config.gamma)
    report = run_scan(_system(config), config.obs, schedule, time_points=config.times, max_workers=config.workers)
    columns: dict[str, list[Any]] = {
        name: []
        for name in (
            "n",
            "hbar",
            "N",
            "reference_energy",
            "frequency",
            "phase_offset",
            "scale",
            *(f"{ref.value}_{norm}" for ref in Reference for norm in ("sup", "rms")),
            "quantum_overshoot",
            "fejer_overshoot",
            "partial_overshoot",
            "relative_energy_spread",
        )
    }
    for point in report.points:
        values: dict[str, Any] = {
            "n": point.n,
            "hbar": point.hbar,
            "N": point.half_width,
            "reference_energy": point.reference_energy,
            "frequency": point.frequency,
            "phase_offset": point.phase_offset,
            "scale": point.scale,
            "quantum_overshoot": point.quantum_overshoot,
            "fejer_overshoot": point.fejer_overshoot,
            "partial_overshoot": point.partial_overshoot,
            "relative_energy_spread": point.relative_energy_spread,
        }
        for ref in Reference:
            values[f"{ref.value}_sup"] = point.errors[ref].sup
            values[f"{ref.value}_rms"] = point.errors[ref].rms
        for name, column in columns.items():
            column.append(values[name])
    footer: dict[str, Any] = {}
    for ref, rate in report.rates.items():
        footer[f"{ref.value}_exponent"] = "below_floor" if rate.below_floor else rate.exponent
    return table_from_columns("scan", columns, _metadata(config), footer), True


COMMAND_RUNNERS: dict[str, Callable[[RunConfig], tuple[Table, bool]]] = {
    "identity-check": cmd_identity_check,
    "ho-expect": cmd_ho_expect,
    "gibbs": cmd_gibbs,
    "scan": cmd_scan,
    "compare": cmd_compare,
}


def run(config: RunConfig) -> int:
    """Run the configured command, write its table and return the exit code."""
    logger.info("running %s", config.command)
    table, passed = COMMAND_RUNNERS[config.command](config)
    if config.out is None:
        sys.stdout.write(table.render(config.format))
    else:
        table.write(config.out, config.format)
        logger.info("wrote %s table to %s", config.format, config.out)
    if not passed:
        logger.error("%s failed its tolerance check", config.command)
        return 1
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point; returns the process exit code."""
    try:
        config = build_config(argv)
    except errors.ConfigError as err:
        print(f"fejerlimit: {err}", file=sys.stderr)
        return 2
    logging.basicConfig(level=config.log_level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(config)
    except errors.ResidueError as err:
        logger.error("%s", err)
        return 1
    except errors.FejerLimitError as err:
        print(f"fejerlimit: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
