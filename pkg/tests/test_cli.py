"""Tests for the command-line front end"""

import csv
import json
import tempfile
import unittest
from pathlib import Path

import numpy as np

from fejerlimit import errors
from fejerlimit.cli import DEFAULT_SEED, SEED_ENV_VAR, RunConfig, build_config, main

# pylint: disable=invalid-name


def read_csv(path: Path) -> tuple[list[dict[str, str]], dict[str, str]]:
    """Data rows and footer entries of a CSV table."""
    lines = path.read_text(encoding="utf-8").splitlines()
    footer = {}
    for line in lines:
        if line.startswith("# footer "):
            key, _, value = line[len("# footer ") :].partition(": ")
            footer[key] = value
    rows = list(csv.DictReader(line for line in lines if not line.startswith("#")))
    return rows, footer


class CliTestCase(unittest.TestCase):
    """Runs main() against a scratch directory."""

    def setUp(self):
        self._directory = tempfile.TemporaryDirectory()  # pylint: disable=consider-using-with
        self.directory = Path(self._directory.name)

    def tearDown(self):
        self._directory.cleanup()

    def run_cli(self, name: str, *args: str) -> tuple[int, Path]:
        """Run one command writing to ``name`` and return the exit code and path."""
        path = self.directory / name
        return main([*args, "--out", str(path)]), path


class TestConfig(CliTestCase):
    """Defaults, config file, environment and flag precedence."""

    def write_toml(self, text: str) -> Path:
        """Store a config file in the scratch directory."""
        path = self.directory / "run.toml"
        path.write_text(text, encoding="utf-8")
        return path

    def test_defaults(self):
        """Seed 42, csv output and the command's default order."""
        config = build_config(["--command", "gibbs"], environ={})
        assert config.seed == DEFAULT_SEED
        assert config.format == "csv"
        assert config.n_list == (100, 1000, 10000)
        assert config.resolved_order == 99
        assert RunConfig(command="scan").resolved_order == 0

    def test_precedence(self):
        """Environment seed < config file < flags."""
        path = self.write_toml('command = "scan"\nseed = 9\nn_list = [100, 400]\nobs = "p"\n')
        environ = {SEED_ENV_VAR: "7"}
        assert build_config(["--command", "scan"], environ=environ).seed == 7
        from_file = build_config(["--config", str(path)], environ=environ)
        assert from_file.seed == 9
        assert from_file.n_list == (100, 400)
        assert from_file.obs == "p"
        from_flags = build_config(["--config", str(path), "--seed", "11", "--n-list", "200,2000"], environ=environ)
        assert from_flags.seed == 11
        assert from_flags.n_list == (200, 2000)
        assert from_flags.command == "scan"

    def test_rejections(self):
        """Bad settings are configuration errors."""
        with self.assertRaises(errors.ConfigError):
            _ = build_config(["--config", str(self.write_toml('command = "scan"\ncolour = 1\n'))], environ={})
        with self.assertRaises(errors.ConfigError):
            _ = build_config(["--config", str(self.write_toml("command = \n"))], environ={})
        with self.assertRaises(errors.ConfigError):
            _ = build_config([], environ={})
        with self.assertRaises(errors.ConfigError):
            _ = build_config(["--command", "scan"], environ={SEED_ENV_VAR: "seven"})
        with self.assertRaises(errors.ConfigError):
            _ = build_config(["--command", "scan", "--n-list", "10,x"], environ={})
        with self.assertRaises(errors.ConfigError):
            _ = RunConfig(command="scan", gamma=-1.0)
        with self.assertRaises(errors.ConfigError):
            _ = RunConfig(command="scan", obs="spin")
        with self.assertRaises(ValueError):
            _ = RunConfig(command="plot")

    def test_exit_code_two(self):
        """Configuration errors exit with 2 before anything runs."""
        assert main([]) == 2
        assert main(["--command", "nope"]) == 2
        assert main(["--command", "scan", "--format", "xml"]) == 2
        assert main(["--command", "gibbs", "--out", str(self.directory / "missing" / "out.csv")]) == 2
        code, _ = self.run_cli("well.csv", "--command", "ho-expect", "--system", "well")
        assert code == 2
        code, _ = self.run_cli("wide.csv", "--command", "identity-check", "--trials", "1", "--half-width", "40")
        assert code == 2


class TestIdentityCheck(CliTestCase):
    """double_sum against fejer_mean on random coefficients."""

    def test_passes(self):
        """A handful of random trials stay within 1e-12."""
        code, path = self.run_cli("identity.csv", "--command", "identity-check", "--trials", "5")
        assert code == 0
        rows, footer = read_csv(path)
        assert len(rows) == 5
        assert all(float(row["max_relative_deviation"]) <= 1e-12 for row in rows)
        assert all(0 <= int(row["N"]) <= 32 for row in rows)
        assert footer["passed"] == "true"

    def test_single_state_is_exact(self):
        """With N = 0 both forms reduce to f_0."""
        code, path = self.run_cli("single.csv", "--command", "identity-check", "--trials", "1", "--half-width", "0")
        assert code == 0
        rows, _ = read_csv(path)
        assert float(rows[0]["max_relative_deviation"]) == 0.0

    def test_injected_fault(self):
        """Flipping one coefficient fails the check with exit code 1."""
        code, path = self.run_cli("fault.csv", "--command", "identity-check", "--trials", "3", "--inject-fault")
        assert code == 1
        rows, footer = read_csv(path)
        assert all(float(row["max_relative_deviation"]) > 1e-12 for row in rows)
        assert footer["passed"] == "false"


class TestHoExpect(CliTestCase):
    """Oscillator expectation table."""

    def test_default_packet(self):
        """n = 100, N = 5: engine columns match the closed forms and <H> is 100.5."""
        code, path = self.run_cli("ho.csv", "--command", "ho-expect", "--n-list", "100", "--times", "64")
        assert code == 0
        rows, footer = read_csv(path)
        assert len(rows) == 64
        for obs in ("x", "p", "x2", "p2", "h", "h2"):
            assert float(footer[f"max_relative_deviation_{obs}"]) <= 1e-9
        np.testing.assert_allclose([float(row["h"]) for row in rows], 100.5, rtol=1e-12)
        assert set(rows[0]) >= {"t", "x", "x_closed", "h2", "h2_closed"}

    def test_stationary_state(self):
        """N = 0 leaves <x> at zero."""
        code, path = self.run_cli("ho0.csv", "--command", "ho-expect", "--n-list", "100", "--half-width", "0")
        assert code == 0
        rows, _ = read_csv(path)
        assert all(float(row["x"]) == 0.0 for row in rows)


class TestTablesCommands(CliTestCase):
    """gibbs, compare and scan tables."""

    def test_gibbs(self):
        """One row per order; the Fejer column never overshoots."""
        code, path = self.run_cli("gibbs.csv", "--command", "gibbs", "--order", "9")
        assert code == 0
        rows, footer = read_csv(path)
        assert [int(row["order"]) for row in rows] == list(range(1, 10))
        assert all(float(row["fejer_overshoot"]) <= 1e-3 for row in rows)
        assert float(footer["partial_overshoot_at_max_order"]) > 0.1
        assert footer["signal"] == "square"

    def test_compare_cosine(self):
        """Cosine: partial sums are exact and the Fejer mean is damped by 6/7."""
        code, path = self.run_cli(
            "compare.json",
            "--command",
            "compare",
            "--signal",
            "cosine",
            "--order",
            "3",
            "--times",
            "32",
            "--format",
            "json",
        )
        assert code == 0
        payload = json.loads(path.read_text(encoding="utf-8"))
        columns = payload["columns"]
        data = np.array(payload["rows"], dtype=np.float64)
        signal = data[:, columns.index("signal")]
        np.testing.assert_allclose(data[:, columns.index("partial")], signal, atol=1e-12)
        np.testing.assert_allclose(data[:, columns.index("fejer")], (6 / 7) * signal, atol=1e-12)
        assert payload["footer"]["fejer_overshoot"] == 0.0

    def test_scan_json(self):
        """A three-point oscillator scan reports decreasing errors and a negative exponent."""
        code, path = self.run_cli(
            "scan.json", "--command", "scan", "--n-list", "100,400,1600", "--times", "64", "--format", "json"
        )
        assert code == 0
        payload = json.loads(path.read_text(encoding="utf-8"))
        assert payload["table"] == "scan"
        assert payload["metadata"]["config"]["n_list"] == [100, 400, 1600]
        columns = payload["columns"]
        assert [row[columns.index("N")] for row in payload["rows"]] == [6, 10, 19]
        sup = [row[columns.index("classical_sup")] for row in payload["rows"]]
        assert sup[0] > sup[1] > sup[2]
        assert payload["footer"]["classical_exponent"] < 0


class TestDeterminism(CliTestCase):
    """Same configuration and seed give byte-identical files."""

    def test_repeat_runs(self):
        """Randomized and deterministic commands alike."""
        for args in (
            ("--command", "identity-check", "--trials", "4", "--seed", "3"),
            ("--command", "scan", "--n-list", "100,400,1600", "--times", "32"),
            ("--command", "gibbs", "--order", "4", "--format", "json"),
        ):
            first_code, first = self.run_cli("first.out", *args)
            second_code, second = self.run_cli("second.out", *args)
            assert first_code == second_code == 0
            assert first.read_bytes() == second.read_bytes()

    def test_seed_changes_trials(self):
        """Different seeds draw different half widths or deviations."""
        _, first = self.run_cli("a.csv", "--command", "identity-check", "--trials", "4", "--seed", "1")
        _, second = self.run_cli("b.csv", "--command", "identity-check", "--trials", "4", "--seed", "2")
        assert first.read_bytes() != second.read_bytes()
