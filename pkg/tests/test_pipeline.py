"""
Tests for subcommand orchestration and the command-line entry point
"""

import json
import logging
import math

import pytest

from bhconstruct import __version__
from bhconstruct.__main__ import main, setup_logging
from bhconstruct.constants import EnvVar, ExitCode, ReferenceSpectra, SweepFamily
from bhconstruct.core.pipeline import RunConfig, RunReport, family_spectrum, run_subcommand
from bhconstruct.utils.matrix_market import write_matrix
from bhconstruct.utils.realize import PatternMatrix

DISK = "1.1, {c!r}+{s!r}i, {c!r}-{s!r}i".format(
    c=math.cos(ReferenceSpectra.DISK_THETA), s=math.sin(ReferenceSpectra.DISK_THETA))
NEAR_DISK = DISK.replace("1.1", "1.05", 1)
EXACT_ZERO = "1, 0.25+0.75i, 0.25-0.75i"


def run(*argv, config=None):
    code, report = run_subcommand(config or RunConfig(), argv)
    return code, json.loads(report.render())


class TestCheck:
    """Test the check subcommand"""

    def test_reference_spectrum(self):
        """Test a spectrum meeting every hypothesis"""
        code, document = run("check", "--spectrum", DISK)
        assert code == ExitCode.SUCCESS
        assert document["subcommand"] == "check"
        assert document["hypotheses"]["perron_ok"] is True
        assert document["hypotheses"]["cutoff_K"] == 9

    def test_negative_power_sum(self):
        """Test rho = 1.05, whose s_8 is negative"""
        code, document = run("check", "--spectrum", NEAR_DISK)
        assert code == ExitCode.INFEASIBLE
        assert document["hypotheses"]["first_negative_index"] == 8

    def test_unpaired_entry(self):
        """Test "1.1, 1i" """
        code, document = run("check", "--spectrum", "1.1, 1i")
        assert code == ExitCode.INPUT_ERROR
        assert "error" in document

    def test_exact_zero_power_sum(self):
        """Test a power sum that is exactly zero"""
        code, document = run("check", "--spectrum", EXACT_ZERO)
        assert code == ExitCode.INDETERMINATE
        assert document["hypotheses"]["indeterminate"] == [2]

    def test_spectrum_file(self, tmp_path):
        """Test --input"""
        path = tmp_path / "sigma.txt"
        path.write_text("2\n-1\n")
        code, document = run("check", "--input", str(path))
        assert code == ExitCode.SUCCESS
        assert document["hypotheses"]["suleimanova"] is True

    def test_deterministic_output(self):
        """Test byte-identical reports for repeated runs"""
        first = run_subcommand(RunConfig(), ["check", "--spectrum", DISK])[1].render()
        second = run_subcommand(RunConfig(), ["check", "--spectrum", DISK])[1].render()
        assert first == second

    def test_tiny_gap_completes(self):
        """Test a gap of 1e-10 with a negative trace"""
        code, document = run("check", "--spectrum", "1.0000000001, 0.5, -1")
        assert code == ExitCode.INFEASIBLE
        assert document["hypotheses"]["first_negative_index"] == 1
        assert document["hypotheses"]["unchecked_from"] == 100_001

    def test_unchecked_tail_is_indeterminate(self):
        """Test positive sums with K* past the configured horizon"""
        code, document = run("check", "--spectrum", "1.00000001, 1, -0.5",
                             config=RunConfig(power_sum_horizon=1000))
        assert code == ExitCode.INDETERMINATE
        assert document["hypotheses"]["unchecked_from"] == 1001
        assert document["hypotheses"]["first_negative_index"] is None

    def test_undecodable_file(self, tmp_path):
        """Test a spectrum file that is not UTF-8"""
        path = tmp_path / "sigma.txt"
        path.write_bytes(b"2\n\xff\xfe-1\n")
        code, document = run("check", "--input", str(path))
        assert code == ExitCode.INPUT_ERROR
        assert "line 2" in document["error"]


class TestBound:
    """Test the bound subcommand"""

    def test_pair(self):
        """Test (1, -0.01)"""
        code, document = run("bound", "--spectrum", "1, -0.01")
        assert code == ExitCode.SUCCESS
        assert 44000 < document["bound"]["N_bound"] < 45000
        assert document["closed_form_log10"] == pytest.approx(document["bound"]["log10_N_bound"], abs=1e-9)

    def test_reference_spectrum_saturates(self):
        """Test the saturated bound of the reference spectrum"""
        code, document = run("bound", "--spectrum", DISK)
        assert code == ExitCode.SUCCESS
        assert document["bound"]["saturated"] is True
        assert document["bound"]["N_bound"] is None
        assert document["bound"]["log10_N_bound"] == pytest.approx(21.68, abs=0.01)

    def test_hypotheses_fail(self):
        """Test that a failing spectrum reports its hypotheses"""
        code, document = run("bound", "--spectrum", NEAR_DISK)
        assert code == ExitCode.INFEASIBLE
        assert "bound" not in document
        assert document["hypotheses"]["power_sums_ok"] is False

    def test_single_entry(self):
        """Test n = 1"""
        code, document = run("bound", "--spectrum", "3")
        assert code == ExitCode.SUCCESS
        assert document["bound"]["N_bound"] == 1


class TestRealize:
    """Test the realize subcommand"""

    def test_two_by_two(self):
        """Test (2, -1) at N = 2"""
        code, document = run("realize", "--spectrum", "2, -1", "--dim", "2")
        assert code == ExitCode.SUCCESS
        assert document["matrix"] == [[0.5, 1.0], [2.25, 0.5]]
        assert document["feasibility"]["feasible"] is True
        assert document["certificate"]["matrix_dim"] == 2
        assert document["certificate"]["report"] == document["feasibility"]

    def test_infeasible_dimension(self):
        """Test the reference spectrum below its first feasible N"""
        code, document = run("realize", "--spectrum", DISK, "--dim", "127")
        assert code == ExitCode.INFEASIBLE
        assert document["feasibility"]["first_negative_index"] == 8
        assert "matrix" not in document

    def test_large_matrix_not_inlined(self):
        """Test that N = 128 is verified but not printed"""
        code, document = run("realize", "--spectrum", DISK, "--dim", "128")
        assert code == ExitCode.SUCCESS
        assert "matrix" not in document
        assert len(document["certificate"]["trace_residuals"]) == 20

    def test_missing_dimension(self):
        """Test a usage error"""
        code, document = run("realize", "--spectrum", "2, -1")
        assert code == ExitCode.INPUT_ERROR
        assert document["subcommand"] == "usage"

    def test_dimension_below_n(self):
        """Test N < n"""
        code, _ = run("realize", "--spectrum", "2, -1, -0.5", "--dim", "2")
        assert code == ExitCode.INPUT_ERROR

    def test_exact_zero_is_indeterminate(self):
        """Test (1, -1) at N = 3 where y_3 vanishes exactly"""
        code, document = run("realize", "--spectrum", "1, -1", "--dim", "3")
        assert code == ExitCode.INDETERMINATE
        assert document["feasibility"]["indeterminate"] == [3]


class TestExportAndVerify:
    """Test realize --matrix-out followed by verify"""

    def test_round_trip(self, tmp_path):
        """Test that the exported matrix verifies with the same residuals"""
        path = tmp_path / "x4.mtx"
        code, realized = run("realize", "--spectrum", "2, -1", "--dim", "4", "--matrix-out", str(path))
        assert code == ExitCode.SUCCESS
        assert realized["matrix_file"] == str(path)

        code, verified = run("verify", "--spectrum", "2, -1", "--matrix", str(path))
        assert code == ExitCode.SUCCESS
        assert verified["matrix_dim"] == 4
        assert verified["certificate"]["trace_residuals"] == pytest.approx(
            realized["certificate"]["trace_residuals"], abs=1e-12)

    def test_negative_entry(self, tmp_path):
        """Test a matrix file with a negative x entry"""
        path = write_matrix(tmp_path / "bad.mtx", PatternMatrix(2, (0.5, -1.0)))
        code, document = run("verify", "--spectrum", "2, -1", "--matrix", str(path))
        assert code == ExitCode.INFEASIBLE
        assert document["min_entry"] == -1.0

    def test_wrong_spectrum(self, tmp_path):
        """Test a matrix checked against a different spectrum"""
        path = tmp_path / "x2.mtx"
        run("realize", "--spectrum", "2, -1", "--dim", "2", "--matrix-out", str(path))
        code, _ = run("verify", "--spectrum", "3, -1", "--matrix", str(path))
        assert code == ExitCode.INFEASIBLE


class TestSearch:
    """Test the search subcommand"""

    def test_reference_spectrum(self):
        """Test the frozen first feasible N"""
        code, document = run("search", "--spectrum", DISK, "--max", "128", "--workers", "2")
        assert code == ExitCode.SUCCESS
        assert document["search"]["first_feasible"] == ReferenceSpectra.DISK_FIRST_FEASIBLE_N
        assert document["non_monotone"] is False

    def test_nothing_feasible(self):
        """Test a scan that stops below the first feasible N"""
        code, document = run("search", "--spectrum", DISK, "--max", "20")
        assert code in (ExitCode.INFEASIBLE, ExitCode.INDETERMINATE)
        assert document["search"]["first_feasible"] is None
        assert "1" not in document["search"]["bitmap"]
        assert len(document["search"]["bitmap"]) == 18

    def test_max_below_n(self):
        """Test --max smaller than the list"""
        code, _ = run("search", "--spectrum", DISK, "--max", "2")
        assert code == ExitCode.INPUT_ERROR


class TestBek:
    """Test the bek subcommand"""

    def test_simple_pair(self):
        """Test x^2 - 1 against x^2"""
        code, document = run("bek", "--f", "0, -1", "--g", "0, 0")
        assert code == ExitCode.SUCCESS
        assert document["bounds"]["bound_bek"] == pytest.approx(3.0792, abs=1e-4)
        assert document["matching_distance"] == pytest.approx(1.0, abs=1e-5)

    def test_degree_mismatch(self):
        """Test coefficient lists of different length"""
        code, _ = run("bek", "--f", "1", "--g", "1, 2")
        assert code == ExitCode.INPUT_ERROR


class TestSweep:
    """Test the sweep subcommand"""

    def test_family_members(self):
        """Test the two parametrized families"""
        disk = family_spectrum(SweepFamily.DISK, 1.1)
        assert disk[0] == 1.1
        assert abs(disk[1]) == pytest.approx(1.0)
        assert disk[1] == disk[2].conjugate()
        assert family_spectrum(SweepFamily.TWO_POSITIVE, 0.5) == [3.5, 2.5, -2, -2, -2]

    def test_disk_csv(self):
        """Test CSV output over two radii"""
        code, report = run_subcommand(RunConfig(), [
            "sweep", "--family", "disk", "--start", "1.1", "--stop", "1.3",
            "--steps", "2", "--max", "128", "--csv"])
        assert code == ExitCode.SUCCESS
        lines = report.csv_text.splitlines()
        assert lines[0] == "param,first_feasible_N,log10_paper_bound,min_margin"
        assert len(lines) == 3
        assert lines[1].startswith("1.1000000000000001,128,")
        rows = report.sections["rows"]
        assert sorted(rows[0]) == ["first_feasible_N", "log10_paper_bound", "min_margin", "param"]
        assert rows[0]["log10_paper_bound"] == pytest.approx(21.68, abs=0.01)
        assert rows[1]["first_feasible_N"] is not None
        assert rows[1]["first_feasible_N"] <= 128

    def test_bad_steps(self):
        """Test --steps 0"""
        code, _ = run("sweep", "--family", "disk", "--start", "1.1", "--stop", "1.2", "--steps", "0")
        assert code == ExitCode.INPUT_ERROR


class TestRunReport:
    """Test RunReport documents"""

    def test_timing_only_when_measured(self):
        """Test that timing_seconds appears only when elapsed is set"""
        report = RunReport("check")
        assert "timing_seconds" not in report.to_document()
        report.elapsed = 0.25
        assert report.to_document()["timing_seconds"] == 0.25

    def test_timing_flag(self):
        """Test that RunConfig.timing fills in elapsed"""
        _, report = run_subcommand(RunConfig(timing=True), ["check", "--spectrum", "2, -1"])
        assert report.elapsed is not None and report.elapsed >= 0


class TestMain:
    """Test the main() entry point"""

    @pytest.fixture(autouse=True)
    def isolated(self, monkeypatch, tmp_path):
        monkeypatch.delenv(EnvVar.PRECISION_BITS, raising=False)
        self.config_path = tmp_path / "config.yaml"

    def test_report_on_stdout(self, capsys):
        """Test the JSON report and exit code"""
        code = main(["--config", str(self.config_path), "realize", "--spectrum", "2, -1", "--dim", "2"])
        assert code == 0
        document = json.loads(capsys.readouterr().out)
        assert document["matrix"] == [[0.5, 1.0], [2.25, 0.5]]

    def test_report_to_file(self, tmp_path, capsys):
        """Test --output"""
        out = tmp_path / "report.json"
        code = main(["--config", str(self.config_path), "--output", str(out),
                     "check", "--spectrum", NEAR_DISK])
        assert code == 1
        assert capsys.readouterr().out == ""
        assert json.loads(out.read_text())["exit_code"] == 1

    def test_environment_precision(self, monkeypatch, capsys):
        """Test BH_PRECISION_BITS reaching the feasibility check"""
        monkeypatch.setenv(EnvVar.PRECISION_BITS, "128")
        code = main(["--config", str(self.config_path), "realize", "--spectrum", "2, -1", "--dim", "2"])
        assert code == 0
        assert json.loads(capsys.readouterr().out)["feasibility"]["precision_bits_used"] == 128

    def test_bad_precision(self, capsys):
        """Test an unsupported --precision-bits"""
        code = main(["--config", str(self.config_path), "--precision-bits", "60",
                     "check", "--spectrum", "2, -1"])
        assert code == 2

    def test_usage_error(self):
        """Test that argparse exits with status 2"""
        with pytest.raises(SystemExit) as exc_info:
            main(["realize", "--spectrum", "2, -1"])
        assert exc_info.value.code == 2

    def test_log_file(self, tmp_path):
        """Test setup_logging with a file handler"""
        log_file = tmp_path / "logs" / "run.log"
        setup_logging(1, log_file)
        logging.getLogger("bhconstruct.test").info("hello")
        for handler in logging.getLogger().handlers:
            handler.flush()
        assert "hello" in log_file.read_text()
        assert logging.getLogger().level == logging.INFO
        setup_logging(0)

    def test_version_flag(self, capsys):
        """Test --version"""
        with pytest.raises(SystemExit) as exc_info:
            main(["--version"])
        assert exc_info.value.code == 0
        assert capsys.readouterr().out.strip() == f"bhconstruct {__version__}"
