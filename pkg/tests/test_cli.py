import math
import subprocess
import sys

import pytest

from mhd_spectra import cli
from mhd_spectra.exceptions import CaseError, ConfigError
from mhd_spectra.operators import Case


def run_cli(tmp_path, text, *extra):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(text)
    return cli.main([str(cfg), "--out", str(tmp_path / "out"), *extra])


def read_summary(tmp_path):
    lines = (tmp_path / "out" / "summary.txt").read_text().splitlines()
    return dict(line.split("=", 1) for line in lines)


def test_minimal_config_defaults():
    config = cli.parse_config("command = spectrum\ncase = 1\n")
    assert config.case is Case.TRANSVERSE_INCOMPRESSIBLE
    assert config.n == 512 and config.bc == "free"
    assert config.k_list == (1, 2, 4, 8, 16, 32, 64)
    assert config.profile.kind == "linear" and config.profile.construction == "balanced"


def test_parallel_compressible_defaults():
    config = cli.parse_config("[run]\ncommand = lambda\ncase = parallel_compressible\n")
    assert config.bc == "periodic"
    assert config.profile.construction == "isentropic"


def test_unknown_key_reports_line():
    with pytest.raises(ConfigError, match="line 3: unknown key run.gamme"):
        cli.parse_config("[run]\ncommand = spectrum\ngamme = 1.4\n")


def test_duplicate_key():
    with pytest.raises(ConfigError, match="line 2: duplicate"):
        cli.parse_config("command = spectrum\ncommand = lambda\n")


def test_missing_command_and_case():
    with pytest.raises(ConfigError, match="run.command"):
        cli.parse_config("case = 1\n")
    with pytest.raises(ConfigError, match="run.case"):
        cli.parse_config("command = spectrum\n")


def test_parallel_case_rejects_field_table():
    text = "command = spectrum\ncase = 3\ngrid.n = 8\nphysics.b0 = 1, 1, 1, 2, 1, 1, 1, 1\n"
    with pytest.raises(CaseError, match="line 4: orientation"):
        cli.parse_config(text)


@pytest.mark.parametrize(
    "text, value",
    [("-1/pi", -1 / math.pi), ("−1/π", -1 / math.pi), ("2**3 - 0.5", 7.5), ("1e-3", 1e-3), ("inf", math.inf)],
)
def test_expression_values(text, value):
    assert cli.evaluate(text) == value


@pytest.mark.parametrize("text", ["__import__('os')", "abs(-1)", "x + 1", "1 +"])
def test_expression_rejects_code(text):
    with pytest.raises(ValueError):
        cli.evaluate(text)


def test_spectrum_run_files(tmp_path):
    text = "command = spectrum\ncase = 1\nprofile.slope = -1/pi\ngrid.n = 64\n"
    assert run_cli(tmp_path, text, "--quiet") == 0
    raw = (tmp_path / "out" / "spectrum.csv").read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "k,lambda_k_sq,gap"
    assert len(lines) == 1 + 7 + 1
    assert lines[-1].startswith("Lambda_sq=")
    assert float(lines[-1].split("=")[1]) == pytest.approx(1 / math.pi, rel=1e-12)
    assert read_summary(tmp_path)["k0"] == "1"


def test_criterion_case2_constant_density(tmp_path):
    text = "command = criterion\ncase = 2\nprofile.intercept = 1\nphysics.b0 = 1\ngrid.n = 64\n"
    assert run_cli(tmp_path, text, "--quiet") == 0
    summary = read_summary(tmp_path)
    assert summary["unstable"] == "true"
    assert float(summary["Lambda_sq"]) == pytest.approx(3 / 8, rel=1e-12)


def test_simulate_stable_profile_is_mode_error(tmp_path, capsys):
    text = "command = simulate\ncase = 1\nprofile.slope = 0.2\ngrid.n = 32\nsim.k = 1\n"
    assert run_cli(tmp_path, text) == 2
    assert "mode error" in capsys.readouterr().err


def test_config_error_exit_code(tmp_path, capsys):
    assert run_cli(tmp_path, "command = spectrum\ncase = 9\n") == 1
    assert "error" in capsys.readouterr().err


def test_missing_file_exit_code(tmp_path):
    assert cli.main([str(tmp_path / "absent.cfg")]) == 1


def test_summary_printed_unless_quiet(tmp_path, capsys):
    text = "command = lambda\ncase = 1\nprofile.slope = -1/pi\ngrid.n = 32\n"
    assert run_cli(tmp_path, text) == 0
    assert "Lambda_sq=0.318309886183" in capsys.readouterr().out
    assert run_cli(tmp_path, text, "--quiet") == 0
    assert capsys.readouterr().out == ""


def test_escape_time_with_given_rate(tmp_path):
    assert run_cli(tmp_path, "command = escape-time\nsim.lambda = 0.5\n", "--quiet") == 0
    assert float(read_summary(tmp_path)["escape_time"]) == pytest.approx(2 * math.log(100), rel=1e-15)


def test_symmetrizer_check_run(tmp_path):
    assert run_cli(tmp_path, "command = symmetrizer-check\nrun.samples = 50\ngrid.n = 32\n", "--quiet") == 0
    summary = read_summary(tmp_path)
    assert summary["symmetric"] == "true" and summary["d_positive"] == "true"
    assert (tmp_path / "out" / "matrices.csv").exists()


def test_identities_run(tmp_path):
    assert run_cli(tmp_path, "command = identities\nrun.levels = 32, 64\n", "--quiet") == 0
    lines = (tmp_path / "out" / "identities.csv").read_text().splitlines()
    assert lines[0] == "n,r1,r2" and len(lines) == 3


def test_console_entry_point(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("command = escape-time\nsim.lambda = 1\nsim.delta = 0.01\nsim.theta = 0.1\n")
    proc = subprocess.run(
        [sys.executable, "-m", "mhd_spectra.cli", str(cfg), "--out", str(tmp_path / "o")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    summary = dict(line.split("=", 1) for line in proc.stdout.splitlines())
    assert float(summary["escape_time"]) == pytest.approx(math.log(10), rel=1e-15)
