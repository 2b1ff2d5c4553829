import math

import pytest

from mhd_spectra.profiles import ProfileSpec, build_grid, make_profile

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record_criterion():
    """Collect one PASS/FAIL line per acceptance criterion for the terminal summary."""

    def record(number: int, title: str, passed: bool, detail: str):
        line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def standard_profile(n=256, bc="free", **kwargs):
    """Linear density 3 - x/pi under unit gravity."""
    spec = ProfileSpec("linear", {"intercept": 3.0, "slope": -1.0 / math.pi})
    return make_profile(spec, build_grid(n, bc), **kwargs)


def interface_profile(n=256, bc="free", **kwargs):
    """Smoothed heavy-over-light interface at x = pi."""
    return make_profile(ProfileSpec("tanh_interface"), build_grid(n, bc), **kwargs)


def isentropic_profile(n=128, c=2.0, b0=1.0, gamma=5.0 / 3.0, g=1.0, rho_at_0=1.0, bc="periodic"):
    spec = ProfileSpec("linear", {"rho_at_0": rho_at_0}, "isentropic")
    return make_profile(
        spec, build_grid(n, bc), g=g, gamma=gamma, b0_amplitude=b0, orientation="parallel", closure_c=c
    )
