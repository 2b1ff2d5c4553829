import dataclasses
import math

import numpy as np
import pytest

from conftest import standard_profile
from mhd_spectra.exceptions import CaseError, DomainError, SizeError
from mhd_spectra.profiles import ProfileSpec, build_grid, make_profile, validate_steady_state


def test_periodic_grid_is_uniform():
    grid = build_grid(8, "periodic")
    assert grid.spacing == pytest.approx(2 * math.pi / 8, rel=1e-15)
    assert np.allclose(grid.weights, 2 * math.pi / 8, rtol=1e-15)


def test_free_grid_uses_trapezoid_weights():
    grid = build_grid(9, "free")
    assert grid.spacing == pytest.approx(2 * math.pi / 8, rel=1e-15)
    assert grid.weights[0] == pytest.approx(grid.spacing / 2)
    assert grid.weights[-1] == pytest.approx(grid.spacing / 2)
    assert grid.nodes[-1] == pytest.approx(2 * math.pi)


def test_grid_too_small():
    with pytest.raises(SizeError):
        build_grid(4, "periodic")


@pytest.mark.parametrize("n", [8, 9, 100, 1025])
@pytest.mark.parametrize("bc", ["free", "periodic"])
def test_grid_invariants(n, bc):
    grid = build_grid(n, bc)
    assert abs(grid.weights.sum() - 2 * math.pi) <= 1e-12 * 2 * math.pi
    assert np.all(np.diff(grid.nodes) > 0)
    assert grid.nodes[0] >= 0 and grid.nodes[-1] <= 2 * math.pi + 1e-15


def test_balanced_linear_pressure_closed_form():
    """p0 = 10 + 3x - x^2/(2 pi) integrates the balance exactly."""
    prof = standard_profile(n=257, p0_at_0=10.0)
    x = prof.x
    assert np.allclose(prof.p0, 10 + 3 * x - x**2 / (2 * math.pi), rtol=0, atol=1e-12)
    assert np.all(prof.rho0x == -1 / math.pi)


def test_balanced_constant_density_gives_linear_pressure():
    spec = ProfileSpec("linear", {"intercept": 1.0, "slope": 0.0})
    prof = make_profile(spec, build_grid(64), b0_amplitude=0.7, p0_at_0=2.0)
    assert np.allclose(prof.p0, 2.0 + prof.x, atol=1e-13)


def test_isentropic_matches_separable_solution():
    """C=1, gamma=2: 2 rho rho' = rho, so rho = 1 + x/2."""
    spec = ProfileSpec("linear", {"rho_at_0": 1.0}, "isentropic")
    prof = make_profile(spec, build_grid(201), gamma=2.0, closure_c=1.0)
    assert np.max(np.abs(prof.rho0 - (1 + prof.x / 2))) < 1e-8


def test_isentropic_closure_holds_nodewise():
    spec = ProfileSpec("linear", {"rho_at_0": 1.3}, "isentropic")
    prof = make_profile(spec, build_grid(100), gamma=1.4, closure_c=2.5, b0_amplitude=0.3)
    assert np.allclose(prof.p0, 2.5 * prof.rho0**1.4, rtol=1e-10, atol=0)


def test_balanced_residual_is_roundoff_for_linear_profile():
    assert validate_steady_state(standard_profile(n=257, p0_at_0=10.0)) <= 1e-10


def test_pressure_spike_shows_in_residual():
    prof = standard_profile(n=129, p0_at_0=10.0)
    p0 = prof.p0.copy()
    p0[60] += 1.0
    spiked = dataclasses.replace(prof, p0=p0)
    assert validate_steady_state(spiked) == pytest.approx(1 / (2 * prof.grid.spacing), rel=1e-8)


def test_residual_zero_without_gravity():
    spec = ProfileSpec("linear", {"intercept": 2.0, "slope": 0.0})
    prof = make_profile(spec, build_grid(32), g=0.0, b0_amplitude=1.5)
    assert validate_steady_state(prof) == 0.0


def test_residual_is_second_order_under_refinement():
    residuals = []
    for n in (64, 128, 256, 512):
        grid = build_grid(n)
        b0 = 1 + 0.3 * np.sin(grid.nodes)
        prof = make_profile(ProfileSpec("tanh_interface", {"width": 0.5}), grid, b0_amplitude=b0)
        residuals.append(validate_steady_state(prof))
    ratios = np.array(residuals[:-1]) / np.array(residuals[1:])
    assert np.all(ratios >= 3.0)


def test_density_floor_violation():
    with pytest.raises(DomainError):
        make_profile(ProfileSpec("linear", {"intercept": 1.0, "slope": -1.0}), build_grid(32))


def test_nonpositive_pressure():
    with pytest.raises(DomainError):
        standard_profile(n=32, g=-1.0, p0_at_0=0.5)


def test_isentropic_floor_violation():
    spec = ProfileSpec("linear", {"rho_at_0": 0.2}, "isentropic")
    with pytest.raises(DomainError):
        make_profile(spec, build_grid(64), g=-1.0, gamma=2.0)


def test_parallel_orientation_rejects_varying_field():
    grid = build_grid(32)
    with pytest.raises(CaseError, match="orientation"):
        make_profile(ProfileSpec(), grid, b0_amplitude=1 + grid.nodes, orientation="parallel")


def test_table_needs_one_value_per_node():
    with pytest.raises(SizeError):
        make_profile(ProfileSpec("table", {"values": [1.0] * 10}), build_grid(16))


def test_table_profile_derivative():
    grid = build_grid(400)
    spec = ProfileSpec("table", {"values": 2 + np.sin(grid.nodes)})
    prof = make_profile(spec, grid)
    assert np.max(np.abs(prof.rho0x - np.cos(grid.nodes))) < 1e-4


def test_profile_arrays_are_read_only():
    prof = standard_profile(n=16)
    with pytest.raises(ValueError):
        prof.rho0[0] = 5.0


def test_profile_csv(tmp_path):
    path = standard_profile(n=16).to_csv(tmp_path / "profile.csv")
    lines = path.read_bytes().split(b"\n")
    assert lines[0] == b"x,rho0,rho0x,p0,p0x,b0,b0x"
    assert len([line for line in lines if line]) == 17
    assert b"\r" not in path.read_bytes()
