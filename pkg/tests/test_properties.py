import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import isentropic_profile, standard_profile
from mhd_spectra.modes import escape_time
from mhd_spectra.operators import Case, assemble, quadratic_form, rayleigh_quotient
from mhd_spectra.profiles import ProfileSpec, build_grid, make_profile
from mhd_spectra.spectra import capital_lambda, solve_principal
from mhd_spectra.symmetrize import PointContext, State7, flux_jacobians, lower_order, symmetrizer

finite = st.floats(-10, 10, allow_nan=False)
positive = st.floats(0.2, 5.0)
gammas = st.floats(1.05, 4.0)
wave_numbers = st.integers(1, 40)

N = 24
PROFILES = {
    Case.TRANSVERSE_INCOMPRESSIBLE: standard_profile(n=N),
    Case.TRANSVERSE_COMPRESSIBLE: standard_profile(n=N, b0_amplitude=0.5),
    Case.PARALLEL_INCOMPRESSIBLE: standard_profile(n=N, b0_amplitude=0.5, orientation="parallel"),
    Case.PARALLEL_COMPRESSIBLE: isentropic_profile(n=N),
}


def contexts():
    return st.builds(PointContext, positive, finite, finite, finite, gammas)


def states(ctx_rho0=1.0):
    return st.builds(
        State7,
        st.floats(-0.9, 3.0).map(lambda s: s * ctx_rho0),
        finite, finite, finite, finite, finite, finite,
    )


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from(list(PROFILES)),
    wave_numbers,
    st.floats(0.1, 2.0),
)
def test_pencil_symmetric_and_positive(case, k, b0):
    grid = build_grid(N, "periodic" if case is Case.PARALLEL_COMPRESSIBLE else "free")
    if case is Case.PARALLEL_COMPRESSIBLE:
        prof = isentropic_profile(n=N, b0=b0)
    else:
        orientation = "parallel" if case is Case.PARALLEL_INCOMPRESSIBLE else "transverse"
        prof = make_profile(ProfileSpec(), grid, b0_amplitude=b0, orientation=orientation)
    problem = assemble(prof, case, k)
    assert np.array_equal(problem.a, problem.a.T)
    assert np.array_equal(problem.m, problem.m.T)
    assert np.linalg.eigvalsh(problem.m).min() > 0


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(list(PROFILES)), wave_numbers, st.integers(0, 2**32 - 1), st.floats(0.01, 100.0))
def test_quotient_homogeneous_and_bounded(case, k, seed, scale):
    problem = assemble(PROFILES[case], case, k)
    u = np.random.default_rng(seed).standard_normal(problem.size)
    q = rayleigh_quotient(problem, u)
    assert math.isclose(rayleigh_quotient(problem, scale * u), q, rel_tol=1e-10, abs_tol=1e-14)
    assert math.isclose(quadratic_form(problem, scale * u), scale**2 * quadratic_form(problem, u), rel_tol=1e-10, abs_tol=1e-12)
    assert q <= solve_principal(problem)[0] + 1e-10


@settings(max_examples=40, deadline=None)
@given(wave_numbers, st.integers(0, 2**32 - 1))
def test_parallel_compressible_quotient_nonpositive(k, seed):
    problem = assemble(PROFILES[Case.PARALLEL_COMPRESSIBLE], Case.PARALLEL_COMPRESSIBLE, k)
    u = np.random.default_rng(seed).standard_normal(problem.size)
    assert rayleigh_quotient(problem, u) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([Case.TRANSVERSE_INCOMPRESSIBLE, Case.TRANSVERSE_COMPRESSIBLE, Case.PARALLEL_INCOMPRESSIBLE]), wave_numbers)
def test_principal_eigenvalue_below_supremum(case, k):
    prof = PROFILES[case]
    assert solve_principal(assemble(prof, case, k))[0] <= capital_lambda(prof, case) + 1e-10


@given(st.floats(1e-3, 1.0), st.floats(1e-8, 1.0), st.floats(1e-2, 10.0))
def test_escape_time_identity(theta, frac, lam):
    delta = theta * frac
    t = escape_time(delta, theta, lam)
    assert t >= 0
    assert abs(delta * math.exp(lam * t) - theta) <= 1e-14 * theta * max(1.0, lam * t)


@given(contexts(), arrays(np.float64, 6, elements=finite), st.floats(-5, 5))
def test_first_lower_order_term_linear_in_velocity_and_field(ctx, w, c):
    state = State7(0.0, *w)
    dl, _ = lower_order(state, ctx)
    dl_scaled, _ = lower_order(State7(0.0, *(c * w)), ctx)
    assert np.allclose(dl_scaled, c * dl, rtol=1e-12, atol=1e-12 * (1 + np.abs(dl).max()))


@given(contexts(), st.floats(1e-3, 1e-2))
def test_second_lower_order_term_vanishes_quadratically(ctx, s):
    sigma = s * ctx.rho0
    df1 = lower_order(State7(sigma=sigma), ctx)[1]
    df2 = lower_order(State7(sigma=sigma / 2), ctx)[1]
    assert not np.any(df1[2:]) and not np.any(df2[2:])
    if abs(df1[1]) > 1e-12:
        assert 3.0 < df1[1] / df2[1] < 5.0


@given(contexts(), st.data())
def test_flux_matrices_exactly_symmetric(ctx, data):
    state = data.draw(states(ctx.rho0))
    for m in flux_jacobians(state, ctx):
        assert np.array_equal(m, m.T)


@given(contexts(), st.data())
def test_symmetrizer_positive_diagonal(ctx, data):
    d = symmetrizer(data.draw(states(ctx.rho0)), ctx)
    assert np.array_equal(d, np.diag(np.diag(d)))
    assert np.all(np.diag(d) > 0)
