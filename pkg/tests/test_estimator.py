import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from mhd_spectra import ProfileSpec, SpectrumEstimator
from mhd_spectra.operators import Case

LINEAR = ProfileSpec("linear", {"intercept": 3.0, "slope": -1 / np.pi})


def test_params_round_trip():
    est = SpectrumEstimator(n=64, gamma=1.4)
    params = est.get_params()
    assert params["n"] == 64 and params["gamma"] == 1.4
    est.set_params(n=32)
    assert est.n == 32
    assert clone(est).get_params() == est.get_params()


def test_predict_before_fit():
    with pytest.raises(NotFittedError):
        SpectrumEstimator().predict([1])


def test_fit_predict_matches_sweep():
    est = SpectrumEstimator(n=64, k_list=(1, 2, 4)).fit(LINEAR)
    assert est.case_ is Case.TRANSVERSE_INCOMPRESSIBLE
    assert np.array_equal(est.predict([1, 2, 4]), est.spectrum_.lambda_sq)
    assert est.capital_lambda_sq_ == pytest.approx(1 / np.pi, rel=1e-12)
    assert est.criterion_.unstable


def test_predict_new_wave_number_below_supremum():
    est = SpectrumEstimator(n=64, k_list=(1, 2)).fit(LINEAR)
    lam = est.predict(np.array([3, 100]))
    assert lam.shape == (2,)
    assert est.predict(2)[0] < lam[0] < lam[1] <= est.capital_lambda_sq_ + 1e-12


def test_array_input_equals_table_profile():
    x = np.linspace(0, 2 * np.pi, 48)
    est = SpectrumEstimator(k_list=(1, 2)).fit(3 - x / np.pi)
    ref = SpectrumEstimator(n=48, k_list=(1, 2)).fit(LINEAR)
    assert est.profile_.rho0.shape == (48,)
    assert np.allclose(est.predict([1, 2]), ref.predict([1, 2]), rtol=1e-6)


def test_array_input_validation():
    with pytest.raises(ValueError):
        SpectrumEstimator().fit(np.ones((4, 4)))
    with pytest.raises(ValueError):
        SpectrumEstimator().fit(np.array([1.0, np.nan] * 8))


def test_parallel_compressible_has_no_criterion():
    spec = ProfileSpec("linear", {"rho_at_0": 1.0}, "isentropic")
    est = SpectrumEstimator(case=4, n=48, b0=1.0, closure_c=2.0, k_list=(1, 2)).fit(spec)
    assert est.criterion_ is None
    assert np.all(est.predict([1, 2]) < 0)
