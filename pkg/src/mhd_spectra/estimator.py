"""Estimator-style facade over the spectral solver.

``fit`` takes a density description (a :class:`ProfileSpec` or an array of
nodal densities) and computes the wave-number sweep; ``predict`` returns
``lambda_k**2`` for arbitrary wave numbers.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import UnsupportedCaseError
from .operators import Case, assemble
from .profiles import ProfileSpec, build_grid, make_profile
from .spectra import instability_criterion, solve_principal, spectrum_over_k


class SpectrumEstimator(BaseEstimator):
    """Growth-rate spectrum of one steady state.

    Parameters mirror :func:`make_profile` and :func:`spectrum_over_k`.
    """

    def __init__(
        self,
        case="transverse_incompressible",
        n=512,
        bc=None,
        g=1.0,
        gamma=5.0 / 3.0,
        b0=0.0,
        p0_at_0=1.0,
        closure_c=1.0,
        construction="balanced",
        k_list=(1, 2, 4, 8, 16, 32, 64),
        tol=0.02,
    ):
        self.case = case
        self.n = n
        self.bc = bc
        self.g = g
        self.gamma = gamma
        self.b0 = b0
        self.p0_at_0 = p0_at_0
        self.closure_c = closure_c
        self.construction = construction
        self.k_list = k_list
        self.tol = tol

    def _spec(self, X):
        if isinstance(X, ProfileSpec):
            return X, self.n
        values = check_array(X, ensure_2d=False, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError("density table must be one-dimensional")
        return ProfileSpec("table", {"values": values}, self.construction), values.size

    def fit(self, X, y=None):
        case = Case.parse(self.case)
        spec, n = self._spec(X)
        bc = self.bc or ("periodic" if case is Case.PARALLEL_COMPRESSIBLE else "free")
        self.case_ = case
        self.profile_ = make_profile(
            spec,
            build_grid(n, bc),
            g=self.g,
            gamma=self.gamma,
            b0_amplitude=self.b0,
            orientation=case.orientation,
            p0_at_0=self.p0_at_0,
            closure_c=self.closure_c,
        )
        self.spectrum_ = spectrum_over_k(self.profile_, case, self.k_list, self.tol)
        self.capital_lambda_sq_ = self.spectrum_.capital_lambda_sq
        try:
            self.criterion_ = instability_criterion(self.profile_, case)
        except UnsupportedCaseError:
            self.criterion_ = None
        return self

    def predict(self, k) -> NDArray[np.float64]:
        """Principal ``lambda_k**2`` for each wave number in ``k``."""
        check_is_fitted(self, "spectrum_")
        ks = np.atleast_1d(np.asarray(k))
        known = {e.k: e.lambda_sq for e in self.spectrum_.entries}
        out = [
            known[int(kk)] if int(kk) in known
            else solve_principal(assemble(self.profile_, self.case_, int(kk)))[0]
            for kk in ks
        ]
        return np.array(out)
