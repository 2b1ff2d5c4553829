"""Principal eigenvalues, wave-number sweeps and instability criteria."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.linalg as sla
from numpy.typing import NDArray

from ._csv import fmt, write_csv
from .exceptions import DefinitenessError, MHDSpectraError, SizeError, UnsupportedCaseError
from .operators import Case, ModeProblem, assemble, assemble_limit, check_case
from .profiles import Profile

DEFAULT_TOL = 0.02
GAP_FLOOR = 1e-10


def solve_pencil(problem: ModeProblem, count: int = 1):
    """Top ``count`` eigenpairs of ``A u = mu M u``, largest first.

    Reduces to a standard symmetric problem with the Cholesky factor of M.
    Eigenvectors are M-orthonormal; each is signed so that its entry of
    largest magnitude is positive.
    """
    size = problem.size
    count = min(count, size)
    try:
        chol = sla.cholesky(problem.m, lower=True)
    except np.linalg.LinAlgError as err:
        raise DefinitenessError(f"mass matrix is not positive definite: {err}") from err
    half = sla.solve_triangular(chol, problem.a, lower=True)
    reduced = sla.solve_triangular(chol, half.T, lower=True)
    reduced = 0.5 * (reduced + reduced.T)
    values, vectors = sla.eigh(reduced, subset_by_index=[size - count, size - 1])
    vectors = sla.solve_triangular(chol.T, vectors, lower=False)
    order = np.argsort(values)[::-1]
    values, vectors = values[order], vectors[:, order]
    for j in range(count):
        if vectors[np.argmax(np.abs(vectors[:, j])), j] < 0:
            vectors[:, j] *= -1
    return values, vectors


def solve_principal(problem: ModeProblem) -> tuple[float, NDArray[np.float64]]:
    """Largest eigenvalue ``lambda**2`` and its M-normalized eigenvector."""
    values, vectors = solve_pencil(problem, 1)
    return float(values[0]), vectors[:, 0]


@dataclass(frozen=True)
class SpectrumEntry:
    k: int
    lambda_sq: float
    vector: NDArray[np.float64] = field(repr=False)


@dataclass(frozen=True)
class Spectrum:
    """Principal eigenvalues over a list of wave numbers, with ``Lambda**2``."""

    case: Case
    entries: tuple[SpectrumEntry, ...]
    capital_lambda_sq: float
    converged: bool
    convergence_gap: float
    profile: Profile | None = field(default=None, repr=False, compare=False)

    @property
    def ks(self) -> NDArray[np.int64]:
        return np.array([e.k for e in self.entries])

    @property
    def lambda_sq(self) -> NDArray[np.float64]:
        return np.array([e.lambda_sq for e in self.entries])

    @property
    def gaps(self) -> NDArray[np.float64]:
        return np.abs(self.capital_lambda_sq - self.lambda_sq)

    def to_csv(self, path) -> Path:
        """Rows ``k,lambda_k_sq,gap`` and a footer ``Lambda_sq=<value>``."""
        rows = [(e.k, e.lambda_sq, gap) for e, gap in zip(self.entries, self.gaps)]
        return write_csv(
            path,
            ["k", "lambda_k_sq", "gap"],
            rows,
            footer=f"Lambda_sq={fmt(self.capital_lambda_sq)}",
        )


def capital_lambda(profile: Profile, case) -> float:
    """Supremum ``Lambda**2`` of the large-wave-number quotient.

    Cases 1 and 2 have a derivative-free numerator, so the supremum is the
    nodal maximum of H / rho0. Cases 3 and 4 solve the one-dimensional
    limit pencil.
    """
    case = check_case(profile, case)
    g = profile.g
    if case is Case.TRANSVERSE_INCOMPRESSIBLE:
        return float(np.max(-g * profile.rho0x / profile.rho0))
    if case is Case.TRANSVERSE_COMPRESSIBLE:
        h = g**2 * profile.rho0**2 / profile.sound_plus_alfven - g * profile.rho0x
        return float(np.max(h / profile.rho0))
    return solve_principal(assemble_limit(profile, case))[0]


def _solve_k(profile: Profile, case: Case, k: int) -> SpectrumEntry:
    try:
        lam2, vec = solve_principal(assemble(profile, case, k))
    except MHDSpectraError as err:
        err.args = (f"k={k}: {err}",) + err.args[1:]
        err.k = k
        raise
    return SpectrumEntry(int(k), lam2, vec)


def spectrum_over_k(
    profile: Profile,
    case,
    k_list: Sequence[int],
    tol: float = DEFAULT_TOL,
    max_workers: int | None = None,
) -> Spectrum:
    """Solve each wave number independently and compare with ``Lambda**2``.

    ``converged`` is set when the relative gap at the largest k is below
    ``tol``. With ``max_workers > 1`` the solves run on a thread pool; the
    result is ordered by k either way.
    """
    case = check_case(profile, case)
    ks = [int(k) for k in k_list]
    if not ks:
        raise SizeError("k_list is empty")
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValueError("k_list must be strictly ascending")
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers) as pool:
            entries = list(pool.map(lambda k: _solve_k(profile, case, k), ks))
    else:
        entries = [_solve_k(profile, case, k) for k in ks]
    big = capital_lambda(profile, case)
    gap = abs(entries[-1].lambda_sq - big) / max(abs(big), GAP_FLOOR)
    return Spectrum(case, tuple(entries), big, bool(gap < tol), float(gap), profile)


@dataclass(frozen=True)
class CriterionReport:
    unstable: bool
    witness_x: float | None
    margin: float


def instability_criterion(profile: Profile, case) -> CriterionReport:
    """Evaluate the sufficient instability condition for cases 1 to 3.

    Pointwise criteria are evaluated on nodes strictly inside (0, 2 pi);
    the witness is the node with the largest margin. Case 3 uses the
    averaged condition ``int -g rho0x dx > 0``.
    """
    case = check_case(profile, case)
    g, x = profile.g, profile.x
    interior = slice(1, None) if profile.grid.periodic else slice(1, -1)
    if case is Case.PARALLEL_COMPRESSIBLE:
        raise UnsupportedCaseError("no instability criterion for case 4: it is linearly stable")
    if case is Case.TRANSVERSE_COMPRESSIBLE:
        density = g**2 * profile.rho0**2 / profile.sound_plus_alfven - g * profile.rho0x
    else:
        density = -g * profile.rho0x
    idx = int(np.argmax(density[interior])) + 1
    if case is Case.PARALLEL_INCOMPRESSIBLE:
        margin = float(np.sum(-g * profile.rho0x * profile.grid.weights))
    else:
        margin = float(density[idx])
    unstable = margin > 0
    return CriterionReport(unstable, float(x[idx]) if unstable else None, margin)


@dataclass(frozen=True)
class LimitReport:
    ks: NDArray[np.int64]
    gaps: NDArray[np.float64]
    order: float | None
    decreasing: bool


def limit_check(spectrum: Spectrum) -> LimitReport:
    """Gaps ``|Lambda^2 - lambda_k^2|`` and a log-log decay-order estimate.

    The order is the negated slope of log(gap) against log(k) over the
    entries with a nonzero gap; it is None when fewer than two remain.
    """
    if len(spectrum.entries) < 3:
        raise SizeError("limit check needs at least three wave numbers")
    ks, gaps = spectrum.ks, spectrum.gaps
    keep = gaps > 0
    order = None
    if keep.sum() >= 2:
        slope = np.polyfit(np.log(ks[keep]), np.log(gaps[keep]), 1)[0]
        order = float(-slope)
    decreasing = bool(np.all(np.diff(gaps) < 0)) if np.any(gaps) else True
    return LimitReport(ks, gaps, order, decreasing)
