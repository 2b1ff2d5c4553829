"""Discrete matrix pencils for the per-wave-number growth-rate problems.

For a fixed wave number ``k`` every case reduces to the generalized symmetric
eigenproblem ``A u = lambda**2 M u``, where ``u^T A u`` discretizes the
potential-energy form ``-F - G + H`` and ``u^T M u`` the kinetic inner
product. F and G are kept as positive quadratic forms and enter with a minus
sign.

Layout
------
Scalar problems (incompressible cases) carry ``u1`` on the grid nodes. Pair
problems (compressible cases) carry ``u1`` on the nodes followed by ``u2`` on
the cell midpoints. First derivatives inside quadratic forms are taken as
compact two-point differences evaluated at midpoints; this is second order
for the integrals and, unlike a wide centered stencil, leaves no
odd-even mode invisible to the kinetic term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from ._csv import write_csv
from .exceptions import CaseError, DomainError, SizeError
from .profiles import Grid, Profile


class Case(str, Enum):
    TRANSVERSE_INCOMPRESSIBLE = "transverse_incompressible"
    TRANSVERSE_COMPRESSIBLE = "transverse_compressible"
    PARALLEL_INCOMPRESSIBLE = "parallel_incompressible"
    PARALLEL_COMPRESSIBLE = "parallel_compressible"

    @property
    def orientation(self) -> str:
        return self.value.split("_")[0]

    @property
    def compressible(self) -> bool:
        return self.value.endswith("_compressible")

    @property
    def number(self) -> int:
        return list(Case).index(self) + 1

    @classmethod
    def parse(cls, value) -> "Case":
        if isinstance(value, cls):
            return value
        if isinstance(value, int) or (isinstance(value, str) and value.isdigit()):
            if not 1 <= int(value) <= len(cls):
                raise CaseError(f"unknown case {value!r}")
            return list(cls)[int(value) - 1]
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise CaseError(f"unknown case {value!r}") from None


def check_case(profile: Profile, case) -> Case:
    """Validate that the profile's field orientation matches ``case``."""
    case = Case.parse(case)
    if profile.field_orientation != case.orientation:
        raise CaseError(
            f"orientation error: case {case.value} needs a {case.orientation} field, "
            f"profile is {profile.field_orientation}"
        )
    if case.compressible and profile.gamma <= 1:
        raise DomainError("compressible cases need gamma > 1")
    return case


# -- difference operators -----------------------------------------------------


@lru_cache(maxsize=None)
def _fd_weights(offsets: tuple, order: int) -> tuple:
    """Finite-difference weights on integer offsets (unit spacing)."""
    s = np.asarray(offsets, dtype=float)
    p = len(s)
    vander = np.vstack([s**j / math.factorial(j) for j in range(p)])
    rhs = np.zeros(p)
    rhs[order] = 1.0
    return tuple(np.linalg.solve(vander, rhs))


def diff_matrix(grid: Grid, order: int) -> NDArray[np.float64]:
    """Centered second-order difference matrix for d/dx, d2/dx2 or d4/dx4.

    Periodic grids wrap around. Free grids switch to one-sided second-order
    stencils in the rows where the centered stencil does not fit.
    """
    if order not in (1, 2, 4):
        raise ValueError("order must be 1, 2 or 4")
    n, h = grid.n, grid.spacing
    half = 1 if order < 4 else 2
    centered = tuple(range(-half, half + 1))
    wc = np.array(_fd_weights(centered, order))
    d = np.zeros((n, n))
    if grid.periodic:
        for i in range(n):
            for off, w in zip(centered, wc):
                d[i, (i + off) % n] += w
        return d / h**order
    width = order + 2
    for i in range(n):
        if half <= i < n - half:
            d[i, i - half : i + half + 1] = wc
            continue
        start = 0 if i < half else n - width
        offsets = tuple(j - i for j in range(start, start + width))
        d[i, start : start + width] = _fd_weights(offsets, order)
    return d / h**order


def stagger_diff(grid: Grid) -> NDArray[np.float64]:
    """Node-to-midpoint difference ``(u[i+1] - u[i]) / h``."""
    m, n = grid.n_mid, grid.n
    d = np.zeros((m, n))
    rows = np.arange(m)
    d[rows, rows] = -1.0
    d[rows, (rows + 1) % n] = 1.0
    return d / grid.spacing


def stagger_avg(grid: Grid) -> NDArray[np.float64]:
    """Node-to-midpoint average ``(u[i] + u[i+1]) / 2``."""
    m, n = grid.n_mid, grid.n
    d = np.zeros((m, n))
    rows = np.arange(m)
    d[rows, rows] = 0.5
    d[rows, (rows + 1) % n] = 0.5
    return d


def _midpoint_diff(grid: Grid) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Midpoint-to-node difference and the node weights it integrates with.

    On free grids only interior nodes sit between two midpoints.
    """
    m, h = grid.n_mid, grid.spacing
    if grid.periodic:
        d = np.zeros((m, m))
        rows = np.arange(m)
        d[rows, rows] = 1.0
        d[rows, (rows - 1) % m] = -1.0
        return d / h, np.full(m, h)
    d = np.zeros((m - 1, m))
    rows = np.arange(m - 1)
    d[rows, rows] = -1.0
    d[rows, rows + 1] = 1.0
    return d / h, np.full(m - 1, h)


def _form(x: NDArray[np.float64], d) -> NDArray[np.float64]:
    """Symmetric quadratic form ``x^T diag(d) x`` with exact symmetry."""
    s = x.T @ (np.asarray(d, dtype=float)[:, None] * x)
    return 0.5 * (s + s.T)


def _diag(d) -> NDArray[np.float64]:
    return np.diag(np.asarray(d, dtype=float))


# -- pencils -----------------------------------------------------------------------


@dataclass(frozen=True)
class ModeProblem:
    """Symmetric pencil ``(a, m)`` for one case and wave number.

    ``k`` is ``math.inf`` for the large-wave-number limit pencils built by
    :func:`assemble_limit`.
    """

    case: Case
    k: float
    a: NDArray[np.float64]
    m: NDArray[np.float64]
    dof: str
    profile: Profile

    @property
    def grid(self) -> Grid:
        return self.profile.grid

    @property
    def size(self) -> int:
        return self.a.shape[0]

    @property
    def n_u1(self) -> int:
        return self.grid.n

    def split(self, u) -> tuple[NDArray[np.float64], NDArray[np.float64] | None]:
        """Return ``(u1, u2)``; ``u2`` is None for scalar layouts."""
        u = np.asarray(u)
        if self.dof == "scalar_u1":
            return u, None
        return u[: self.n_u1], u[self.n_u1 :]

    def kinetic_mass(self) -> NDArray[np.float64]:
        """Pointwise density weighting, diag(rho0) W, on the same unknowns."""
        prof, grid = self.profile, self.grid
        d = prof.rho0 * grid.weights
        if self.dof == "pair_u1_u2":
            d = np.concatenate([d, grid.to_midpoints(prof.rho0) * grid.spacing])
        return _diag(d)

    def to_csv(self, directory, stem: str = "pencil") -> tuple[Path, Path]:
        """Write ``a`` and ``m`` row-major, each with a case/k/n/bc comment line."""
        directory = Path(directory)
        paths = []
        for name, mat in (("a", self.a), ("m", self.m)):
            comment = (
                f"case={self.case.value} k={self.k:g} n={self.grid.n} "
                f"bc={self.grid.bc} matrix={name}"
            )
            header = [f"c{j}" for j in range(mat.shape[1])]
            paths.append(
                write_csv(directory / f"{stem}_{name}.csv", header, mat, comment=comment)
            )
        return paths[0], paths[1]


def _check_k(k) -> int:
    if int(k) != k or k < 1:
        raise SizeError(f"wave number must be a positive integer, got {k!r}")
    return int(k)


def _incompressible_mass(profile: Profile, k: int) -> NDArray[np.float64]:
    grid = profile.grid
    s = stagger_diff(grid)
    rho_mid = grid.to_midpoints(profile.rho0)
    return _diag(profile.rho0 * grid.weights) + _form(s, rho_mid * grid.spacing) / k**2


def _pair_mass(profile: Profile) -> NDArray[np.float64]:
    grid = profile.grid
    d = np.concatenate(
        [profile.rho0 * grid.weights, grid.to_midpoints(profile.rho0) * grid.spacing]
    )
    return _diag(d)


def _gravity_potential(profile: Profile) -> NDArray[np.float64]:
    """The -g rho0x u^2 term on nodes."""
    return _diag(-profile.g * profile.rho0x * profile.grid.weights)


def assemble_case1(profile: Profile, k: int) -> ModeProblem:
    """Transverse field, incompressible.

    Numerator ``int -g rho0x u^2``; denominator ``int rho0 (u^2 + u_x^2/k^2)``.
    B0 does not enter.
    """
    case = check_case(profile, Case.TRANSVERSE_INCOMPRESSIBLE)
    k = _check_k(k)
    a = _gravity_potential(profile)
    return ModeProblem(case, k, a, _incompressible_mass(profile, k), "scalar_u1", profile)


def assemble_case2(profile: Profile, k: int) -> ModeProblem:
    """Transverse field, compressible.

    ``G = P (u1_x + k u2 + g rho0 u1 / P)^2`` with ``P = gamma p0 + B0^2``
    lives on midpoints; ``H = (g^2 rho0^2 / P - g rho0x) u1^2`` on nodes.
    """
    case = check_case(profile, Case.TRANSVERSE_COMPRESSIBLE)
    k = _check_k(k)
    grid, g = profile.grid, profile.g
    n, m = grid.n, grid.n_mid
    p_total = profile.sound_plus_alfven
    p_mid = grid.to_midpoints(p_total)
    rho_mid = grid.to_midpoints(profile.rho0)

    row = np.hstack(
        [
            stagger_diff(grid) + (g * rho_mid / p_mid)[:, None] * stagger_avg(grid),
            k * np.eye(m),
        ]
    )
    compression = _form(row, p_mid * grid.spacing)
    h_density = g**2 * profile.rho0**2 / p_total - g * profile.rho0x
    potential = np.zeros((n + m, n + m))
    potential[:n, :n] = _diag(h_density * grid.weights)
    a = potential - compression
    return ModeProblem(case, k, 0.5 * (a + a.T), _pair_mass(profile), "pair_u1_u2", profile)


def _parallel_b0(profile: Profile) -> float:
    return float(profile.b0[0])


def assemble_case3(profile: Profile, k: int) -> ModeProblem:
    """Parallel field, incompressible.

    Numerator ``int -B0^2 u_xx^2/k^2 - g rho0x u^2 - B0^2 u_x^2``; same
    denominator as case 1. At B0 = 0 the pencil is the case-1 pencil.
    """
    case = check_case(profile, Case.PARALLEL_INCOMPRESSIBLE)
    k = _check_k(k)
    grid = profile.grid
    b2 = _parallel_b0(profile) ** 2
    bending = _form(diff_matrix(grid, 2), grid.weights) / k**2
    tension = _form(stagger_diff(grid), np.full(grid.n_mid, grid.spacing))
    a = _gravity_potential(profile) - b2 * bending - b2 * tension
    return ModeProblem(
        case, k, 0.5 * (a + a.T), _incompressible_mass(profile, k), "scalar_u1", profile
    )


def _case4_h_row(profile: Profile):
    """Row operator and midpoint weights for H = -B0^2 (g rho0 u1 + gamma p0 u1_x)^2 / (P gamma p0)."""
    grid, g, gam = profile.grid, profile.g, profile.gamma
    b2 = _parallel_b0(profile) ** 2
    rho_mid = grid.to_midpoints(profile.rho0)
    gp_mid = gam * grid.to_midpoints(profile.p0)
    p_mid = gp_mid + b2
    row = (g * rho_mid)[:, None] * stagger_avg(grid) + gp_mid[:, None] * stagger_diff(grid)
    weight = b2 * grid.spacing / (p_mid * gp_mid)
    return row, weight, rho_mid, gp_mid, p_mid


def assemble_case4(profile: Profile, k: int) -> ModeProblem:
    """Parallel field, compressible; every term of the numerator is <= 0."""
    case = check_case(profile, Case.PARALLEL_COMPRESSIBLE)
    k = _check_k(k)
    grid, g = profile.grid, profile.g
    n, m = grid.n, grid.n_mid
    b2 = _parallel_b0(profile) ** 2
    h_row, h_weight, rho_mid, gp_mid, p_mid = _case4_h_row(profile)

    d_mid, w_nodes = _midpoint_diff(grid)
    bending = np.zeros((n + m, n + m))
    bending[n:, n:] = b2 * _form(d_mid, w_nodes)

    g_row = np.hstack(
        [
            (gp_mid / p_mid)[:, None] * stagger_diff(grid)
            + (g * rho_mid / p_mid)[:, None] * stagger_avg(grid),
            k * np.eye(m),
        ]
    )
    compression = _form(g_row, p_mid * grid.spacing)

    potential = np.zeros((n + m, n + m))
    potential[:n, :n] = -_form(h_row, h_weight)
    a = potential - bending - compression
    return ModeProblem(case, k, 0.5 * (a + a.T), _pair_mass(profile), "pair_u1_u2", profile)


_ASSEMBLERS = {
    Case.TRANSVERSE_INCOMPRESSIBLE: assemble_case1,
    Case.TRANSVERSE_COMPRESSIBLE: assemble_case2,
    Case.PARALLEL_INCOMPRESSIBLE: assemble_case3,
    Case.PARALLEL_COMPRESSIBLE: assemble_case4,
}


def assemble(profile: Profile, case, k: int) -> ModeProblem:
    """Dispatch to the assembler for ``case``."""
    return _ASSEMBLERS[Case.parse(case)](profile, k)


def assemble_limit(profile: Profile, case) -> ModeProblem:
    """Pencil of the ``k -> oo`` quotient ``int H(v, v_x) / int rho0 v^2``.

    H has no y-derivatives, so the two-dimensional supremum splits into
    independent x-problems, one per y-slice, each with the same supremum.
    The one-dimensional pencil built here is therefore exact for the 2D
    quotient.
    """
    case = check_case(profile, case)
    grid = profile.grid
    mass = _diag(profile.rho0 * grid.weights)
    if case is Case.TRANSVERSE_INCOMPRESSIBLE:
        a = _gravity_potential(profile)
    elif case is Case.TRANSVERSE_COMPRESSIBLE:
        p_total = profile.sound_plus_alfven
        a = _diag(
            (profile.g**2 * profile.rho0**2 / p_total - profile.g * profile.rho0x) * grid.weights
        )
    elif case is Case.PARALLEL_INCOMPRESSIBLE:
        b2 = _parallel_b0(profile) ** 2
        tension = _form(stagger_diff(grid), np.full(grid.n_mid, grid.spacing))
        a = _gravity_potential(profile) - b2 * tension
    else:
        h_row, h_weight, *_ = _case4_h_row(profile)
        a = -_form(h_row, h_weight)
    return ModeProblem(case, math.inf, 0.5 * (a + a.T), mass, "scalar_u1", profile)


def rayleigh_quotient(problem: ModeProblem, u) -> float:
    """``u^T A u / u^T M u``."""
    u = np.asarray(u, dtype=float)
    if u.shape != (problem.size,):
        raise SizeError(f"vector has shape {u.shape}, problem has {problem.size} unknowns")
    if not np.any(u):
        raise DomainError("Rayleigh quotient of the zero vector")
    return float(u @ problem.a @ u) / float(u @ problem.m @ u)


def quadratic_form(problem: ModeProblem, u) -> float:
    """Numerator ``u^T A u`` alone (defined at u = 0)."""
    u = np.asarray(u, dtype=float)
    return float(u @ problem.a @ u)
