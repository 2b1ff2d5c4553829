"""Grids and magnetohydrostatic background states.

A background ``(rho0, p0, B0)`` with zero velocity is steady when

    d/dx (p0 + B0**2 / 2) = rho0 * g

Two constructions are offered. ``balanced`` takes rho0 and B0 from the
profile spec and integrates the balance for p0. ``isentropic`` imposes
p0 = C rho0**gamma and integrates the balance as an ODE for rho0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import cumulative_trapezoid

from ._csv import write_csv
from .exceptions import CaseError, DomainError, SizeError

BOUNDARY_CONDITIONS = ("periodic", "free")
PROFILE_KINDS = ("linear", "exponential", "tanh_interface", "table")
CONSTRUCTIONS = ("balanced", "isentropic")
ORIENTATIONS = ("transverse", "parallel")

DEFAULT_DENSITY_FLOOR = 1e-6
MIN_POINTS = 8


def _frozen(a) -> NDArray[np.float64]:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Grid:
    """Uniform mesh on ``[0, length]``.

    Free grids include both end points and carry trapezoid weights. Periodic
    grids drop the right end point (it is identified with ``x = 0``) and carry
    uniform weights.
    """

    n: int
    bc: str
    length: float = 2 * np.pi
    nodes: NDArray[np.float64] = field(init=False, repr=False)
    weights: NDArray[np.float64] = field(init=False, repr=False)

    def __post_init__(self):
        if self.bc not in BOUNDARY_CONDITIONS:
            raise ValueError(f"unknown boundary condition {self.bc!r}")
        if self.n < MIN_POINTS:
            raise SizeError(f"grid needs at least {MIN_POINTS} points, got {self.n}")
        h = self.spacing
        nodes = np.arange(self.n) * h
        weights = np.full(self.n, h)
        if self.bc == "free":
            nodes[-1] = self.length
            weights[0] = weights[-1] = 0.5 * h
        object.__setattr__(self, "nodes", _frozen(nodes))
        object.__setattr__(self, "weights", _frozen(weights))

    @property
    def spacing(self) -> float:
        if self.bc == "periodic":
            return self.length / self.n
        return self.length / (self.n - 1)

    @property
    def periodic(self) -> bool:
        return self.bc == "periodic"

    @property
    def n_mid(self) -> int:
        """Number of cell midpoints (staggered locations)."""
        return self.n if self.periodic else self.n - 1

    @property
    def midpoints(self) -> NDArray[np.float64]:
        return self.nodes[: self.n_mid] + 0.5 * self.spacing

    def to_midpoints(self, values) -> NDArray[np.float64]:
        """Average nodal values onto cell midpoints (wrapping if periodic)."""
        values = np.asarray(values, dtype=float)
        if self.periodic:
            return 0.5 * (values + np.roll(values, -1))
        return 0.5 * (values[:-1] + values[1:])


def build_grid(n: int, bc: str = "free", length: float = 2 * np.pi) -> Grid:
    """Build a uniform grid with ``n`` points and boundary tag ``bc``."""
    return Grid(int(n), bc, float(length))


@dataclass(frozen=True)
class ProfileSpec:
    """Description of a density profile.

    ``parameters`` depends on ``kind``:

    * ``linear``: ``intercept`` (default 3), ``slope`` (default 0)
    * ``exponential``: ``amplitude`` (default 1), ``rate`` (default 0)
    * ``tanh_interface``: ``mean`` (2), ``jump`` (1), ``location`` (pi),
      ``width`` (0.2); density falls by ``jump`` across the interface
    * ``table``: ``values``, one density per grid node

    The isentropic construction only reads the starting density, from
    ``rho_at_0`` or else from the kind evaluated at ``x = 0``.
    """

    kind: str = "linear"
    parameters: Mapping[str, object] = field(default_factory=dict)
    construction: str = "balanced"

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.construction not in CONSTRUCTIONS:
            raise ValueError(f"unknown construction {self.construction!r}")
        if self.kind == "table" and "values" not in self.parameters:
            raise ValueError("table profile needs 'values'")

    def _param(self, name, default):
        return float(self.parameters.get(name, default))

    def density(self, grid: Grid) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Return ``(rho0, rho0x)`` on the grid nodes."""
        x = grid.nodes
        if self.kind == "linear":
            a, s = self._param("intercept", 3.0), self._param("slope", 0.0)
            return a + s * x, np.full_like(x, s)
        if self.kind == "exponential":
            amp, rate = self._param("amplitude", 1.0), self._param("rate", 0.0)
            rho = amp * np.exp(rate * x)
            return rho, rate * rho
        if self.kind == "tanh_interface":
            mean = self._param("mean", 2.0)
            jump = self._param("jump", 1.0)
            loc = self._param("location", np.pi)
            width = self._param("width", 0.2)
            s = (x - loc) / width
            return mean - 0.5 * jump * np.tanh(s), -0.5 * jump / width / np.cosh(s) ** 2
        values = np.asarray(self.parameters["values"], dtype=float)
        if values.shape != (grid.n,):
            raise SizeError(f"table profile needs exactly {grid.n} values, got {values.size}")
        return values.copy(), nodal_gradient(values, grid)

    def value_at_zero(self) -> float:
        if "rho_at_0" in self.parameters:
            return self._param("rho_at_0", 1.0)
        if self.kind == "table":
            return float(np.asarray(self.parameters["values"], dtype=float)[0])
        return float(self.density(build_grid(MIN_POINTS))[0][0])


def nodal_gradient(values, grid: Grid) -> NDArray[np.float64]:
    """Second-order centered derivative of nodal samples."""
    values = np.asarray(values, dtype=float)
    h = grid.spacing
    if grid.periodic:
        return (np.roll(values, -1) - np.roll(values, 1)) / (2 * h)
    return np.gradient(values, h, edge_order=2)


@dataclass(frozen=True)
class Profile:
    """Sampled steady state on a grid."""

    grid: Grid
    rho0: NDArray[np.float64]
    rho0x: NDArray[np.float64]
    p0: NDArray[np.float64]
    p0x: NDArray[np.float64]
    b0: NDArray[np.float64]
    b0x: NDArray[np.float64]
    g: float
    gamma: float
    closure_c: float
    field_orientation: str
    construction: str = "balanced"
    density_floor: float = DEFAULT_DENSITY_FLOOR

    def __post_init__(self):
        for name in ("rho0", "rho0x", "p0", "p0x", "b0", "b0x"):
            arr = _frozen(getattr(self, name))
            if arr.shape != (self.grid.n,):
                raise SizeError(f"{name} has shape {arr.shape}, grid has {self.grid.n} nodes")
            object.__setattr__(self, name, arr)
        if self.field_orientation not in ORIENTATIONS:
            raise ValueError(f"unknown field orientation {self.field_orientation!r}")
        if self.rho0.min() < self.density_floor:
            raise DomainError(
                f"density floor violated: min rho0 = {self.rho0.min():.6g} "
                f"< {self.density_floor:g}"
            )
        if self.p0.min() <= 0:
            raise DomainError(f"pressure must be positive, min p0 = {self.p0.min():.6g}")
        if self.field_orientation == "parallel" and (
            np.ptp(self.b0) != 0 or np.any(self.b0x != 0)
        ):
            raise CaseError("parallel orientation needs a constant B0 (orientation error)")

    @property
    def x(self) -> NDArray[np.float64]:
        return self.grid.nodes

    @property
    def sound_plus_alfven(self) -> NDArray[np.float64]:
        """gamma * p0 + B0**2, the coefficient of the compressive terms."""
        return self.gamma * self.p0 + self.b0**2

    def to_csv(self, path) -> Path:
        """Dump nodal fields with header ``x,rho0,rho0x,p0,p0x,b0,b0x``."""
        cols = (self.x, self.rho0, self.rho0x, self.p0, self.p0x, self.b0, self.b0x)
        return write_csv(
            path, ["x", "rho0", "rho0x", "p0", "p0x", "b0", "b0x"], zip(*cols)
        )


def _field_b0(b0, grid: Grid):
    if np.ndim(b0) == 0:
        return np.full(grid.n, float(b0)), np.zeros(grid.n)
    b0 = np.asarray(b0, dtype=float)
    if b0.shape != (grid.n,):
        raise SizeError(f"B0 table needs exactly {grid.n} values, got {b0.size}")
    if np.ptp(b0) == 0:
        return b0.copy(), np.zeros(grid.n)
    return b0.copy(), nodal_gradient(b0, grid)


def _rk4_density(rho_start, grid: Grid, g, gamma, c, magnetic, floor):
    """Integrate C gamma rho^(gamma-1) rho' = rho g - B0 B0x with RK4."""
    x, h = grid.nodes, grid.spacing
    mid_magnetic = np.interp(grid.midpoints, x, magnetic) if np.any(magnetic) else None

    def rhs(rho, mag):
        return (rho * g - mag) / (c * gamma * rho ** (gamma - 1.0))

    rho = np.empty(grid.n)
    rho[0] = rho_start
    for i in range(grid.n - 1):
        r = rho[i]
        mag_mid = 0.0 if mid_magnetic is None else mid_magnetic[i]
        k1 = rhs(r, magnetic[i])
        k2 = rhs(r + 0.5 * h * k1, mag_mid)
        k3 = rhs(r + 0.5 * h * k2, mag_mid)
        k4 = rhs(r + h * k3, magnetic[i + 1])
        rho[i + 1] = r + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        if not np.isfinite(rho[i + 1]) or rho[i + 1] < floor:
            raise DomainError(f"isentropic density fell below the floor near x = {x[i + 1]:.6g}")
    return rho, rhs(rho, magnetic)


def make_profile(
    spec: ProfileSpec,
    grid: Grid,
    g: float = 1.0,
    gamma: float = 5.0 / 3.0,
    b0_amplitude=0.0,
    orientation: str = "transverse",
    p0_at_0: float = 1.0,
    closure_c: float = 1.0,
    density_floor: float = DEFAULT_DENSITY_FLOOR,
) -> Profile:
    """Construct a steady state on ``grid``.

    Parameters
    ----------
    spec : ProfileSpec
        Density description and construction mode.
    grid : Grid
    g : float
        Signed gravitational acceleration along x.
    gamma : float
        Adiabatic index.
    b0_amplitude : float or array_like
        Constant field strength, or a table of nodal values (transverse only).
    orientation : {"transverse", "parallel"}
    p0_at_0 : float
        Pressure at x = 0 for the balanced construction.
    closure_c : float
        Constant ``C`` in ``p = C rho**gamma`` (isentropic construction).
    density_floor : float
        Lower bound ``c`` on rho0.

    Raises
    ------
    DomainError
        Density floor violated or non-positive pressure.
    CaseError
        Non-constant B0 with parallel orientation.
    """
    b0, b0x = _field_b0(b0_amplitude, grid)
    if orientation == "parallel" and np.any(b0x != 0):
        raise CaseError("parallel orientation needs a constant B0 (orientation error)")
    magnetic = b0 * b0x

    if spec.construction == "balanced":
        rho0, rho0x = spec.density(grid)
        if rho0.min() < density_floor:
            raise DomainError(
                f"density floor violated: min rho0 = {rho0.min():.6g} < {density_floor:g}"
            )
        if p0_at_0 <= 0:
            raise DomainError("p0(0) must be positive")
        # magnetic pressure is exact; only the weight integral is quadrature
        weight = g * cumulative_trapezoid(rho0, grid.nodes, initial=0.0)
        p0 = p0_at_0 + 0.5 * (b0[0] ** 2 - b0**2) + weight
        p0x = rho0 * g - magnetic
    else:
        if gamma <= 1:
            raise DomainError("isentropic construction needs gamma > 1")
        if closure_c <= 0:
            raise DomainError("closure constant must be positive")
        rho0, rho0x = _rk4_density(
            spec.value_at_zero(), grid, g, gamma, closure_c, magnetic, density_floor
        )
        p0 = closure_c * rho0**gamma
        p0x = closure_c * gamma * rho0 ** (gamma - 1.0) * rho0x

    return Profile(
        grid=grid,
        rho0=rho0,
        rho0x=rho0x,
        p0=p0,
        p0x=p0x,
        b0=b0,
        b0x=b0x,
        g=float(g),
        gamma=float(gamma),
        closure_c=float(closure_c),
        field_orientation=orientation,
        construction=spec.construction,
        density_floor=float(density_floor),
    )


def validate_steady_state(profile: Profile) -> float:
    """Max over interior nodes of |d/dx(p0 + B0^2/2) - rho0 g|.

    The derivative is a centered difference of the stored fields, so the
    result measures how well the sampled state satisfies the balance.
    """
    total = profile.p0 + 0.5 * profile.b0**2
    h = profile.grid.spacing
    slope = (total[2:] - total[:-2]) / (2 * h)
    return float(np.max(np.abs(slope - profile.rho0[1:-1] * profile.g)))
