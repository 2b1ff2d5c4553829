"""Growing normal modes, escape times and discrete vector identities.

Only the leading-order growing mode ``r1`` is built here; the higher
corrections of the approximate-solution hierarchy are out of scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from ._csv import write_csv
from .exceptions import DomainError, DominanceError, SizeError
from .operators import Case, diff_matrix
from .profiles import Grid
from .spectra import Spectrum

DOMINANCE_TOL = 1e-12
MIN_NY = 4


@dataclass(frozen=True)
class NormalMode:
    """Dominant mode ``v1 ~ cos(k0 y)``, ``v2 ~ sin(k0 y)`` growing at ``lam``."""

    case: Case
    k0: int
    lam: float
    capital_lambda: float
    grid: Grid = field(repr=False)
    v1_profile: NDArray[np.float64] = field(repr=False)
    v2_profile: NDArray[np.float64] = field(repr=False)

    def __post_init__(self):
        if not self.lam > 0:
            raise DominanceError("a growing mode needs lambda > 0")


def _midpoints_to_nodes(values: NDArray[np.float64], grid: Grid) -> NDArray[np.float64]:
    if grid.periodic:
        return 0.5 * (values + np.roll(values, 1))
    return np.interp(grid.nodes, grid.midpoints, values)


def select_dominant(spectrum: Spectrum, tol: float = DOMINANCE_TOL) -> NormalMode:
    """Smallest k with ``lambda_k^2 > Lambda^2 / 4 + tol``, so that ``Lambda < 2 lambda``."""
    if spectrum.profile is None:
        raise ValueError("spectrum carries no profile; build it with spectrum_over_k")
    big = spectrum.capital_lambda_sq
    grid = spectrum.profile.grid
    for entry in spectrum.entries:
        if entry.lambda_sq > 0 and entry.lambda_sq > big / 4 + tol:
            n = grid.n
            if spectrum.case.compressible:
                v1 = entry.vector[:n]
                v2 = _midpoints_to_nodes(entry.vector[n:], grid)
            else:
                v1 = entry.vector
                v2 = -(diff_matrix(grid, 1) @ v1) / entry.k
            lam = math.sqrt(entry.lambda_sq)
            return NormalMode(
                spectrum.case, entry.k, lam, math.sqrt(max(big, 0.0)), grid, v1.copy(), v2
            )
    raise DominanceError(
        f"dominance error: no wave number has lambda_k^2 > Lambda^2/4 (Lambda^2={big:.6g})"
    )


@dataclass(frozen=True)
class Field2D:
    """Three velocity-like components on an ``nx`` by ``ny`` tensor grid, periodic in y."""

    x: NDArray[np.float64]
    y: NDArray[np.float64]
    c1: NDArray[np.float64]
    c2: NDArray[np.float64]
    c3: NDArray[np.float64]
    periodic_x: bool = True

    @property
    def nx(self) -> int:
        return self.x.size

    @property
    def ny(self) -> int:
        return self.y.size

    @property
    def spacing(self) -> tuple[float, float]:
        return float(self.x[1] - self.x[0]), float(self.y[1] - self.y[0])

    @property
    def components(self) -> tuple[NDArray[np.float64], ...]:
        return self.c1, self.c2, self.c3

    def to_csv(self, path) -> Path:
        """Rows ``x,y,v1,v2`` in x-major order."""
        xx, yy = np.meshgrid(self.x, self.y, indexing="ij")
        rows = zip(xx.ravel(), yy.ravel(), self.c1.ravel(), self.c2.ravel())
        return write_csv(path, ["x", "y", "v1", "v2"], rows)


def periodic_axis(n: int, length: float = 2 * np.pi) -> NDArray[np.float64]:
    return np.arange(n) * (length / n)


def mode_field(mode: NormalMode, t: float, ny: int) -> Field2D:
    """Sample ``v(x, y, t)`` of the normal mode on ``ny`` points in y."""
    if ny < MIN_NY:
        raise SizeError(f"ny must be at least {MIN_NY}")
    y = periodic_axis(ny)
    growth = math.exp(mode.lam * t)
    v1 = growth * np.outer(mode.v1_profile, np.cos(mode.k0 * y))
    v2 = growth * np.outer(mode.v2_profile, np.sin(mode.k0 * y))
    return Field2D(mode.grid.nodes.copy(), y, v1, v2, np.zeros_like(v1), mode.grid.periodic)


def escape_time(delta: float, theta: float, lam: float) -> float:
    """Time ``ln(theta / delta) / lam`` for an O(delta) mode to reach theta."""
    if not (0 < delta <= theta) or not lam > 0:
        raise DomainError(
            f"escape time needs 0 < delta <= theta and lambda > 0, got {delta}, {theta}, {lam}"
        )
    return math.log(theta / delta) / lam


def _ddx(f: NDArray[np.float64], h: float, periodic: bool) -> NDArray[np.float64]:
    if periodic:
        return (np.roll(f, -1, axis=0) - np.roll(f, 1, axis=0)) / (2 * h)
    return np.gradient(f, h, axis=0, edge_order=2)


def _ddy(f: NDArray[np.float64], h: float) -> NDArray[np.float64]:
    return (np.roll(f, -1, axis=1) - np.roll(f, 1, axis=1)) / (2 * h)


def _gradient(f, hx, hy, periodic):
    return (_ddx(f, hx, periodic), _ddy(f, hy), np.zeros_like(f))


def _cross(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def _curl(c, hx, hy, periodic):
    return (
        _ddy(c[2], hy),
        -_ddx(c[2], hx, periodic),
        _ddx(c[1], hx, periodic) - _ddy(c[0], hy),
    )


def _div(c, hx, hy, periodic):
    return _ddx(c[0], hx, periodic) + _ddy(c[1], hy)


def _advect(a, b, hx, hy, periodic):
    """``(a . grad) b`` componentwise."""
    return tuple(a[0] * _ddx(bj, hx, periodic) + a[1] * _ddy(bj, hy) for bj in b)


def vector_identity_residual(a: Field2D, b: Field2D) -> tuple[float, float]:
    """Max-norm residuals of the curl-of-cross and gradient-of-dot identities.

    Derivatives are centered differences with z-derivatives zero, so the
    residuals measure truncation error only.
    """
    if a.x.shape != b.x.shape or a.y.shape != b.y.shape or a.c1.shape != b.c1.shape:
        raise SizeError("fields are sampled on different grids")
    if not (np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)):
        raise SizeError("fields are sampled on different grids")
    hx, hy = a.spacing
    per = a.periodic_x and b.periodic_x
    ac, bc = a.components, b.components

    lhs1 = _curl(_cross(ac, bc), hx, hy, per)
    div_a, div_b = _div(ac, hx, hy, per), _div(bc, hx, hy, per)
    a_grad_b = _advect(ac, bc, hx, hy, per)
    b_grad_a = _advect(bc, ac, hx, hy, per)
    rhs1 = tuple(
        ac[i] * div_b + b_grad_a[i] - bc[i] * div_a - a_grad_b[i] for i in range(3)
    )
    r1 = max(float(np.max(np.abs(lhs1[i] - rhs1[i]))) for i in range(3))

    dot = sum(ac[i] * bc[i] for i in range(3))
    lhs2 = _gradient(dot, hx, hy, per)
    a_curl_b = _cross(ac, _curl(bc, hx, hy, per))
    b_curl_a = _cross(bc, _curl(ac, hx, hy, per))
    rhs2 = tuple(a_grad_b[i] + b_grad_a[i] + a_curl_b[i] + b_curl_a[i] for i in range(3))
    r2 = max(float(np.max(np.abs(lhs2[i] - rhs2[i]))) for i in range(3))
    return r1, r2


def band_limited_field(n: int, modes: int = 3, seed: int = 0) -> Field2D:
    """Seeded random trigonometric field on the periodic square ``[0, 2 pi)^2``."""
    rng = np.random.default_rng(seed)
    x = periodic_axis(n)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    comps = []
    for _ in range(3):
        f = np.zeros_like(xx)
        for p in range(modes + 1):
            for r in range(modes + 1):
                c, s = rng.standard_normal(2) / (1 + p + r)
                f += c * np.cos(p * xx + r * yy) + s * np.sin(p * xx - r * yy)
        comps.append(f)
    return Field2D(x, x.copy(), *comps, periodic_x=True)
