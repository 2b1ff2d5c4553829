"""Symmetrizer and symmetrized flux matrices of the compressible system.

The unknowns are ``w = (sigma, v1, v2, v3, B1, B2, B3)``. Every matrix is
filled entry by entry, with the same Python float written into both
mirrored slots, so symmetry holds bit for bit rather than to roundoff.
"""

from __future__ import annotations

from dataclasses import astuple, dataclass
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from ._csv import write_csv
from .exceptions import DomainError
from .profiles import Profile

DENSITY_THRESHOLD = 1e-8


@dataclass(frozen=True)
class State7:
    sigma: float = 0.0
    v1: float = 0.0
    v2: float = 0.0
    v3: float = 0.0
    b1: float = 0.0
    b2: float = 0.0
    b3: float = 0.0

    def as_array(self) -> NDArray[np.float64]:
        return np.array(astuple(self), dtype=float)

    @classmethod
    def from_array(cls, w) -> "State7":
        w = [float(x) for x in w]
        if len(w) != 7:
            raise ValueError("a state has exactly 7 components")
        return cls(*w)

    def scaled(self, alpha: float) -> "State7":
        return State7.from_array(alpha * self.as_array())


@dataclass(frozen=True)
class PointContext:
    """Background values at one point."""

    rho0: float
    rho0x: float = 0.0
    b0: float = 0.0
    b0x: float = 0.0
    gamma: float = 5.0 / 3.0

    def __post_init__(self):
        if not self.rho0 > 0:
            raise DomainError(f"rho0 must be positive, got {self.rho0}")
        if not self.gamma > 1:
            raise DomainError(f"gamma must exceed 1, got {self.gamma}")


def q(rho: float, gamma: float) -> float:
    """``q(rho) = gamma rho^(gamma-2)``, the pressure-gradient coefficient."""
    return gamma * rho ** (gamma - 2.0)


def dq(rho: float, gamma: float) -> float:
    return gamma * (gamma - 2.0) * rho ** (gamma - 3.0)


def _total_density(state: State7, ctx: PointContext) -> float:
    rho = ctx.rho0 + state.sigma
    if rho <= DENSITY_THRESHOLD:
        raise DomainError(f"total density {rho:.3g} is not positive (threshold {DENSITY_THRESHOLD})")
    return rho


def symmetrizer(state: State7, ctx: PointContext) -> NDArray[np.float64]:
    """``diag(q(rho), rho, rho, rho, 1, 1, 1)`` with ``rho = rho0 + sigma``."""
    rho = _total_density(state, ctx)
    return np.diag([q(rho, ctx.gamma), rho, rho, rho, 1.0, 1.0, 1.0])


def _put(mat: NDArray[np.float64], i: int, j: int, value: float):
    mat[i, j] = value
    mat[j, i] = value


def flux_jacobians(state: State7, ctx: PointContext):
    """Symmetrized flux matrices ``(DA1, DA2, DA3)`` at one point."""
    rho = _total_density(state, ctx)
    qr = q(rho, ctx.gamma)
    rq = rho * qr
    s = state
    b3t = s.b3 + ctx.b0
    mats = []
    for v, pressure_col in ((s.v1, 1), (s.v2, 2), (s.v3, 3)):
        mat = np.zeros((7, 7))
        mat[0, 0] = qr * v
        for j in (1, 2, 3):
            mat[j, j] = rho * v
        for j in (4, 5, 6):
            mat[j, j] = v
        _put(mat, 0, pressure_col, rq)
        mats.append(mat)
    da1, da2, da3 = mats

    _put(da1, 1, 5, s.b2)
    _put(da1, 1, 6, b3t)
    _put(da1, 2, 5, -s.b1)
    _put(da1, 3, 6, -s.b1)

    _put(da2, 1, 4, -s.b2)
    _put(da2, 2, 4, s.b1)
    _put(da2, 2, 6, b3t)
    _put(da2, 3, 6, -s.b2)

    _put(da3, 1, 4, -s.b3)
    _put(da3, 2, 5, -s.b3)
    _put(da3, 3, 4, s.b1)
    _put(da3, 3, 5, s.b2)
    _put(da3, 3, 6, ctx.b0)
    return da1, da2, da3


def lower_order(state: State7, ctx: PointContext):
    """Linear lower-order vector ``DL`` and nonlinear remainder ``DF``.

    The second entry of ``DF`` subtracts the first-order Taylor terms of
    ``rho q(rho)`` about ``rho0`` and then multiplies by ``rho0x``, so it is
    quadratic in ``sigma``.
    """
    rho = _total_density(state, ctx)
    g, r0, r0x = ctx.gamma, ctx.rho0, ctx.rho0x
    s = state
    q0, dq0 = q(r0, g), dq(r0, g)
    dl = np.array(
        [
            r0x * q0 * s.v1,
            q0 * r0x * s.sigma + r0 * dq0 * r0x * s.sigma + ctx.b0x * s.b3,
            0.0,
            -ctx.b0x * s.b1,
            0.0,
            0.0,
            ctx.b0x * s.v1,
        ]
    )
    remainder = rho * q(rho, g) - r0 * q0 - q0 * s.sigma - r0 * dq0 * s.sigma
    df = np.array(
        [r0x * q0 * s.v1 - r0x * q(rho, g) * s.v1, remainder * r0x, 0.0, 0.0, 0.0, 0.0, 0.0]
    )
    return dl, df


def check_norm_equivalence(profile: Profile, sigma) -> tuple[float, float]:
    """Largest ``eta`` and smallest ``C`` with ``eta I <= D(x) <= C I`` on all nodes."""
    rho = profile.rho0 + np.broadcast_to(np.asarray(sigma, dtype=float), profile.rho0.shape)
    if np.any(rho <= DENSITY_THRESHOLD):
        raise DomainError("total density must be positive at every node")
    qs = profile.gamma * rho ** (profile.gamma - 2.0)
    entries = np.concatenate([qs, rho, [1.0]])
    return float(entries.min()), float(entries.max())


def dump_matrices(path, state: State7, ctx: PointContext) -> Path:
    """Write ``D``, ``DA1``, ``DA2``, ``DA3`` as rows ``matrix,row,c0..c6``."""
    named = [("D", symmetrizer(state, ctx))]
    named += list(zip(("DA1", "DA2", "DA3"), flux_jacobians(state, ctx)))
    rows = [(name, i, *mat[i]) for name, mat in named for i in range(7)]
    header = ["matrix", "row"] + [f"c{j}" for j in range(7)]
    return write_csv(path, header, rows)
