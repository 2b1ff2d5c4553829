"""Time integration of the per-wave-number linearized system.

Each wave number evolves independently under ``M v_tt = A v``, the
semi-discrete form of ``rho0 v_tt = L_k(v)``. Leapfrog (Stormer-Verlet) is
used on this second-order form. With ``w = (v[n+1] - v[n]) / dt`` the
quantity

    E = w^T M w - v[n+1]^T A v[n]

is conserved exactly by the scheme (up to roundoff), so it is what the
history records as the energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg as sla
from numpy.typing import NDArray

from ._csv import write_csv
from .exceptions import BlowUpError, DomainError, ModeError, SizeError
from .operators import ModeProblem
from .spectra import solve_principal

DEFAULT_DT_FACTOR = 0.5
DEFAULT_WINDOW = 0.5


def pencil_extremes(problem: ModeProblem) -> tuple[float, float]:
    """Smallest and largest eigenvalue of the pencil."""
    mu = sla.eigh(problem.a, problem.m, eigvals_only=True)
    return float(mu[0]), float(mu[-1])


def cfl_dt(problem: ModeProblem, factor: float = DEFAULT_DT_FACTOR) -> float:
    """Time step bound for leapfrog on ``problem``.

    The wave-speed bound ``factor * h / c_max`` uses the fast magnetosonic
    speed for compressible cases and ``max(B0 / sqrt(rho0), lambda h k)``
    for incompressible ones. It is capped by the exact leapfrog stability
    limit ``factor * 2 / sqrt(-mu_min)`` of the discrete pencil.
    """
    prof, h = problem.profile, problem.grid.spacing
    mu_min, mu_max = pencil_extremes(problem)
    if problem.case.compressible:
        c_max = float(np.max(np.sqrt(prof.sound_plus_alfven / prof.rho0)))
    else:
        lam = math.sqrt(max(mu_max, 0.0))
        c_max = max(float(np.max(np.abs(prof.b0) / np.sqrt(prof.rho0))), lam * h * problem.k)
    bounds = []
    if c_max > 0:
        bounds.append(h / c_max)
    if mu_min < 0:
        bounds.append(2.0 / math.sqrt(-mu_min))
    return factor * (min(bounds) if bounds else h)


@dataclass
class SimState:
    """Leapfrog state for one wave number. Mutated in place by stepping."""

    problem: ModeProblem
    v: NDArray[np.float64]
    v_prev: NDArray[np.float64]
    dt: float
    stride: int = 1
    steps: int = 0
    history: list = field(default_factory=list)
    operator: NDArray[np.float64] = field(default=None, repr=False)

    def __post_init__(self):
        if self.operator is None:
            self.operator = sla.cho_solve(sla.cho_factor(self.problem.m), self.problem.a)

    @property
    def t(self) -> float:
        return self.steps * self.dt

    def m_norm(self, v=None) -> float:
        v = self.v if v is None else v
        return math.sqrt(max(float(v @ self.problem.m @ v), 0.0))

    def energy(self) -> float:
        w = (self.v - self.v_prev) / self.dt
        return float(w @ self.problem.m @ w - self.v @ self.problem.a @ self.v_prev)

    def record(self):
        self.history.append((self.t, self.m_norm(), self.energy()))

    def history_array(self) -> NDArray[np.float64]:
        return np.array(self.history, dtype=float).reshape(-1, 3)

    def to_csv(self, path) -> Path:
        """History with header ``t,m_norm,energy``."""
        return write_csv(path, ["t", "m_norm", "energy"], self.history)


def initial_data(
    problem: ModeProblem,
    kind: str = "eigenmode",
    seed: int = 0,
    dt: float | None = None,
    stride: int = 1,
    v0=None,
    vt0=None,
    dt_factor: float = DEFAULT_DT_FACTOR,
) -> SimState:
    """Start a simulation.

    ``eigenmode`` takes the principal eigenvector with ``v_t = lambda v``;
    ``random`` takes a seeded M-normalized Gaussian vector at rest;
    ``custom`` takes ``v0`` and ``vt0``. The previous leapfrog level comes
    from a second-order Taylor step backwards.
    """
    if kind == "eigenmode":
        lam2, u = solve_principal(problem)
        if lam2 <= 0:
            raise ModeError(
                f"mode error: eigenmode start needs lambda^2 > 0, principal is {lam2:.6g}"
            )
        v, vt = u, math.sqrt(lam2) * u
    elif kind == "random":
        rng = np.random.default_rng(seed)
        v = rng.standard_normal(problem.size)
        v /= math.sqrt(float(v @ problem.m @ v))
        vt = np.zeros_like(v)
    elif kind == "custom":
        if v0 is None:
            raise ValueError("custom initial data needs v0")
        v = np.asarray(v0, dtype=float)
        vt = np.zeros_like(v) if vt0 is None else np.asarray(vt0, dtype=float)
        if v.shape != (problem.size,) or vt.shape != (problem.size,):
            raise SizeError("custom initial data has the wrong size")
    else:
        raise ValueError(f"unknown initial data kind {kind!r}")

    if dt is None:
        dt = cfl_dt(problem, dt_factor)
    if dt <= 0:
        raise DomainError("dt must be positive")
    state = SimState(problem, v.copy(), v.copy(), float(dt), stride=int(stride))
    state.v_prev = v - dt * vt + 0.5 * dt**2 * (state.operator @ v)
    state.record()
    return state


def step_leapfrog(state: SimState) -> SimState:
    """Advance one step: ``v+ = 2 v - v- + dt^2 M^-1 A v``."""
    v_next = 2.0 * state.v - state.v_prev + state.dt**2 * (state.operator @ state.v)
    if not np.all(np.isfinite(v_next)):
        raise BlowUpError(f"non-finite state at step {state.steps + 1}", state.steps + 1)
    state.v_prev, state.v = state.v, v_next
    state.steps += 1
    if state.steps % state.stride == 0:
        state.record()
    return state


def simulate(
    problem: ModeProblem,
    dt: float | None,
    t_end: float,
    kind: str = "eigenmode",
    stride: int = 1,
    seed: int = 0,
    dt_factor: float = DEFAULT_DT_FACTOR,
) -> SimState:
    """Run leapfrog from ``initial_data`` up to ``t_end``."""
    if t_end <= 0:
        raise DomainError("t_end must be positive")
    state = initial_data(problem, kind, seed=seed, dt=dt, stride=stride, dt_factor=dt_factor)
    n_steps = int(math.ceil(t_end / state.dt - 1e-9))
    for _ in range(n_steps):
        step_leapfrog(state)
    return state


@dataclass(frozen=True)
class GrowthFit:
    lambda_fit: float
    window: tuple[float, float]
    r_squared: float
    oscillatory: bool
    slope: float


def fit_growth_rate(history, window_fraction: float = DEFAULT_WINDOW) -> GrowthFit:
    """Least-squares slope of ``log m_norm`` over the trailing window.

    ``history`` is a :class:`SimState` or rows ``(t, m_norm, ...)``. The run
    is flagged oscillatory when the trend is flat or explains little of the
    variance, and the residuals change sign; the growth rate is then 0.
    """
    rows = history.history_array() if isinstance(history, SimState) else np.asarray(history, float)
    if rows.ndim != 2 or rows.shape[0] == 0:
        raise SizeError("empty history")
    t, m = rows[:, 0], rows[:, 1]
    start = t[-1] - window_fraction * (t[-1] - t[0])
    sel = t >= start - 1e-12 * max(abs(start), 1.0)
    if sel.sum() < 10:
        raise SizeError(f"growth fit needs at least 10 samples in the window, got {sel.sum()}")
    tw, logm = t[sel], np.log(m[sel])
    slope, intercept = np.polyfit(tw, logm, 1)
    resid = logm - (slope * tw + intercept)
    ss_tot = float(np.sum((logm - logm.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    sign_changes = int(np.count_nonzero(np.diff(np.sign(resid[resid != 0])) != 0))
    oscillatory = (slope <= 1e-6 or r2 < 0.5) and sign_changes >= 2
    rate = 0.0 if oscillatory else float(slope)
    return GrowthFit(rate, (float(tw[0]), float(tw[-1])), r2, bool(oscillatory), float(slope))
