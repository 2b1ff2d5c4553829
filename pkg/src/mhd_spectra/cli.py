"""Configuration-driven command line front end.

Usage::

    mhd-spectra <config-path> [--out <dir>] [--quiet]

The configuration is sectioned ``key = value`` text::

    [run]
    command = spectrum
    case = transverse_incompressible

    [profile]
    kind = linear
    slope = -1/pi

Keys may also be written as ``section.key = value`` outside any section;
bare keys before the first section belong to ``[run]``. Numeric values
accept arithmetic with ``pi`` and ``e``; lists are comma separated.
"""

from __future__ import annotations

import argparse
import ast
import math
import operator
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._csv import fmt, write_csv
from .exceptions import CaseError, ConfigError, DominanceError, MHDSpectraError
from .modes import (
    band_limited_field,
    escape_time,
    mode_field,
    select_dominant,
    vector_identity_residual,
)
from .operators import Case, assemble
from .profiles import BOUNDARY_CONDITIONS, CONSTRUCTIONS, PROFILE_KINDS, ProfileSpec, build_grid, make_profile
from .spectra import capital_lambda, instability_criterion, solve_principal, spectrum_over_k
from .symmetrize import PointContext, State7, check_norm_equivalence, dump_matrices, flux_jacobians, lower_order, symmetrizer
from .timedomain import cfl_dt, fit_growth_rate, simulate

COMMANDS = (
    "spectrum",
    "lambda",
    "criterion",
    "simulate",
    "symmetrizer-check",
    "identities",
    "escape-time",
)
PROFILE_COMMANDS = ("spectrum", "lambda", "criterion", "simulate")
DEFAULT_K = tuple(2**j for j in range(7))

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_NAMES = {"pi": math.pi, "e": math.e, "inf": math.inf}


def evaluate(text: str) -> float:
    """Evaluate a numeric expression with ``+ - * / **``, ``pi`` and ``e``."""
    text = text.replace("−", "-").replace("π", "pi")

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](walk(node.left), walk(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](walk(node.operand))
        raise ValueError(f"not a numeric expression: {text!r}")

    try:
        return walk(ast.parse(text.strip(), mode="eval"))
    except SyntaxError as err:
        raise ValueError(f"not a numeric expression: {text!r}") from err


def _as_float(text):
    return float(evaluate(text))


def _as_int(text):
    value = evaluate(text)
    if isinstance(value, float) and not value.is_integer():
        raise ValueError(f"expected an integer, got {text!r}")
    return int(value)


def _as_bool(text):
    low = text.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected true or false, got {text!r}")


def _list_of(item):
    def parse(text):
        parts = [p for p in text.split(",") if p.strip()]
        if not parts:
            raise ValueError("empty list")
        return tuple(item(p) for p in parts)

    return parse


def _float_or_list(text):
    return _list_of(_as_float)(text) if "," in text else _as_float(text)


def _choice(*options):
    def parse(text):
        value = text.strip()
        if value not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {value!r}")
        return value

    return parse


def _case(text):
    try:
        return Case.parse(text.strip())
    except (ValueError, KeyError) as err:
        raise ValueError(str(err)) from err


def _text(text):
    return text.strip()


SCHEMA = {
    "run": {
        "command": _choice(*COMMANDS),
        "case": _case,
        "samples": _as_int,
        "levels": _list_of(_as_int),
    },
    "profile": {
        "kind": _choice(*PROFILE_KINDS),
        "construction": _choice(*CONSTRUCTIONS),
        "intercept": _as_float,
        "slope": _as_float,
        "amplitude": _as_float,
        "rate": _as_float,
        "mean": _as_float,
        "jump": _as_float,
        "location": _as_float,
        "width": _as_float,
        "values": _list_of(_as_float),
        "rho_at_0": _as_float,
    },
    "grid": {"n": _as_int, "bc": _choice(*BOUNDARY_CONDITIONS)},
    "physics": {
        "g": _as_float,
        "gamma": _as_float,
        "b0": _float_or_list,
        "p0_at_0": _as_float,
        "closure_c": _as_float,
        "density_floor": _as_float,
    },
    "sweep": {
        "k": _list_of(_as_int),
        "k_min": _as_int,
        "k_max": _as_int,
        "tol": _as_float,
        "workers": _as_int,
    },
    "sim": {
        "k": _as_int,
        "dt_factor": _as_float,
        "dt": _as_float,
        "t_end": _as_float,
        "stride": _as_int,
        "init": _choice("eigenmode", "random"),
        "seed": _as_int,
        "window": _as_float,
        "delta": _as_float,
        "theta": _as_float,
        "lambda": _as_float,
        "ny": _as_int,
    },
    "output": {"dir": _text, "pencil": _as_bool, "field": _as_bool},
}


@dataclass(frozen=True)
class RunConfig:
    """Validated run description with defaults applied."""

    command: str
    case: Case | None = None
    profile: ProfileSpec = field(default_factory=ProfileSpec)
    n: int = 512
    bc: str = "free"
    g: float = 1.0
    gamma: float = 5.0 / 3.0
    b0: float | tuple = 0.0
    p0_at_0: float = 1.0
    closure_c: float = 1.0
    density_floor: float = 1e-6
    k_list: tuple = DEFAULT_K
    tol: float = 0.02
    workers: int = 1
    sim_k: int | None = None
    dt_factor: float = 0.5
    dt: float | None = None
    t_end: float | None = None
    stride: int = 1
    init: str = "eigenmode"
    seed: int = 0
    window: float = 0.5
    delta: float = 1e-3
    theta: float = 0.1
    lam: float | None = None
    ny: int = 32
    samples: int = 1000
    levels: tuple = (32, 64, 128, 256)
    out_dir: str = "mhd_out"
    write_pencil: bool = False
    write_field: bool = True

    @property
    def orientation(self) -> str:
        return self.case.orientation if self.case is not None else "transverse"


def _read_entries(text: str) -> dict:
    """Map ``(section, key)`` to ``(raw value, line number)``."""
    entries = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in SCHEMA:
                raise ConfigError(f"unknown section [{section}]", lineno)
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {line!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        sec = section
        if "." in key:
            sec, key = key.split(".", 1)
        elif sec is None:
            sec = "run"
        if sec not in SCHEMA or key not in SCHEMA[sec]:
            raise ConfigError(f"unknown key {sec}.{key}", lineno)
        if (sec, key) in entries:
            raise ConfigError(f"duplicate key {sec}.{key}", lineno)
        try:
            parsed = SCHEMA[sec][key](value)
        except ValueError as err:
            raise ConfigError(f"bad value for {sec}.{key}: {err}", lineno) from err
        entries[(sec, key)] = (parsed, lineno)
    return entries


def parse_config(text: str) -> RunConfig:
    """Parse and validate configuration text."""
    entries = _read_entries(text)
    get = lambda sec, key, default=None: entries.get((sec, key), (default, None))[0]
    line = lambda sec, key: entries.get((sec, key), (None, None))[1]

    command = get("run", "command")
    if command is None:
        raise ConfigError("missing required key run.command")
    case = get("run", "case")
    needs_case = command in PROFILE_COMMANDS or (command == "escape-time" and get("sim", "lambda") is None)
    if needs_case and case is None:
        raise ConfigError(f"missing required key run.case for command {command}")

    params = {
        key: value
        for (sec, key), (value, _) in entries.items()
        if sec == "profile" and key not in ("kind", "construction")
    }
    construction = get("profile", "construction")
    if construction is None:
        construction = "isentropic" if case is Case.PARALLEL_COMPRESSIBLE else "balanced"
    try:
        spec = ProfileSpec(get("profile", "kind", "linear"), params, construction)
    except ValueError as err:
        raise ConfigError(str(err), line("profile", "kind")) from err

    default_bc = "periodic" if case is Case.PARALLEL_COMPRESSIBLE else "free"
    n = get("grid", "n", 512)
    if n < 8:
        raise ConfigError("grid.n must be at least 8", line("grid", "n"))

    if get("sweep", "k") is not None:
        k_list = get("sweep", "k")
    elif get("sweep", "k_min") is not None or get("sweep", "k_max") is not None:
        k_min, k_max = get("sweep", "k_min", 1), get("sweep", "k_max", 64)
        if k_min < 1 or k_max < k_min:
            raise ConfigError("need 1 <= sweep.k_min <= sweep.k_max", line("sweep", "k_min"))
        k_list = []
        k = k_min
        while k <= k_max:
            k_list.append(k)
            k *= 2
        k_list = tuple(k_list)
    else:
        k_list = DEFAULT_K
    if any(k < 1 for k in k_list) or any(b <= a for a, b in zip(k_list, k_list[1:])):
        raise ConfigError("sweep.k must be positive and strictly ascending", line("sweep", "k"))

    b0 = get("physics", "b0", 0.0)
    if isinstance(b0, tuple):
        if case is not None and case.orientation == "parallel" and len(set(b0)) > 1:
            raise CaseError(
                f"line {line('physics', 'b0')}: orientation error: a parallel case needs constant b0,"
                " got a varying table"
            )
        if len(b0) != n:
            raise ConfigError(f"physics.b0 table needs {n} values", line("physics", "b0"))

    for sec, key, lo in (("sim", "dt_factor", 0.0), ("sim", "stride", 0), ("run", "samples", 0), ("sim", "ny", 3)):
        value = get(sec, key)
        if value is not None and not value > lo:
            raise ConfigError(f"{sec}.{key} must exceed {lo}", line(sec, key))

    return RunConfig(
        command=command,
        case=case,
        profile=spec,
        n=n,
        bc=get("grid", "bc", default_bc),
        g=get("physics", "g", 1.0),
        gamma=get("physics", "gamma", 5.0 / 3.0),
        b0=b0,
        p0_at_0=get("physics", "p0_at_0", 1.0),
        closure_c=get("physics", "closure_c", 1.0),
        density_floor=get("physics", "density_floor", 1e-6),
        k_list=tuple(k_list),
        tol=get("sweep", "tol", 0.02),
        workers=get("sweep", "workers", 1),
        sim_k=get("sim", "k"),
        dt_factor=get("sim", "dt_factor", 0.5),
        dt=get("sim", "dt"),
        t_end=get("sim", "t_end"),
        stride=get("sim", "stride", 1),
        init=get("sim", "init", "eigenmode"),
        seed=get("sim", "seed", 0),
        window=get("sim", "window", 0.5),
        delta=get("sim", "delta", 1e-3),
        theta=get("sim", "theta", 0.1),
        lam=get("sim", "lambda"),
        ny=get("sim", "ny", 32),
        samples=get("run", "samples", 1000),
        levels=get("run", "levels", (32, 64, 128, 256)),
        out_dir=get("output", "dir", "mhd_out"),
        write_pencil=get("output", "pencil", False),
        write_field=get("output", "field", True),
    )


def build_profile(config: RunConfig):
    grid = build_grid(config.n, config.bc)
    b0 = np.asarray(config.b0) if isinstance(config.b0, tuple) else config.b0
    return make_profile(
        config.profile,
        grid,
        g=config.g,
        gamma=config.gamma,
        b0_amplitude=b0,
        orientation=config.orientation,
        p0_at_0=config.p0_at_0,
        closure_c=config.closure_c,
        density_floor=config.density_floor,
    )


def _write_summary(path: Path, summary: dict) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    text = "".join(f"{key}={'none' if value is None else fmt(value)}\n" for key, value in summary.items())
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    return path


def _sweep(config, profile, out: Path | None):
    spectrum = spectrum_over_k(profile, config.case, config.k_list, config.tol, config.workers)
    if out is not None:
        spectrum.to_csv(out / "spectrum.csv")
    return spectrum


def _run_spectrum(config, out, summary):
    profile = build_profile(config)
    profile.to_csv(out / "profile.csv")
    spectrum = _sweep(config, profile, out)
    summary.update(
        Lambda_sq=spectrum.capital_lambda_sq,
        converged=spectrum.converged,
        convergence_gap=spectrum.convergence_gap,
        lambda_k_sq_max=float(spectrum.lambda_sq[-1]),
    )
    try:
        mode = select_dominant(spectrum)
        summary.update(k0=mode.k0, lambda_k0=mode.lam)
    except DominanceError:
        summary.update(k0=None, lambda_k0=None)
    if config.write_pencil:
        assemble(profile, config.case, config.k_list[-1]).to_csv(out)


def _run_lambda(config, out, summary):
    profile = build_profile(config)
    profile.to_csv(out / "profile.csv")
    summary["Lambda_sq"] = capital_lambda(profile, config.case)


def _run_criterion(config, out, summary):
    profile = build_profile(config)
    profile.to_csv(out / "profile.csv")
    report = instability_criterion(profile, config.case)
    summary.update(
        unstable=report.unstable,
        witness_x=report.witness_x,
        margin=report.margin,
        Lambda_sq=capital_lambda(profile, config.case),
    )


def _run_simulate(config, out, summary):
    profile = build_profile(config)
    k = config.sim_k if config.sim_k is not None else config.k_list[0]
    problem = assemble(profile, config.case, k)
    lam2, _ = solve_principal(problem)
    dt = config.dt if config.dt is not None else cfl_dt(problem, config.dt_factor)
    t_end = config.t_end
    if t_end is None:
        t_end = 15.0 / math.sqrt(lam2) if lam2 > 0 else 50.0
    state = simulate(problem, dt, t_end, config.init, config.stride, config.seed)
    state.to_csv(out / "history.csv")
    fit = fit_growth_rate(state, config.window)
    summary.update(
        k=k,
        lambda_k_sq=lam2,
        dt=dt,
        t_end=state.t,
        steps=state.steps,
        lambda_fit=fit.lambda_fit,
        r_squared=fit.r_squared,
        oscillatory=fit.oscillatory,
        relative_error=abs(fit.lambda_fit / math.sqrt(lam2) - 1) if lam2 > 0 else None,
    )


def _run_symmetrizer(config, out, summary):
    profile = build_profile(config)
    rng = np.random.default_rng(config.seed)
    asym, positive = 0.0, True
    first = None
    for _ in range(config.samples):
        i = int(rng.integers(profile.grid.n))
        ctx = PointContext(profile.rho0[i], profile.rho0x[i], profile.b0[i], profile.b0x[i], profile.gamma)
        w = rng.standard_normal(7)
        w[0] = rng.uniform(-0.5, 0.5) * ctx.rho0
        state = State7.from_array(w)
        first = first or (state, ctx)
        for mat in flux_jacobians(state, ctx):
            asym = max(asym, float(np.max(np.abs(mat - mat.T))))
        d = np.diag(symmetrizer(state, ctx))
        positive = positive and bool(np.all(d > 0))
    dump_matrices(out / "matrices.csv", *first)
    eta, c_s = check_norm_equivalence(profile, 0.0)
    ctx = PointContext(1.0, 1.0, 0.0, 0.0, profile.gamma)
    ratios = [lower_order(State7(sigma=s), ctx)[1][1] / s**2 for s in (1e-2, 1e-3, 1e-4)]
    summary.update(
        samples=config.samples,
        max_asymmetry=asym,
        symmetric=asym == 0.0,
        d_positive=positive,
        eta=eta,
        c_s=c_s,
        df_ratio_1e2=ratios[0],
        df_ratio_1e3=ratios[1],
        df_ratio_1e4=ratios[2],
    )


def _run_identities(config, out, summary):
    rows = []
    for n in config.levels:
        a = band_limited_field(n, seed=config.seed)
        b = band_limited_field(n, seed=config.seed + 1)
        rows.append((n, *vector_identity_residual(a, b)))
    write_csv(out / "identities.csv", ["n", "r1", "r2"], rows)
    res = np.array([r[1:] for r in rows])
    ratios = res[:-1] / res[1:]
    summary.update(
        levels=len(rows),
        min_ratio_r1=float(ratios[:, 0].min()) if len(rows) > 1 else None,
        min_ratio_r2=float(ratios[:, 1].min()) if len(rows) > 1 else None,
    )


def _run_escape(config, out, summary):
    lam = config.lam
    if lam is None:
        profile = build_profile(config)
        mode = select_dominant(_sweep(config, profile, out))
        lam = mode.lam
        summary["k0"] = mode.k0
        if config.write_field:
            mode_field(mode, 0.0, config.ny).to_csv(out / "mode_field.csv")
    summary.update(
        delta=config.delta,
        theta=config.theta,
        **{"lambda": lam},
        escape_time=escape_time(config.delta, config.theta, lam),
    )


_RUNNERS = {
    "spectrum": _run_spectrum,
    "lambda": _run_lambda,
    "criterion": _run_criterion,
    "simulate": _run_simulate,
    "symmetrizer-check": _run_symmetrizer,
    "identities": _run_identities,
    "escape-time": _run_escape,
}


def run(config: RunConfig, out_dir=None) -> dict:
    """Execute ``config``, writing CSVs and ``summary.txt`` into the output directory."""
    out = Path(out_dir if out_dir is not None else config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = {"command": config.command}
    if config.case is not None:
        summary["case"] = config.case.value
    _RUNNERS[config.command](config, out, summary)
    _write_summary(out / "summary.txt", summary)
    return summary


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mhd-spectra",
        description="Linear stability spectra of stratified MHD steady states.",
    )
    parser.add_argument("config", help="path to the run configuration")
    parser.add_argument("--out", default=None, help="output directory (overrides output.dir)")
    parser.add_argument("--quiet", action="store_true", help="do not print the summary")
    args = parser.parse_args(argv)
    try:
        text = Path(args.config).read_text()
        config = parse_config(text)
        summary = run(config, args.out)
    except (ConfigError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except MHDSpectraError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    if not args.quiet:
        for key, value in summary.items():
            print(f"{key}={'none' if value is None else fmt(value)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
