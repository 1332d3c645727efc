"""Explicit finite-difference integration of the coupled V/K system.

Land value diffuses and decays while being fed by capital returns;
built capital accumulates wherever profitability clears the threshold:

    dV/dt = -(r + tau - mu) V + D_V lap(V) + A K^beta
    dK/dt = I_0 (A K^beta / (V + c_b) - kappa) K - delta K

The Laplacian uses second-order central differences with mirror ghost
values (V[-1] = V[1]) realizing zero-flux Neumann edges. Time stepping
is fully explicit Euler: both fields update simultaneously from the old
state and are clamped at zero from below. The admissible step size is
bounded by a CFL-type guard combining the diffusion rate with a linear
estimate of the reaction stiffness.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .core import FieldPair, GridSpec, ModelParams, SpatialProfile, distance_grid, eval_profiles


class NonFiniteStateError(RuntimeError):
    """A field value became NaN or infinite during integration."""


class StabilityError(ValueError):
    """The requested dt violates the explicit-scheme stability guard."""


@dataclass(frozen=True)
class GaussianPeak:
    """Centered Gaussian bump in V over a uniform K floor."""

    amplitude: float = 1.0
    width: float | None = None  # None: lx / 8
    k0: float = 0.1


@dataclass(frozen=True)
class UniformConstant:
    v0: float = 1.0
    k0: float = 0.1


@dataclass(frozen=True)
class CustomInitial:
    v0: np.ndarray = None
    k0: np.ndarray = None


def initial_state(gs: GridSpec, ic) -> FieldPair:
    if isinstance(ic, GaussianPeak):
        width = gs.lx / 8.0 if ic.width is None else ic.width
        if width <= 0 or ic.amplitude < 0 or ic.k0 < 0:
            raise ValueError("GaussianPeak needs width > 0, amplitude >= 0, k0 >= 0")
        d = distance_grid(gs)
        v = ic.amplitude * np.exp(-(d**2) / (2.0 * width**2))
        k = np.full_like(v, ic.k0)
    elif isinstance(ic, UniformConstant):
        if ic.v0 < 0 or ic.k0 < 0:
            raise ValueError("UniformConstant needs v0 >= 0 and k0 >= 0")
        v = np.full((gs.nx, gs.ny), float(ic.v0))
        k = np.full((gs.nx, gs.ny), float(ic.k0))
    elif isinstance(ic, CustomInitial):
        v = np.asarray(ic.v0, dtype=float).copy()
        k = np.asarray(ic.k0, dtype=float).copy()
    else:
        raise TypeError(f"unknown initial condition {ic!r}")
    state = FieldPair(v=v, k=k, t=0.0)
    state.validate(gs)
    return state


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.05
    t_final: float = 50.0
    record_every: int = 10
    initial: object = field(default_factory=GaussianPeak)
    keep_snapshots: bool = True

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        if self.t_final <= 0:
            raise ValueError("t_final must be > 0")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_final / self.dt)))


def stability_limit(gs: GridSpec, p: ModelParams, a_grid: np.ndarray, state: FieldPair, tau_max: float | None = None) -> float:
    """Largest admissible dt for the explicit scheme at this initial state."""
    tau = p.tau if tau_max is None else tau_max
    pi_max = float(a_grid.max()) * float(state.k.max()) ** p.beta / p.c_b
    rate = 2.0 * p.d_v * (1.0 / gs.dx**2 + 1.0 / gs.dy**2) + p.r + tau + p.i_0 * pi_max
    return 0.9 / rate


def check_stability(sc: SimConfig, gs: GridSpec, p: ModelParams, a_grid: np.ndarray, state: FieldPair, tau_max: float | None = None) -> None:
    limit = stability_limit(gs, p, a_grid, state, tau_max)
    if sc.dt > limit:
        raise StabilityError(f"dt = {sc.dt} violates the stability guard; maximal admissible dt = {limit}")


@dataclass
class SimTrace:
    """Recorded history of a run: spatial averages plus optional snapshots."""

    times: np.ndarray
    mean_v: np.ndarray
    mean_k: np.ndarray
    snapshots: list[FieldPair] | None = None
    clamp_events: int = 0

    def __post_init__(self) -> None:
        n = len(self.times)
        if len(self.mean_v) != n or len(self.mean_k) != n:
            raise ValueError("trace sequences must have equal length")
        if n > 1 and not (np.diff(self.times) > 0).all():
            raise ValueError("trace times must be strictly increasing")


def laplacian(gs: GridSpec, fld: np.ndarray) -> np.ndarray:
    """Five-point Laplacian with mirror ghosts: V[-1, j] = V[1, j] etc."""
    if fld.shape != (gs.nx, gs.ny):
        raise ValueError(f"field shape {fld.shape} does not match grid ({gs.nx}, {gs.ny})")
    pad = np.pad(fld, 1, mode="reflect")
    return (pad[2:, 1:-1] - 2.0 * fld + pad[:-2, 1:-1]) / gs.dx**2 + (
        pad[1:-1, 2:] - 2.0 * fld + pad[1:-1, :-2]
    ) / gs.dy**2


def step(
    gs: GridSpec,
    p: ModelParams,
    a_grid: np.ndarray,
    mu_grid: np.ndarray,
    state: FieldPair,
    dt: float,
    tau_field: np.ndarray | None = None,
) -> tuple[FieldPair, int]:
    """One explicit Euler step from the old state; returns (state, clamped cells).

    Both updates read only the pre-step fields. tau_field optionally
    replaces the uniform rate with a spatially varying one.
    """
    tau = p.tau if tau_field is None else tau_field
    k_beta = np.power(state.k, p.beta)
    returns = a_grid * k_beta
    v_new = state.v + dt * (-(p.r + tau - mu_grid) * state.v + p.d_v * laplacian(gs, state.v) + returns)
    pi = returns / (state.v + p.c_b)
    k_new = state.k + dt * (p.i_0 * (pi - p.kappa) * state.k - p.delta * state.k)
    if not (np.isfinite(v_new).all() and np.isfinite(k_new).all()):
        bad = np.argwhere(~(np.isfinite(v_new) & np.isfinite(k_new)))[0]
        raise NonFiniteStateError(f"non-finite value at grid point ({bad[0]}, {bad[1]}), t = {state.t}")
    clamped = int((v_new < 0).sum() + (k_new < 0).sum())
    np.maximum(v_new, 0.0, out=v_new)
    np.maximum(k_new, 0.0, out=k_new)
    return FieldPair(v=v_new, k=k_new, t=state.t + dt), clamped


def run(
    gs: GridSpec,
    p: ModelParams,
    prof: SpatialProfile,
    sc: SimConfig,
    tau_field: np.ndarray | None = None,
) -> SimTrace:
    """Integrate n_steps from the configured initial condition.

    Spatial averages (plain arithmetic means over all grid points) are
    recorded at t = 0, every record_every steps, and at the final step.
    """
    a_grid, mu_grid = eval_profiles(gs, p, prof)
    state = initial_state(gs, sc.initial)
    tau_max = None if tau_field is None else float(np.max(tau_field))
    check_stability(sc, gs, p, a_grid, state, tau_max)

    times = [0.0]
    mean_v = [float(state.v.mean())]
    mean_k = [float(state.k.mean())]
    snaps = [state] if sc.keep_snapshots else None
    clamps = 0
    for n in range(1, sc.n_steps + 1):
        try:
            state, c = step(gs, p, a_grid, mu_grid, state, sc.dt, tau_field)
        except NonFiniteStateError as e:
            raise NonFiniteStateError(f"step {n}: {e}") from None
        clamps += c
        if n % sc.record_every == 0 or n == sc.n_steps:
            state = replace(state, t=n * sc.dt)  # undo additive time drift
            times.append(n * sc.dt)
            mean_v.append(float(state.v.mean()))
            mean_k.append(float(state.k.mean()))
            if snaps is not None:
                snaps.append(state)
    return SimTrace(
        times=np.asarray(times),
        mean_v=np.asarray(mean_v),
        mean_k=np.asarray(mean_k),
        snapshots=snaps,
        clamp_events=clamps,
    )
