"""Domain types and spatial fields for the land value tax model.

The model lives on a rectangular grid. Two exogenous surfaces shape the
economics: local productivity A(x, y) and a centrality premium mu(x, y),
both declining with distance from the domain center. From the scalar
parameters we derive the effective decay rate alpha = r + tau - mu (how
fast untaxed land value erodes), the profitability threshold
theta = kappa + delta / I_0 (the return needed for net investment), the
instantaneous profitability Pi = A K^beta / (V + c_b), and the
attractiveness ratio Psi = A / alpha used for distributive statistics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """Rectangular domain [0, Lx] x [0, Ly] sampled on Nx x Ny points."""

    lx: float = 10.0
    ly: float = 10.0
    nx: int = 61
    ny: int = 61

    def __post_init__(self) -> None:
        if self.nx < 3 or self.ny < 3:
            raise ValueError("grid needs nx >= 3 and ny >= 3 for central differences")
        if self.lx <= 0 or self.ly <= 0:
            raise ValueError("domain extents must be positive")

    @property
    def dx(self) -> float:
        return self.lx / (self.nx - 1)

    @property
    def dy(self) -> float:
        return self.ly / (self.ny - 1)

    @property
    def center(self) -> tuple[float, float]:
        return (self.lx / 2.0, self.ly / 2.0)

    def x_coords(self) -> np.ndarray:
        return np.arange(self.nx) * self.dx

    def y_coords(self) -> np.ndarray:
        return np.arange(self.ny) * self.dy


@dataclass(frozen=True)
class ModelParams:
    """Scalar constants of the coupled value/capital system.

    r        discount rate
    tau      land value tax rate (ad valorem, per unit time)
    d_v      diffusion coefficient of land value
    beta     output elasticity of built capital, in (0, 1)
    c_b      baseline construction cost entering profitability
    i_0      investment sensitivity to excess profitability
    kappa    profitability threshold for net investment
    delta    capital depreciation rate
    a_0      peak productivity at the center
    mu_0     peak centrality premium at the center
    gamma    spatial decay rate of productivity
    lam      spatial decay rate of the centrality premium
    """

    r: float = 0.05
    tau: float = 0.01
    d_v: float = 0.1
    beta: float = 0.5
    c_b: float = 1.0
    i_0: float = 1.0
    kappa: float = 0.05
    delta: float = 0.05
    a_0: float = 1.0
    mu_0: float = 0.05
    gamma: float = 0.3
    lam: float = 0.3

    def __post_init__(self) -> None:
        if self.r <= 0:
            raise ValueError("r must be > 0")
        if self.d_v <= 0:
            raise ValueError("d_v must be > 0")
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must lie in (0, 1)")
        if self.c_b <= 0:
            raise ValueError("c_b must be > 0")
        if self.i_0 <= 0:
            raise ValueError("i_0 must be > 0")
        if self.kappa <= 0:
            raise ValueError("kappa must be > 0")
        if self.delta <= 0:
            raise ValueError("delta must be > 0")
        if self.tau < 0:
            raise ValueError("tau must be >= 0")
        if self.a_0 <= 0:
            raise ValueError("a_0 must be > 0")


class SpatialProfile:
    """Base for radially symmetric (A, mu) surfaces; d is distance from center."""

    kind: str = "abstract"

    def productivity(self, p: ModelParams, d):
        raise NotImplementedError

    def centrality(self, p: ModelParams, d):
        raise NotImplementedError


@dataclass(frozen=True)
class ExponentialBaseline(SpatialProfile):
    """A = a_0 exp(-gamma d), mu = mu_0 exp(-lam d): a single monocentric peak."""

    kind: str = field(default="exponential", init=False)

    def productivity(self, p: ModelParams, d):
        return p.a_0 * np.exp(-p.gamma * np.asarray(d, dtype=float))

    def centrality(self, p: ModelParams, d):
        return p.mu_0 * np.exp(-p.lam * np.asarray(d, dtype=float))


@dataclass(frozen=True)
class Polycentric(SpatialProfile):
    """Baseline plus a Gaussian secondary employment pole at distance d_peak.

    a_1 defaults to half the central peak when not given. The centrality
    premium is unchanged from the baseline; only productivity is bimodal.
    """

    a_1: float | None = None
    d_peak: float = 5.0
    width: float = 1.0
    kind: str = field(default="polycentric", init=False)

    def __post_init__(self) -> None:
        if self.width <= 0:
            raise ValueError("polycentric width must be > 0")
        if self.a_1 is not None and self.a_1 < 0:
            raise ValueError("secondary peak amplitude must be >= 0")

    def productivity(self, p: ModelParams, d):
        d = np.asarray(d, dtype=float)
        a_1 = 0.5 * p.a_0 if self.a_1 is None else self.a_1
        bump = a_1 * np.exp(-((d - self.d_peak) ** 2) / (2.0 * self.width**2))
        return p.a_0 * np.exp(-p.gamma * d) + bump

    def centrality(self, p: ModelParams, d):
        return p.mu_0 * np.exp(-p.lam * np.asarray(d, dtype=float))


@dataclass(frozen=True)
class SuburbanFlat(SpatialProfile):
    """Nearly flat productivity with sharply decaying centrality.

    A = a_0 (plateau + (1 - plateau) exp(-gamma d)) stays close to a_0
    everywhere; mu = mu_0 exp(-mu_decay_factor lam d) drops fast.
    """

    plateau: float = 0.9
    mu_decay_factor: float = 3.0
    kind: str = field(default="suburban_flat", init=False)

    def __post_init__(self) -> None:
        if not 0.0 < self.plateau < 1.0:
            raise ValueError("plateau must lie in (0, 1)")
        if self.mu_decay_factor <= 0:
            raise ValueError("mu_decay_factor must be > 0")

    def productivity(self, p: ModelParams, d):
        d = np.asarray(d, dtype=float)
        return p.a_0 * (self.plateau + (1.0 - self.plateau) * np.exp(-p.gamma * d))

    def centrality(self, p: ModelParams, d):
        return p.mu_0 * np.exp(-self.mu_decay_factor * p.lam * np.asarray(d, dtype=float))


PROFILE_KINDS = {
    "exponential": ExponentialBaseline,
    "polycentric": Polycentric,
    "suburban_flat": SuburbanFlat,
}


@dataclass(frozen=True)
class FieldPair:
    """Discrete state at one instant: land value V and built capital K."""

    v: np.ndarray
    k: np.ndarray
    t: float = 0.0

    def validate(self, gs: GridSpec) -> None:
        shape = (gs.nx, gs.ny)
        if self.v.shape != shape or self.k.shape != shape:
            raise ValueError(f"field shapes {self.v.shape}, {self.k.shape} do not match grid {shape}")
        if (self.v < 0).any() or (self.k < 0).any():
            raise ValueError("V and K must be non-negative everywhere")


def radial_distance(gs: GridSpec, i: int, j: int) -> float:
    """Distance of grid point (i, j) from the domain center."""
    if not (0 <= i < gs.nx and 0 <= j < gs.ny):
        raise IndexError(f"grid index ({i}, {j}) out of range")
    cx, cy = gs.center
    return float(np.hypot(i * gs.dx - cx, j * gs.dy - cy))


def distance_grid(gs: GridSpec) -> np.ndarray:
    """Radial distance from the center at every grid point, shape (nx, ny)."""
    cx, cy = gs.center
    x = gs.x_coords()[:, None] - cx
    y = gs.y_coords()[None, :] - cy
    return np.hypot(x, y)


def eval_profiles(gs: GridSpec, p: ModelParams, prof: SpatialProfile) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate (A, mu) on the full grid; rejects profiles with A <= 0 anywhere."""
    d = distance_grid(gs)
    a = np.asarray(prof.productivity(p, d), dtype=float)
    mu = np.asarray(prof.centrality(p, d), dtype=float)
    if (a <= 0).any():
        raise ValueError(f"profile {prof.kind!r} produces non-positive productivity on the grid")
    return a, mu


def alpha_field(p: ModelParams, mu) -> np.ndarray:
    """Effective decay rate alpha = r + tau - mu, pointwise.

    May be negative where the centrality premium outweighs discounting plus
    tax; such points are valid for dynamics but undefined for Psi and for
    the closed-form equilibrium (use ``nonpositive_alpha_count`` to flag).
    """
    return p.r + p.tau - np.asarray(mu, dtype=float)


def nonpositive_alpha_count(alpha) -> int:
    """Number of points where alpha <= 0 (undefined for Psi / equilibrium)."""
    return int((np.asarray(alpha) <= 0).sum())


def theta(p: ModelParams) -> float:
    """Profitability threshold theta = kappa + delta / i_0."""
    return p.kappa + p.delta / p.i_0


def profitability(p: ModelParams, a, k, v):
    """Instantaneous profitability Pi = A K^beta / (V + c_b).

    K^beta is 0 at K = 0 for beta in (0, 1), so the zero-capital state is
    well defined.
    """
    return np.asarray(a) * np.power(np.asarray(k, dtype=float), p.beta) / (np.asarray(v) + p.c_b)


def psi_field(p: ModelParams, a, mu) -> np.ndarray:
    """Attractiveness ratio Psi = A / alpha; NaN where alpha <= 0.

    NaN marks the points excluded from downstream Lorenz and Gini
    statistics; callers count them via np.isnan.
    """
    alpha = alpha_field(p, mu)
    defined = alpha > 0
    safe = np.where(defined, alpha, 1.0)
    return np.where(defined, np.asarray(a) / safe, np.nan)
