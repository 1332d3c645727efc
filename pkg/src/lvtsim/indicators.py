"""Fiscal, investment, and distributive aggregates over simulated states.

Spatial integrals realize the continuous double integral with the
trapezoid rule: boundary cells carry weight 1/2 and corners 1/4, so a
uniform field integrates exactly to value times domain area. Time
integrals (discounted revenue, NPV) use the trapezoid rule over the
recorded snapshot times; with time-constant fields they reduce to the
closed-form annuity (1 - exp(-rT)) / r, which the tests use as oracle.

All weight surfaces default to the uninformative choice (ones for
weights and densities, zeros for risk and quality), under which every
adjusted indicator collapses to its plain counterpart.
"""

from __future__ import annotations

from dataclasses import dataclass, fields as dc_fields

import numpy as np

from .core import FieldPair, GridSpec
from .pde import SimTrace


def trapezoid_weights(gs: GridSpec) -> np.ndarray:
    """Quadrature weights, shape (nx, ny): dx dy scaled, halved at edges."""
    wx = np.ones(gs.nx)
    wx[0] = wx[-1] = 0.5
    wy = np.ones(gs.ny)
    wy[0] = wy[-1] = 0.5
    return np.outer(wx, wy) * (gs.dx * gs.dy)


def integrate(field, gs: GridSpec) -> float:
    """Trapezoid-rule double integral of a grid field over the domain."""
    field = np.asarray(field, dtype=float)
    if field.shape != (gs.nx, gs.ny):
        raise ValueError(f"field shape {field.shape} does not match grid ({gs.nx}, {gs.ny})")
    return float((field * trapezoid_weights(gs)).sum())


@dataclass(frozen=True)
class WeightSet:
    """Weight and adjustment surfaces; scalars broadcast to the grid.

    w1..w4 weight revenue, mean value, the K/V ratio, and NPV
    respectively. p_density is the population density, invest_intensity
    the investment presence I(x, y), risk_sigma and quality enter the
    profitability adjustment factor 1 - sigma / (1 + quality), and
    risk_premium shifts the local discount rate.
    """

    w1: object = 1.0
    w2: object = 1.0
    w3: object = 1.0
    w4: object = 1.0
    p_density: object = 1.0
    invest_intensity: object = 1.0
    risk_sigma: object = 0.0
    quality: object = 0.0
    risk_premium: object = 0.0

    def grid(self, name: str, gs: GridSpec) -> np.ndarray:
        value = getattr(self, name)
        arr = np.asarray(value, dtype=float)
        if arr.ndim == 0:
            return np.full((gs.nx, gs.ny), float(arr))
        if arr.shape != (gs.nx, gs.ny):
            raise ValueError(f"{name} shape {arr.shape} does not match grid ({gs.nx}, {gs.ny})")
        return arr

    def validate(self, gs: GridSpec) -> None:
        for f in dc_fields(self):
            if f.name in ("risk_premium",):
                continue
            g = self.grid(f.name, gs)
            if f.name == "risk_sigma":
                if (g >= 1.0 + self.grid("quality", gs)).any():
                    raise ValueError("risk_sigma must stay below 1 + quality pointwise")
                continue
            if (g < 0).any():
                raise ValueError(f"{f.name} must be >= 0 everywhere")
        if integrate(self.grid("w2", gs) * self.grid("p_density", gs), gs) <= 0:
            raise ValueError("w2 * p_density must have positive total mass")
        if integrate(self.grid("w4", gs), gs) <= 0:
            raise ValueError("w4 must have positive total mass")


def tax_revenue(tau, state: FieldPair, gs: GridSpec) -> float:
    """Instantaneous fiscal flow: integral of tau * V (tau scalar or grid)."""
    if np.ndim(tau) == 0:
        return float(tau) * integrate(state.v, gs)
    return integrate(np.asarray(tau, dtype=float) * state.v, gs)


def _series_coverage(times: np.ndarray, t0: float, t1: float) -> None:
    tol = 1e-9 * max(1.0, abs(t1))
    if times[0] > t0 + tol or times[-1] < t1 - tol:
        raise ValueError(f"snapshots cover [{times[0]}, {times[-1]}], need [{t0}, {t1}]")


def _discounted_time_integral(times: np.ndarray, values: np.ndarray, rate: float, t0: float, horizon: float) -> float:
    """Trapezoid integral of exp(-rate (t - t0)) * values(t) over [t0, t0 + T]."""
    _series_coverage(times, t0, t0 + horizon)
    grid = times[(times > t0) & (times < t0 + horizon)]
    grid = np.concatenate([[t0], grid, [t0 + horizon]])
    vals = np.interp(grid, times, values)
    disc = np.exp(-rate * (grid - t0))
    return float(np.trapezoid(disc * vals, grid))


def tax_revenue_dynamic(
    tau,
    trace: SimTrace,
    gs: GridSpec,
    w1,
    r: float,
    horizon: float,
    t0: float | None = None,
) -> float:
    """Discounted revenue integral over [t0, t0 + horizon] from snapshots."""
    if trace.snapshots is None:
        raise ValueError("trace carries no snapshots")
    w1g = np.asarray(w1, dtype=float)
    if w1g.ndim == 0:
        w1g = np.full((gs.nx, gs.ny), float(w1g))
    times = np.asarray(trace.times, dtype=float)
    t0 = float(times[0]) if t0 is None else t0
    tau_g = np.asarray(tau, dtype=float)
    flows = np.array([integrate(tau_g * s.v * w1g, gs) for s in trace.snapshots])
    return _discounted_time_integral(times, flows, r, t0, horizon)


def weighted_mean_value(state: FieldPair, p_density, w2, gs: GridSpec) -> float:
    num = integrate(np.asarray(p_density) * state.v * np.asarray(w2), gs)
    den = integrate(np.asarray(p_density) * np.ones_like(state.v) * np.asarray(w2), gs)
    if den <= 0:
        raise ValueError("zero total weight mass in weighted mean")
    return num / den


def kv_ratio(state: FieldPair, gs: GridSpec) -> float:
    den = integrate(state.v, gs)
    if den == 0:
        raise ValueError("integral of V is zero")
    return integrate(state.k, gs) / den


def kv_ratio_adjusted(state: FieldPair, invest_intensity, w3, gs: GridSpec) -> float:
    iw = np.asarray(invest_intensity) * np.asarray(w3)
    den = integrate(iw * state.v, gs)
    if den == 0:
        raise ValueError("weighted integral of V is zero")
    return integrate(iw * state.k, gs) / den


def adjusted_profitability(state: FieldPair, a_grid, risk_sigma, quality, beta: float) -> tuple[np.ndarray, int]:
    """Risk- and quality-adjusted yield Y_adj; NaN where V = 0.

    Returns the grid and the count of excluded (V = 0) cells.
    """
    v = state.v
    defined = v > 0
    safe_v = np.where(defined, v, 1.0)
    y = np.asarray(a_grid) * np.power(state.k, beta) / safe_v
    factor = 1.0 - np.asarray(risk_sigma) / (1.0 + np.asarray(quality))
    y_adj = np.where(defined, y * factor, np.nan)
    return y_adj, int((~defined).sum())


def adjusted_profitability_mean(
    state: FieldPair,
    a_grid,
    risk_sigma,
    quality,
    beta: float,
    w,
    gs: GridSpec,
) -> float:
    """Weighted spatial mean of Y_adj over the cells where it is defined."""
    y_adj, excluded = adjusted_profitability(state, a_grid, risk_sigma, quality, beta)
    if excluded == y_adj.size:
        raise ValueError("all cells excluded: V = 0 everywhere")
    defined = ~np.isnan(y_adj)
    wg = np.asarray(w, dtype=float)
    if wg.ndim == 0:
        wg = np.full(y_adj.shape, float(wg))
    wg = np.where(defined, wg, 0.0)
    den = integrate(wg, gs)
    if den <= 0:
        raise ValueError("zero total weight over the defined cells")
    return integrate(np.where(defined, y_adj, 0.0) * wg, gs) / den


def npv_local(
    a_grid,
    k_path: np.ndarray,
    v_path: np.ndarray,
    times,
    tau,
    r: float,
    rho,
    horizon: float,
    beta: float,
    t0: float | None = None,
) -> np.ndarray:
    """Pointwise discounted net flow integral over [t0, t0 + horizon].

    k_path and v_path have shape (n_times, nx, ny); rho is the local risk
    premium added to the discount rate.
    """
    times = np.asarray(times, dtype=float)
    k_path = np.asarray(k_path, dtype=float)
    v_path = np.asarray(v_path, dtype=float)
    if k_path.shape != v_path.shape or k_path.shape[0] != len(times):
        raise ValueError("path shapes do not match the time grid")
    t0 = float(times[0]) if t0 is None else t0
    t1 = t0 + horizon
    _series_coverage(times, t0, t1)

    def slice_at(tq: float, path: np.ndarray) -> np.ndarray:
        j = int(np.searchsorted(times, tq))
        if j < len(times) and times[j] == tq:
            return path[j]
        w = (tq - times[j - 1]) / (times[j] - times[j - 1])
        return (1.0 - w) * path[j - 1] + w * path[j]

    inner = np.where((times > t0) & (times < t1))[0]
    tsel = np.concatenate([[t0], times[inner], [t1]])
    k_sel = np.stack([slice_at(t0, k_path), *k_path[inner], slice_at(t1, k_path)])
    v_sel = np.stack([slice_at(t0, v_path), *v_path[inner], slice_at(t1, v_path)])
    rate = r + np.asarray(rho, dtype=float)
    if rate.ndim == 0:
        rate = np.full(k_path.shape[1:], float(rate))
    if (rate <= 0).any():
        raise ValueError("r + rho must be > 0 everywhere")
    flow = np.asarray(a_grid) * np.power(k_sel, beta) - tau * v_sel
    disc = np.exp(-np.multiply.outer(tsel - t0, rate))
    return np.trapezoid(disc * flow, tsel, axis=0)


def npv_mean(npv_grid, w4, gs: GridSpec) -> float:
    w4g = np.asarray(w4, dtype=float)
    if w4g.ndim == 0:
        w4g = np.full((gs.nx, gs.ny), float(w4g))
    den = integrate(w4g, gs)
    if den <= 0:
        raise ValueError("w4 must have positive total mass")
    return integrate(np.asarray(npv_grid) * w4g, gs) / den


def lorenz_gini(values, weights=None) -> tuple[np.ndarray, float]:
    """Weighted Lorenz curve points and Gini index of non-negative values.

    Sorts ascending, accumulates weighted population share against
    weighted value share, and takes Gini = 1 - 2 * area under the curve
    (trapezoid area between the prepended origin and the sorted points).
    """
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise ValueError("empty input")
    if np.isnan(v).any():
        raise ValueError("undefined values in input; filter before calling")
    if (v < 0).any():
        raise ValueError("values must be >= 0")
    w = np.ones_like(v) if weights is None else np.asarray(weights, dtype=float).ravel()
    if w.shape != v.shape:
        raise ValueError("weights must match values")
    if (w < 0).any() or w.sum() <= 0:
        raise ValueError("weights must be >= 0 with positive total")
    order = np.argsort(v, kind="stable")
    v, w = v[order], w[order]
    pop = np.concatenate([[0.0], np.cumsum(w) / w.sum()])
    mass = (w * v).sum()
    if mass == 0:
        share = np.concatenate([[0.0], np.cumsum(w) / w.sum()])  # all-zero values: diagonal
    else:
        share = np.concatenate([[0.0], np.cumsum(w * v) / mass])
    points = np.column_stack([pop, share])
    gini = 1.0 - 2.0 * float(np.trapezoid(share, pop))
    return points, gini


@dataclass
class IndicatorSeries:
    """Time-indexed aggregates evaluated on recorded snapshots.

    The forward-looking entries (discounted revenue, NPV) need future
    coverage [t, t + horizon]; recorded times too close to the end of
    the run carry NaN there.
    """

    times: np.ndarray
    r_tax: np.ndarray
    r_tax_ad: np.ndarray
    v_bar: np.ndarray
    r_kv: np.ndarray
    r_kv_adj: np.ndarray
    y_adj_bar: np.ndarray
    npv_bar: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.times)
        for name in ("r_tax", "r_tax_ad", "v_bar", "r_kv", "r_kv_adj", "y_adj_bar", "npv_bar"):
            if len(getattr(self, name)) != n:
                raise ValueError("indicator sequences must have equal length")
        if n > 1 and not (np.diff(self.times) > 0).all():
            raise ValueError("indicator times must be strictly increasing")


def indicator_series(
    tau,
    trace: SimTrace,
    gs: GridSpec,
    p,
    a_grid: np.ndarray,
    ws: WeightSet,
    horizon: float,
) -> IndicatorSeries:
    """Evaluate every aggregate at each recorded snapshot time."""
    if trace.snapshots is None:
        raise ValueError("trace carries no snapshots")
    ws.validate(gs)
    times = np.asarray(trace.times, dtype=float)
    w1 = ws.grid("w1", gs)
    w2 = ws.grid("w2", gs)
    w3 = ws.grid("w3", gs)
    w4 = ws.grid("w4", gs)
    pd = ws.grid("p_density", gs)
    ii = ws.grid("invest_intensity", gs)
    sg = ws.grid("risk_sigma", gs)
    ql = ws.grid("quality", gs)
    rp = ws.grid("risk_premium", gs)

    k_path = np.stack([s.k for s in trace.snapshots])
    v_path = np.stack([s.v for s in trace.snapshots])

    n = len(times)
    r_tax = np.empty(n)
    r_tax_ad = np.full(n, np.nan)
    v_bar = np.empty(n)
    r_kv = np.empty(n)
    r_kv_adj = np.empty(n)
    y_adj_bar = np.empty(n)
    npv_bar = np.full(n, np.nan)
    for idx, state in enumerate(trace.snapshots):
        r_tax[idx] = tax_revenue(tau, state, gs)
        v_bar[idx] = weighted_mean_value(state, pd, w2, gs)
        r_kv[idx] = kv_ratio(state, gs)
        r_kv_adj[idx] = kv_ratio_adjusted(state, ii, w3, gs)
        y_adj_bar[idx] = adjusted_profitability_mean(state, a_grid, sg, ql, p.beta, w2, gs)
        t0 = times[idx]
        if times[-1] >= t0 + horizon - 1e-9:
            r_tax_ad[idx] = tax_revenue_dynamic(tau, trace, gs, w1, p.r, horizon, t0=t0)
            npv = npv_local(a_grid, k_path, v_path, times, tau, p.r, rp, horizon, p.beta, t0=t0)
            npv_bar[idx] = npv_mean(npv, w4, gs)
    return IndicatorSeries(times, r_tax, r_tax_ad, v_bar, r_kv, r_kv_adj, y_adj_bar, npv_bar)
