"""Scenario orchestration: tax sweeps, robustness suite, ring comparison.

A sweep runs one simulation per tax rate into an isolated directory
outputs/{name}/{tau}/, each member producing its own CSVs and heatmaps.
Members execute on a bounded worker pool; a member failure is recorded
and the sweep continues. The coordinator then writes the combined
bifurcation table, renders figures, and hashes every file into a single
manifest. Reruns with the same scenario are byte-identical regardless
of the worker count, because no member reads another member's output
and all randomness (none in the deterministic sweep) is seed-keyed.

Radial quantities are taken along the horizontal ray from the domain
center (the profiles are radially symmetric, so one ray is
representative and fixing it keeps outputs deterministic), with
d = x - Lx/2 >= 0 and d_max = Lx/2, the inscribed radius.
"""

from __future__ import annotations

import io
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import exports, figures
from .config import ConfigError, Scenario, UniformTax
from .core import ModelParams, SpatialProfile, ExponentialBaseline, Polycentric, SuburbanFlat, eval_profiles, theta
from .equilibrium import RadialProfiles, fixed_point, radial_steady_profiles, tau_critical
from .indicators import IndicatorSeries, indicator_series, lorenz_gini, trapezoid_weights
from .pde import SimTrace, run as pde_run
from .stochastic import PathBundle, StochasticParams, simulate_paths


def radial_distances(gs) -> np.ndarray:
    """Distances along the horizontal ray from the center to the right edge."""
    x = gs.x_coords()
    half = gs.lx / 2.0
    mask = x >= half - 1e-12 * gs.lx
    return x[mask] - half


def center_row(gs) -> int:
    """Index of the grid row closest to the domain centerline."""
    return int(round((gs.ny - 1) / 2.0))


@dataclass(frozen=True)
class RingDiscretization:
    """Equally spaced concentric rings over [0, d_max]."""

    n_rings: int = 18
    d_max: float = 5.0

    def __post_init__(self) -> None:
        if self.n_rings < 2:
            raise ValueError("n_rings must be >= 2")
        if self.d_max <= 0:
            raise ValueError("d_max must be > 0")

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(0.0, self.d_max, self.n_rings + 1)

    @property
    def midpoints(self) -> np.ndarray:
        e = self.edges
        return 0.5 * (e[:-1] + e[1:])


@dataclass
class RingComparison:
    """Ring steady states against the fine-grid continuum curve."""

    midpoints: np.ndarray
    ring_v: np.ndarray
    ring_k: np.ndarray
    cont_v: np.ndarray
    cont_k: np.ndarray
    rel_dev_v: np.ndarray
    rel_dev_k: np.ndarray
    max_rel_dev: float
    mean_rel_dev: float
    mismatched: int
    fine_d: np.ndarray
    fine_v: np.ndarray
    fine_k: np.ndarray


def rings_vs_continuum(
    p: ModelParams,
    prof: SpatialProfile,
    rd: RingDiscretization,
    tau_of_d=None,
    fine_d: np.ndarray | None = None,
) -> RingComparison:
    """Closed-form steady states at ring midpoints vs the continuum curve.

    The continuum oracle is the radial steady-state curve sampled on a
    fine grid (10x the ring count by default) and linearly interpolated
    at the midpoints. The default sample count keeps the midpoints off
    the fine abscissae, so the deviation genuinely measures how well the
    discretization tracks the curve rather than collapsing to nodal
    equality. Relative deviations are taken where both sides carry an
    interior equilibrium; midpoints where exactly one side is at the
    boundary state are counted as mismatched.
    """
    if fine_d is None:
        fine_d = np.linspace(0.0, rd.d_max, 10 * rd.n_rings)
    fine = radial_steady_profiles(p, prof, fine_d, tau_of_d=tau_of_d)
    mids = rd.midpoints
    ring = radial_steady_profiles(p, prof, mids, tau_of_d=tau_of_d)
    if not (fine.v_star > 0).any() and not (ring.v_star > 0).any():
        raise ValueError("no interior equilibrium anywhere on [0, d_max]; nothing to compare")
    cont_v = np.interp(mids, fine.distances, fine.v_star)
    cont_k = np.interp(mids, fine.distances, fine.k_star)

    tiny = 1e-12
    ring_live = (ring.v_star > tiny) | (ring.k_star > tiny)
    cont_live = (cont_v > tiny) | (cont_k > tiny)
    both = ring_live & cont_live
    mismatched = int((ring_live ^ cont_live).sum())

    rel_dev_v = np.full_like(mids, np.nan)
    rel_dev_k = np.full_like(mids, np.nan)
    rel_dev_v[both] = np.abs(ring.v_star[both] - cont_v[both]) / np.abs(cont_v[both])
    rel_dev_k[both] = np.abs(ring.k_star[both] - cont_k[both]) / np.abs(cont_k[both])
    devs = np.concatenate([rel_dev_v[both], rel_dev_k[both]])
    max_dev = float(devs.max()) if devs.size else float("nan")
    mean_dev = float(devs.mean()) if devs.size else float("nan")
    return RingComparison(
        midpoints=mids,
        ring_v=ring.v_star,
        ring_k=ring.k_star,
        cont_v=cont_v,
        cont_k=cont_k,
        rel_dev_v=rel_dev_v,
        rel_dev_k=rel_dev_k,
        max_rel_dev=max_dev,
        mean_rel_dev=mean_dev,
        mismatched=mismatched,
        fine_d=fine.distances,
        fine_v=fine.v_star,
        fine_k=fine.k_star,
    )


def bifurcation_scan(p: ModelParams, prof: SpatialProfile, d: float, taus) -> list[tuple]:
    """Fixed-point rows (tau, mu, A, EquilibriumPoint) at one location."""
    a = float(prof.productivity(p, d))
    mu = float(prof.centrality(p, d))
    th = theta(p)
    rows = []
    for tau in taus:
        alpha = p.r + float(tau) - mu
        rows.append((float(tau), mu, a, fixed_point(a, alpha, th, p.c_b, p.beta, p.i_0)))
    return rows


@dataclass
class TauRunResult:
    """Products of one sweep member."""

    tau: float
    directory: str
    radial: RadialProfiles
    trace: SimTrace | None = None
    indicators: IndicatorSeries | None = None
    lorenz_points: np.ndarray | None = None
    gini: float | None = None
    excluded_points: int = 0


@dataclass
class ScenarioResult:
    root: str
    members: dict[float, TauRunResult]
    failures: list[tuple[str, str]]
    manifest_path: str | None = None

    @property
    def ok(self) -> bool:
        return not self.failures


def _ensure_out_root(directory: str, name: str) -> str:
    root = os.path.join(directory, name)
    try:
        os.makedirs(root, exist_ok=True)
    except OSError as e:
        raise ConfigError(f"cannot create output directory {root!r}: {e}") from None
    if not os.access(root, os.W_OK):
        raise ConfigError(f"output directory {root!r} is not writable")
    return root


def _member_products(sc: Scenario, tau: float, tau_dir: str) -> TauRunResult:
    """Run one sweep member and write its per-directory files."""
    gs = sc.grid
    p_tau = replace(sc.params, tau=float(tau))
    mode = sc.tax_mode.with_tau0(float(tau))
    uniform = isinstance(mode, UniformTax)
    tau_of_d = None if uniform else mode.tau_at
    tau_grid = mode.tau_grid(gs)

    a_grid, mu_grid = eval_profiles(gs, p_tau, sc.profile)
    ray = radial_distances(gs)
    rp = radial_steady_profiles(p_tau, sc.profile, ray, tau_of_d=tau_of_d)
    exports.radial_csv(os.path.join(tau_dir, "radial.csv"), rp)
    out = TauRunResult(tau=float(tau), directory=tau_dir, radial=rp)

    tau_local = p_tau.tau if tau_grid is None else tau_grid
    alpha = p_tau.r + tau_local - mu_grid
    defined = alpha > 0
    psi = np.where(defined, a_grid / np.where(defined, alpha, 1.0), np.nan)
    w = trapezoid_weights(gs) * sc.weights.grid("p_density", gs)
    pts, gini = lorenz_gini(psi[defined], w[defined])
    out.lorenz_points = pts
    out.gini = gini
    out.excluded_points = int((~defined).sum())
    exports.lorenz_csv(os.path.join(tau_dir, "lorenz.csv"), pts, gini)

    if sc.outputs.equilibrium_only:
        return out

    trace = pde_run(gs, p_tau, sc.profile, sc.sim, tau_field=tau_grid)
    out.trace = trace
    exports.trace_csv(os.path.join(tau_dir, "trace.csv"), trace)

    if trace.snapshots is not None:
        first, last = trace.snapshots[0], trace.snapshots[-1]
        if sc.outputs.write_snapshots:
            exports.snapshot_csv(os.path.join(tau_dir, "snapshot_final.csv"), gs, last)
        if sc.outputs.write_heatmaps:
            for state in (first, last):
                for name, fld in (("V", state.v), ("K", state.k)):
                    fname = exports.heatmap_name(name, tau, state.t)
                    exports.pgm_heatmap(os.path.join(tau_dir, fname), fld)
        horizon = sc.outputs.indicator_horizon
        if horizon is None:
            horizon = float(trace.times[-1] - trace.times[0])
        ser = indicator_series(tau_local, trace, gs, p_tau, a_grid, sc.weights, horizon)
        out.indicators = ser
        exports.indicators_csv(os.path.join(tau_dir, "indicators.csv"), ser)
    return out


_warmup_lock = threading.Lock()
_warmed_up = False


def _warmup_figures() -> None:
    """Build the font cache once before any worker thread renders."""
    global _warmed_up
    with _warmup_lock:
        if _warmed_up:
            return
        from matplotlib.backends.backend_agg import FigureCanvasAgg
        from matplotlib.figure import Figure

        fig = Figure(figsize=(1, 1))
        FigureCanvasAgg(fig)
        ax = fig.subplots()
        ax.text(0.5, 0.5, "0")
        fig.savefig(io.BytesIO(), format="png")
        _warmed_up = True


def run_scenario(sc: Scenario, threads: int = 1) -> ScenarioResult:
    """Run the sweep, write per-member and combined products, hash the manifest."""
    root = _ensure_out_root(sc.outputs.directory, sc.name)
    if sc.outputs.write_figures:
        _warmup_figures()

    order = list(dict.fromkeys(sc.tau_values))  # de-dup, keep order

    def job(tau: float) -> TauRunResult:
        tau_dir = os.path.join(root, f"{tau:g}")
        os.makedirs(tau_dir, exist_ok=True)
        return _member_products(sc, tau, tau_dir)

    members: dict[float, TauRunResult] = {}
    failures: list[tuple[str, str]] = []
    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        futures = {tau: pool.submit(job, tau) for tau in order}
    for tau in order:
        try:
            members[tau] = futures[tau].result()
        except Exception as e:  # isolate member failures, keep the sweep
            failures.append((f"tau={tau:g}", f"{type(e).__name__}: {e}"))

    # combined closed-form scan at the center: existence flips at tau_c(0)
    mu0 = float(sc.profile.centrality(sc.params, 0.0))
    tc0 = float(tau_critical(sc.params, mu0))
    scan_taus = sorted(set(order) | set(np.linspace(0.0, 1.5 * tc0, 61).tolist()))
    exports.scan_csv(os.path.join(root, "scan.csv"), bifurcation_scan(sc.params, sc.profile, 0.0, scan_taus))

    traced = [tau for tau in order if tau in members and members[tau].trace is not None]
    if traced:
        rows = [(tau, members[tau].trace.mean_v[-1], members[tau].trace.mean_k[-1]) for tau in traced]
        exports.write_csv(os.path.join(root, "bifurcation.csv"), ["tau", "mean_V", "mean_K"], rows)

    if sc.outputs.write_figures:
        if traced:
            figures.fig_traces({tau: members[tau].trace for tau in traced}, os.path.join(root, "traces.png"))
            figures.fig_bifurcation(
                [r[0] for r in rows], [r[1] for r in rows], [r[2] for r in rows], os.path.join(root, "bifurcation.png")
            )
        for tau in order:
            m = members.get(tau)
            if m is None:
                continue
            figures.fig_radial(m.radial, os.path.join(m.directory, "radial.png"), label=f"tau={tau:g}")
            if m.lorenz_points is not None:
                figures.fig_lorenz(m.lorenz_points, m.gini, os.path.join(m.directory, "lorenz.png"))
            if m.trace is not None and m.trace.snapshots is not None:
                figures.fig_fields(sc.grid, m.trace.snapshots[-1], os.path.join(m.directory, "fields.png"), label=f"tau={tau:g} final")

    manifest = exports.write_manifest(root, failures)
    return ScenarioResult(root=root, members=members, failures=failures, manifest_path=manifest)


ROBUSTNESS_PROFILES: tuple[SpatialProfile, ...] = (ExponentialBaseline(), Polycentric(), SuburbanFlat())
ROBUSTNESS_EXTRA_TAUS = (0.12, 0.16, 0.22)


@dataclass
class RobustnessRow:
    profile: str
    tau_mid: float
    d_threshold: float | None
    crossed: bool


@dataclass
class RobustnessReport:
    rows: list[RobustnessRow]
    root: str
    manifest_path: str | None = None

    @property
    def all_passed(self) -> bool:
        return all(r.crossed for r in self.rows)


def mid_sweep_tau(tau_values, tau_c: np.ndarray) -> float:
    """Representative rate inside the critical band (min tau_c, max tau_c).

    Prefers the median of the swept values that fall strictly inside the
    band; when no swept value does, falls back to the band midpoint so
    the crossing check always probes an admissible rate.
    """
    lo, hi = float(tau_c.min()), float(tau_c.max())
    inside = sorted(t for t in tau_values if lo < t < hi)
    if inside:
        return float(np.median(inside))
    return 0.5 * (lo + hi)


def robustness_suite(sc: Scenario, threads: int = 1) -> RobustnessReport:
    """Criticality computation across the three spatial geometries.

    For each profile the margin curve tau - tau_c(d) at the mid-sweep
    rate must cross zero at an interior distance; the crossing check is
    reported per profile, never fatal. Per-profile radial CSVs are
    written for every swept rate (the scenario sweep plus the quoted
    super-critical rates), and a summary table plus margin figure
    complete the bundle.
    """
    root = _ensure_out_root(sc.outputs.directory, f"{sc.name}-robustness")
    gs = sc.grid
    d = np.linspace(0.0, gs.lx / 2.0, 201)
    taus = sorted(set(sc.tau_values) | set(ROBUSTNESS_EXTRA_TAUS))

    def job(prof: SpatialProfile) -> tuple[RobustnessRow, tuple[np.ndarray, np.ndarray]]:
        mu = np.asarray(prof.centrality(sc.params, d), dtype=float)
        tc = np.asarray(tau_critical(sc.params, mu), dtype=float)
        t_mid = mid_sweep_tau(taus, tc)
        for tau in taus:
            p_tau = replace(sc.params, tau=float(tau))
            rp = radial_steady_profiles(p_tau, prof, d)
            exports.radial_csv(os.path.join(root, f"robustness_{prof.kind}_tau{tau:g}.csv"), rp)
        p_mid = replace(sc.params, tau=t_mid)
        rp_mid = radial_steady_profiles(p_mid, prof, d)
        exports.radial_csv(os.path.join(root, f"robustness_{prof.kind}_mid.csv"), rp_mid)
        thr = rp_mid.d_threshold
        crossed = thr is not None and 0.0 < thr < gs.lx / 2.0
        return RobustnessRow(prof.kind, t_mid, thr, crossed), (d, rp_mid.margin)

    rows: list[RobustnessRow] = []
    curves: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    with ThreadPoolExecutor(max_workers=max(1, int(threads))) as pool:
        futures = [(prof.kind, pool.submit(job, prof)) for prof in ROBUSTNESS_PROFILES]
    for kind, fut in futures:
        row, curve = fut.result()
        rows.append(row)
        curves[kind] = curve

    exports.write_csv(
        os.path.join(root, "robustness_summary.csv"),
        ["profile", "tau_mid", "d_threshold", "crossed"],
        [(r.profile, r.tau_mid, r.d_threshold, r.crossed) for r in rows],
    )
    if sc.outputs.write_figures:
        _warmup_figures()
        figures.fig_criticality(curves, os.path.join(root, "criticality.png"))
    manifest = exports.write_manifest(root)
    return RobustnessReport(rows=rows, root=root, manifest_path=manifest)


def run_rings(sc: Scenario, n_rings: int = 18, tau: float | None = None) -> tuple[RingComparison, str]:
    """Ring-vs-continuum comparison bundle; returns (comparison, out root).

    tau defaults to the scenario's base rate; it must place at least part
    of the domain above the existence threshold.
    """
    root = _ensure_out_root(sc.outputs.directory, f"{sc.name}-rings")
    p = sc.params if tau is None else replace(sc.params, tau=float(tau))
    rd = RingDiscretization(n_rings=n_rings, d_max=sc.grid.lx / 2.0)
    cmp = rings_vs_continuum(p, sc.profile, rd)
    exports.rings_csv(
        os.path.join(root, "rings.csv"),
        cmp.midpoints, cmp.ring_v, cmp.ring_k, cmp.cont_v, cmp.cont_k, cmp.rel_dev_v, cmp.rel_dev_k,
    )
    if sc.outputs.write_figures:
        _warmup_figures()
        figures.fig_rings(cmp.fine_d, cmp.fine_v, cmp.fine_k, cmp.midpoints, cmp.ring_v, cmp.ring_k, os.path.join(root, "rings.png"))
    exports.write_manifest(root)
    return cmp, root


def run_stochastic(sc: Scenario, d: float = 4.0, threads: int = 1) -> tuple[PathBundle, str]:
    """Monte Carlo bundle at distance d; writes summary, paths, figure."""
    root = _ensure_out_root(sc.outputs.directory, f"{sc.name}-stochastic")
    sp = sc.stochastic if sc.stochastic is not None else StochasticParams()
    bundle = simulate_paths(sp, sc.params, d, sc.profile, workers=max(1, int(threads)))
    exports.summary_csv(os.path.join(root, "summary.csv"), bundle)
    if sc.outputs.write_paths:
        exports.paths_csv(os.path.join(root, "paths.csv"), bundle, thin=sc.outputs.path_thin)
    if sc.outputs.write_figures:
        _warmup_figures()
        figures.fig_paths(bundle, os.path.join(root, "paths.png"))
    exports.write_manifest(root)
    return bundle, root
