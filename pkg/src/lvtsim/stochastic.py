"""Euler-Maruyama Monte Carlo for the pointwise stochastic extension.

At a fixed location the productivity and centrality drivers follow
mean-reverting diffusions with multiplicative noise, and the local
(V, K) pair inherits the deterministic drift plus its own shocks:

    dA  = kappa_A (A_bar - A) dt + sigma_A A dW_A
    dmu = kappa_mu (mu_bar - mu) dt + sigma_mu mu dW_mu
    dV  = [-(r + tau - mu) V + A K^beta] dt + sigma_V V dW_V
    dK  = [I_0 (A K^beta / (V + c_b) - kappa) K - delta K] dt + sigma_K K dW_K

The scheme is explicit Euler-Maruyama (strong order 1/2), with a small
reflective floor keeping every component positive. Each path owns a
counter-based generator stream keyed by (seed, path index), so the
ensemble is bit-reproducible regardless of execution order or thread
count, and path chunks can run concurrently.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .core import ModelParams, SpatialProfile, alpha_field, theta
from .equilibrium import fixed_point


@dataclass(frozen=True)
class StochasticParams:
    kappa_a: float = 0.5
    kappa_mu: float = 0.5
    sigma_a: float = 0.1
    sigma_mu: float = 0.1
    sigma_v: float = 0.05
    sigma_k: float = 0.05
    a_bar: float | None = None  # None: take from the profile at d
    mu_bar: float | None = None
    floor: float = 1e-6
    dt: float = 1.0 / 12.0
    horizon: float = 30.0
    n_paths: int = 1000
    seed: int = 0
    corr_a_mu: float = 0.0

    def __post_init__(self) -> None:
        for name in ("kappa_a", "kappa_mu", "sigma_a", "sigma_mu", "sigma_v", "sigma_k"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.floor <= 0:
            raise ValueError("floor must be > 0")
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        if self.horizon < self.dt:
            raise ValueError("horizon must be >= dt")
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")
        if not -1.0 <= self.corr_a_mu <= 1.0:
            raise ValueError("corr_a_mu must lie in [-1, 1]")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.horizon / self.dt)))


class PathError(RuntimeError):
    """Non-finite state encountered while integrating a path."""


@dataclass
class PathBundle:
    """Ensemble of trajectories on a shared time grid.

    paths has shape (n_paths, n_times, 4) with components ordered
    (A, mu, V, K); the summary arrays are per-time ensemble statistics
    of V and K (mean, sample variance, 5 and 95 percent quantiles).
    """

    times: np.ndarray
    paths: np.ndarray
    mean_v: np.ndarray
    var_v: np.ndarray
    q05_v: np.ndarray
    q95_v: np.ndarray
    mean_k: np.ndarray
    var_k: np.ndarray
    q05_k: np.ndarray
    q95_k: np.ndarray

    COMPONENTS = ("A", "mu", "V", "K")


def em_step(state, sp: StochasticParams, p: ModelParams, normals):
    """One Euler-Maruyama update of (A, mu, V, K); reflects at the floor.

    state is a 4-tuple of floats or of equal-length arrays (vectorized
    across paths); normals holds the 4 standard draws with matching
    shape in the trailing axis.
    """
    a, mu, v, k = (np.asarray(c, dtype=float) for c in state)
    normals = np.asarray(normals, dtype=float)
    xi_a = normals[..., 0]
    xi_mu = normals[..., 1]
    xi_v = normals[..., 2]
    xi_k = normals[..., 3]
    if sp.corr_a_mu != 0.0:
        xi_mu = sp.corr_a_mu * xi_a + np.sqrt(1.0 - sp.corr_a_mu**2) * xi_mu
    dt = sp.dt
    sq = np.sqrt(dt)
    a_bar = sp.a_bar
    mu_bar = sp.mu_bar
    if a_bar is None or mu_bar is None:
        raise ValueError("a_bar and mu_bar must be set (simulate_paths fills them from the profile)")

    k_beta = np.power(k, p.beta)
    alpha_t = p.r + p.tau - mu
    a_new = a + sp.kappa_a * (a_bar - a) * dt + sp.sigma_a * a * sq * xi_a
    mu_new = mu + sp.kappa_mu * (mu_bar - mu) * dt + sp.sigma_mu * mu * sq * xi_mu
    v_new = v + (-alpha_t * v + a * k_beta) * dt + sp.sigma_v * v * sq * xi_v
    k_new = k + (p.i_0 * (a * k_beta / (v + p.c_b) - p.kappa) * k - p.delta * k) * dt + sp.sigma_k * k * sq * xi_k
    out = tuple(np.maximum(c, sp.floor) for c in (a_new, mu_new, v_new, k_new))
    for c in out:
        if not np.isfinite(c).all():
            raise PathError("non-finite state component after update")
    return out


def path_normals(seed: int, path_index: int, n_steps: int) -> np.ndarray:
    """The (n_steps, 4) standard draws owned by one path's keyed stream."""
    gen = np.random.Generator(np.random.Philox(key=np.random.SeedSequence([seed, path_index]).generate_state(2, np.uint64)))
    return gen.standard_normal((n_steps, 4))


def initial_point(p: ModelParams, a_bar: float, mu_bar: float) -> tuple[float, float]:
    """(V0, K0): the local fixed point when it exists, else (0.1, 0.1)."""
    alpha = float(alpha_field(p, mu_bar))
    ep = fixed_point(a_bar, alpha, theta(p), p.c_b, p.beta, p.i_0)
    if ep.exists:
        return ep.v_star, ep.k_star
    return 0.1, 0.1


def _integrate_chunk(sp: StochasticParams, p: ModelParams, start: int, stop: int, v0: float, k0: float) -> np.ndarray:
    n = stop - start
    n_steps = sp.n_steps
    normals = np.empty((n, n_steps, 4))
    for i in range(n):
        normals[i] = path_normals(sp.seed, start + i, n_steps)
    out = np.empty((n, n_steps + 1, 4))
    state = (
        np.full(n, float(sp.a_bar)),
        np.full(n, float(sp.mu_bar)),
        np.full(n, v0),
        np.full(n, k0),
    )
    out[:, 0, :] = np.column_stack(state)
    for step_idx in range(n_steps):
        try:
            state = em_step(state, sp, p, normals[:, step_idx, :])
        except PathError as e:
            raise PathError(f"paths [{start}, {stop}), step {step_idx + 1}: {e}") from None
        out[:, step_idx + 1, :] = np.column_stack(state)
    return out


def simulate_paths(
    sp: StochasticParams,
    p: ModelParams,
    d: float,
    prof: SpatialProfile,
    workers: int = 1,
) -> PathBundle:
    """Monte Carlo ensemble at radial distance d.

    Long-run means come from the profile at d unless already fixed on
    sp. Paths are chunked across workers; chunk boundaries cannot change
    the result because every path draws from its own keyed stream and
    the reduction is an ordered concatenation.
    """
    a_bar = float(prof.productivity(p, d)) if sp.a_bar is None else sp.a_bar
    mu_bar = float(prof.centrality(p, d)) if sp.mu_bar is None else sp.mu_bar
    sp = replace(sp, a_bar=a_bar, mu_bar=mu_bar)
    v0, k0 = initial_point(p, a_bar, mu_bar)

    n_paths = sp.n_paths
    workers = max(1, min(workers, n_paths))
    bounds = np.linspace(0, n_paths, workers + 1).astype(int)
    chunks: list[np.ndarray]
    if workers == 1:
        chunks = [_integrate_chunk(sp, p, 0, n_paths, v0, k0)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_integrate_chunk, sp, p, int(lo), int(hi), v0, k0) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
            chunks = [f.result() for f in futures]
    paths = np.concatenate(chunks, axis=0)
    times = np.arange(sp.n_steps + 1) * sp.dt

    v = paths[:, :, 2]
    k = paths[:, :, 3]
    ddof = 1 if n_paths > 1 else 0
    return PathBundle(
        times=times,
        paths=paths,
        mean_v=v.mean(axis=0),
        var_v=v.var(axis=0, ddof=ddof),
        q05_v=np.quantile(v, 0.05, axis=0),
        q95_v=np.quantile(v, 0.95, axis=0),
        mean_k=k.mean(axis=0),
        var_k=k.var(axis=0, ddof=ddof),
        q05_k=np.quantile(k, 0.05, axis=0),
        q95_k=np.quantile(k, 0.95, axis=0),
    )


def strong_order_probe(
    sigma: float = 0.2,
    drift: float = 0.0,
    dt_levels: tuple[float, ...] = (2.0**-4, 2.0**-5, 2.0**-6, 2.0**-7, 2.0**-8),
    n_paths: int = 2000,
    horizon: float = 1.0,
    x0: float = 1.0,
    seed: int = 0,
) -> tuple[float, np.ndarray]:
    """Empirical strong order of Euler-Maruyama on geometric paths.

    dX = drift X dt + sigma X dW has the exact solution
    X_T = x0 exp((drift - sigma^2 / 2) T + sigma W_T). All step sizes
    share the Brownian increments aggregated from the finest level, and
    the strong error E|X_T^EM - X_T| is regressed against dt in log2
    space. Returns (slope, per-level mean errors). With sigma = 0 the
    same regression measures the order-1 drift error against exp(drift T).
    """
    dts = np.asarray(sorted(dt_levels, reverse=True), dtype=float)
    dt_fine = dts[-1]
    steps_fine = int(round(horizon / dt_fine))
    for dt in dts:
        ratio = dt / dt_fine
        if abs(ratio - round(ratio)) > 1e-12:
            raise ValueError("every dt level must be an integer multiple of the finest")
    errors = np.zeros(len(dts))
    for i in range(n_paths):
        gen = np.random.Generator(np.random.Philox(key=np.random.SeedSequence([seed, i]).generate_state(2, np.uint64)))
        dw = gen.standard_normal(steps_fine) * np.sqrt(dt_fine)
        exact = x0 * np.exp((drift - 0.5 * sigma**2) * horizon + sigma * dw.sum())
        if sigma == 0.0:
            exact = x0 * np.exp(drift * horizon)
        for lvl, dt in enumerate(dts):
            m = int(round(dt / dt_fine))
            inc = dw.reshape(-1, m).sum(axis=1)
            x = x0
            for w in inc:
                x = x + drift * x * dt + sigma * x * w
            errors[lvl] += abs(x - exact)
    errors /= n_paths
    slope = float(np.polyfit(np.log2(dts), np.log2(errors), 1)[0])
    return slope, errors
