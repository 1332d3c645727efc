"""Keyed noise streams, Euler-Maruyama stepping, ensemble reproducibility."""

import numpy as np
import pytest
from dataclasses import replace

from lvtsim import (
    ExponentialBaseline,
    ModelParams,
    StochasticParams,
    em_step,
    initial_point,
    path_normals,
    simulate_paths,
    strong_order_probe,
    theta,
)

P = ModelParams()
PROF = ExponentialBaseline()


def test_params_validation():
    StochasticParams()
    with pytest.raises(ValueError):
        StochasticParams(sigma_a=-0.1)
    with pytest.raises(ValueError):
        StochasticParams(dt=0.0)
    with pytest.raises(ValueError):
        StochasticParams(horizon=0.01, dt=0.1)
    with pytest.raises(ValueError):
        StochasticParams(n_paths=0)
    with pytest.raises(ValueError):
        StochasticParams(corr_a_mu=1.5)
    with pytest.raises(ValueError):
        StochasticParams(floor=0.0)
    assert StochasticParams(dt=1.0 / 12.0, horizon=30.0).n_steps == 360


def test_path_normals_keyed_streams():
    a = path_normals(0, 5, 100)
    b = path_normals(0, 5, 100)
    assert a.shape == (100, 4)
    assert np.array_equal(a, b)
    # different path or seed gives an unrelated stream
    c = path_normals(0, 6, 100)
    d = path_normals(1, 5, 100)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)
    # truncation consistency: the first draws do not depend on n_steps
    e = path_normals(0, 5, 40)
    assert np.array_equal(a[:40], e)


def test_em_step_zero_noise_is_euler():
    sp = StochasticParams(sigma_a=0.0, sigma_mu=0.0, sigma_v=0.0, sigma_k=0.0,
                          a_bar=1.0, mu_bar=0.04, dt=0.01)
    state = (0.8, 0.03, 1.5, 0.2)
    normals = np.ones(4)  # multiplied by zero volatility
    a, mu, v, k = em_step(state, sp, P, normals)
    dt = sp.dt
    assert abs(a - (0.8 + 0.5 * (1.0 - 0.8) * dt)) < 1e-15
    assert abs(mu - (0.03 + 0.5 * (0.04 - 0.03) * dt)) < 1e-15
    alpha = P.r + P.tau - 0.03
    dv = -alpha * 1.5 + 0.8 * np.sqrt(0.2)
    assert abs(v - (1.5 + dv * dt)) < 1e-14
    pi = 0.8 * np.sqrt(0.2) / (1.5 + P.c_b)
    dk = P.i_0 * (pi - P.kappa) * 0.2 - P.delta * 0.2
    assert abs(k - (0.2 + dk * dt)) < 1e-14


def test_em_step_reflects_at_floor():
    sp = StochasticParams(sigma_a=0.0, sigma_mu=0.0, sigma_v=2.0, sigma_k=0.0,
                          a_bar=1.0, mu_bar=0.0, dt=0.25, floor=1e-6)
    state = (1.0, 0.0, 0.01, 0.0)
    normals = np.array([0.0, 0.0, -5.0, 0.0])  # huge downward shock on V
    _, _, v, k = em_step(state, sp, P, normals)
    assert v == sp.floor
    assert k == sp.floor  # zero capital rests on the floor too


def test_em_step_requires_long_run_means():
    sp = StochasticParams()
    with pytest.raises(ValueError):
        em_step((1.0, 0.05, 1.0, 0.1), sp, P, np.zeros(4))


def test_em_step_correlated_shocks():
    sp = StochasticParams(a_bar=1.0, mu_bar=0.05, corr_a_mu=1.0)
    base = replace(sp, corr_a_mu=0.0)
    normals = np.array([1.3, -0.4, 0.0, 0.0])
    # at corr 1 the centrality shock is driven by the productivity draw
    swapped = np.array([1.3, 1.3, 0.0, 0.0])
    got = em_step((1.0, 0.05, 1.0, 0.1), sp, P, normals)
    want = em_step((1.0, 0.05, 1.0, 0.1), base, P, swapped)
    assert np.allclose(got, want)


def test_initial_point_fixed_point_or_seed():
    # subcritical location starts from the conventional (0.1, 0.1)
    assert initial_point(P, 1.0, 0.05) == (0.1, 0.1)
    # supercritical location starts on the interior fixed point
    p = replace(P, tau=0.12)
    v0, k0 = initial_point(p, 1.0, 0.05)
    assert abs(v0 - 5.0) < 1e-12 and abs(k0 - 0.36) < 1e-12


def test_simulate_paths_shapes_and_stats():
    sp = StochasticParams(n_paths=40, horizon=2.0, seed=3)
    b = simulate_paths(sp, P, 4.0, PROF)
    n_t = sp.n_steps + 1
    assert b.paths.shape == (40, n_t, 4)
    assert b.times[0] == 0.0 and abs(b.times[-1] - 2.0) < 1e-12
    # every path starts at the same deterministic point
    assert (b.paths[:, 0, :] == b.paths[0, 0, :]).all()
    assert np.allclose(b.mean_v, b.paths[:, :, 2].mean(axis=0))
    assert np.allclose(b.var_k, b.paths[:, :, 3].var(axis=0, ddof=1))
    assert (b.q05_v <= b.q95_v).all()
    # positivity is preserved by the reflecting floor
    assert (b.paths >= sp.floor - 1e-15).all()


def test_simulate_paths_worker_invariance():
    sp = StochasticParams(n_paths=30, horizon=1.0, seed=11)
    one = simulate_paths(sp, P, 4.0, PROF, workers=1)
    three = simulate_paths(sp, P, 4.0, PROF, workers=3)
    eight = simulate_paths(sp, P, 4.0, PROF, workers=8)
    assert np.array_equal(one.paths, three.paths)
    assert np.array_equal(one.paths, eight.paths)
    # a different seed moves every stochastic path
    other = simulate_paths(replace(sp, seed=12), P, 4.0, PROF)
    assert not np.array_equal(one.paths, other.paths)


def test_simulate_paths_profile_means_vs_override():
    sp = StochasticParams(n_paths=5, horizon=1.0, sigma_a=0.0, sigma_mu=0.0,
                          sigma_v=0.0, sigma_k=0.0)
    b = simulate_paths(sp, P, 4.0, PROF)
    # noise-free drivers hold their long-run means from the profile at d
    assert np.allclose(b.paths[:, :, 0], float(PROF.productivity(P, 4.0)))
    assert np.allclose(b.paths[:, :, 1], float(PROF.centrality(P, 4.0)))
    forced = replace(sp, a_bar=0.7, mu_bar=0.01)
    b2 = simulate_paths(forced, P, 4.0, PROF)
    assert np.allclose(b2.paths[:, :, 0], 0.7)
    assert np.allclose(b2.paths[:, :, 1], 0.01)


def test_strong_order_drift_only_is_first_order():
    slope, errors = strong_order_probe(
        sigma=0.0, drift=0.7, dt_levels=(2.0**-4, 2.0**-5, 2.0**-6, 2.0**-7),
        n_paths=64, seed=2,
    )
    assert (np.diff(errors) < 0).all()  # finer steps shrink the error
    assert 0.85 < slope < 1.15


def test_strong_order_rejects_misaligned_levels():
    with pytest.raises(ValueError):
        strong_order_probe(dt_levels=(0.3, 0.0625), n_paths=2)
