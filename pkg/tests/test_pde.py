"""Finite-difference stencil, stability guard, stepping, and conservation."""

import numpy as np
import pytest
from dataclasses import replace

from lvtsim import (
    CustomInitial,
    FieldPair,
    GaussianPeak,
    GridSpec,
    ModelParams,
    ExponentialBaseline,
    SimConfig,
    StabilityError,
    UniformConstant,
    check_stability,
    eval_profiles,
    initial_state,
    integrate,
    laplacian,
    run,
    stability_limit,
    step,
)

# reaction-free parameter set: alpha = r + tau - mu vanishes identically
# under a flat centrality field, so only diffusion moves V
PURE_DIFFUSION = ModelParams(r=0.05, tau=0.0, mu_0=0.05, gamma=0.0, lam=0.0)


def test_laplacian_exact_on_quadratic_interior():
    gs = GridSpec(lx=2.0, ly=3.0, nx=21, ny=31)
    x = gs.x_coords()[:, None]
    y = gs.y_coords()[None, :]
    fld = x**2 + 2.0 * y**2
    lap = laplacian(gs, fld)
    # central differences are exact for quadratics away from the edges
    assert np.max(np.abs(lap[1:-1, 1:-1] - 6.0)) < 1e-10


def test_laplacian_mirror_ghosts():
    gs = GridSpec(lx=1.0, ly=1.0, nx=5, ny=5)
    fld = np.zeros((5, 5))
    fld[0, 2] = 1.0
    lap = laplacian(gs, fld)
    # edge row: mirrored ghost doubles the inward neighbor
    expected = (2.0 * fld[1, 2] - 2.0 * fld[0, 2]) / gs.dx**2 + (
        fld[0, 3] - 2.0 * fld[0, 2] + fld[0, 1]
    ) / gs.dy**2
    assert abs(lap[0, 2] - expected) < 1e-12
    # constant fields are in the kernel
    assert np.max(np.abs(laplacian(gs, np.full((5, 5), 3.7)))) == 0.0
    with pytest.raises(ValueError):
        laplacian(gs, np.zeros((4, 5)))


def test_laplacian_second_order_convergence():
    # max-norm error on an eigenfunction of the Neumann operator drops
    # by ~4x per grid halving; measured on interior points only
    errs = []
    for n in (21, 41):
        gs = GridSpec(lx=1.0, ly=1.0, nx=n, ny=n)
        x = gs.x_coords()[:, None]
        y = gs.y_coords()[None, :]
        fld = np.cos(np.pi * x) * np.cos(np.pi * y)
        exact = -2.0 * np.pi**2 * fld
        err = np.abs(laplacian(gs, fld) - exact)[1:-1, 1:-1]
        errs.append(err.max())
    ratio = errs[0] / errs[1]
    assert 3.6 < ratio < 4.4


def test_initial_states():
    gs = GridSpec(nx=11, ny=11)
    st = initial_state(gs, GaussianPeak(amplitude=2.0, width=1.5, k0=0.2))
    assert st.v.max() == 2.0  # peak sits on the center point of an odd grid
    assert np.allclose(st.k, 0.2)
    st = initial_state(gs, UniformConstant(v0=0.7, k0=0.0))
    assert np.allclose(st.v, 0.7) and np.allclose(st.k, 0.0)
    st = initial_state(gs, CustomInitial(v0=np.ones((11, 11)), k0=np.zeros((11, 11))))
    assert st.t == 0.0
    with pytest.raises(ValueError):
        initial_state(gs, GaussianPeak(width=0.0))
    with pytest.raises(ValueError):
        initial_state(gs, UniformConstant(v0=-1.0))
    with pytest.raises(TypeError):
        initial_state(gs, object())


def test_stability_guard():
    gs = GridSpec()
    p = ModelParams()
    st = initial_state(gs, GaussianPeak())
    a_grid, _ = eval_profiles(gs, p, ExponentialBaseline())
    limit = stability_limit(gs, p, a_grid, st)
    pi_max = a_grid.max() * st.k.max() ** p.beta / p.c_b
    rate = 2.0 * p.d_v * (1.0 / gs.dx**2 + 1.0 / gs.dy**2) + p.r + p.tau + p.i_0 * pi_max
    assert abs(limit - 0.9 / rate) < 1e-15
    check_stability(SimConfig(dt=0.9 * limit, t_final=1.0), gs, p, a_grid, st)
    with pytest.raises(StabilityError):
        check_stability(SimConfig(dt=1.1 * limit, t_final=1.0), gs, p, a_grid, st)
    # a spatially varying tax tightens the guard through its maximum
    assert stability_limit(gs, p, a_grid, st, tau_max=5.0) < limit


def test_step_matches_hand_euler():
    gs = GridSpec(lx=1.0, ly=1.0, nx=5, ny=5)
    p = ModelParams()
    rng = np.random.default_rng(3)
    v = rng.uniform(0.5, 1.5, (5, 5))
    k = rng.uniform(0.05, 0.2, (5, 5))
    a_grid = rng.uniform(0.8, 1.2, (5, 5))
    mu_grid = rng.uniform(0.0, 0.05, (5, 5))
    dt = 1e-3
    st = FieldPair(v=v, k=k, t=0.0)
    new, clamped = step(gs, p, a_grid, mu_grid, st, dt)
    k_beta = np.power(k, p.beta)
    rv = -(p.r + p.tau - mu_grid) * v + p.d_v * laplacian(gs, v) + a_grid * k_beta
    pi = a_grid * k_beta / (v + p.c_b)
    rk = p.i_0 * (pi - p.kappa) * k - p.delta * k
    assert np.allclose(new.v, v + dt * rv, rtol=0, atol=1e-15)
    assert np.allclose(new.k, k + dt * rk, rtol=0, atol=1e-15)
    assert clamped == 0
    assert new.t == dt


def test_step_clamps_negative_values():
    gs = GridSpec(lx=1.0, ly=1.0, nx=5, ny=5)
    # huge decay with no inflow drives V below zero in one large step
    p = ModelParams(r=10.0, tau=0.0, mu_0=0.0, d_v=1e-6)
    v = np.full((5, 5), 1.0)
    k = np.zeros((5, 5))
    st = FieldPair(v=v, k=k)
    new, clamped = step(gs, p, np.ones((5, 5)), np.zeros((5, 5)), st, dt=0.2)
    assert clamped == 25
    assert (new.v == 0.0).all()


def test_step_spatial_tax_field():
    gs = GridSpec(lx=1.0, ly=1.0, nx=5, ny=5)
    p = ModelParams(d_v=1e-9)
    v = np.full((5, 5), 1.0)
    st = FieldPair(v=v, k=np.zeros((5, 5)))
    zeros = np.zeros((5, 5))
    ones = np.ones((5, 5))
    flat, _ = step(gs, p, ones, zeros, st, dt=0.01)
    tau_field = np.full((5, 5), p.tau)
    tau_field[0, 0] = 0.5
    varied, _ = step(gs, p, ones, zeros, st, dt=0.01, tau_field=tau_field)
    # only the heavily taxed cell decays faster
    assert varied.v[0, 0] < flat.v[0, 0]
    mask = np.ones((5, 5), bool)
    mask[0, 0] = False
    assert np.allclose(varied.v[mask], flat.v[mask])


def test_run_recording_and_time_stamps():
    gs = GridSpec(nx=21, ny=21)
    p = ModelParams()
    sc = SimConfig(dt=0.05, t_final=1.0, record_every=4)
    trace = run(gs, p, ExponentialBaseline(), sc)
    # t = 0, every 4th step, and the final step
    assert trace.times[0] == 0.0
    assert abs(trace.times[-1] - 1.0) < 1e-12
    assert np.allclose(np.diff(trace.times), 4 * 0.05)
    assert len(trace.snapshots) == len(trace.times)
    for t, snap in zip(trace.times, trace.snapshots):
        assert snap.t == t
    sc2 = SimConfig(dt=0.05, t_final=1.0, keep_snapshots=False)
    assert run(gs, p, ExponentialBaseline(), sc2).snapshots is None


def test_run_rejects_unstable_dt():
    gs = GridSpec()
    p = ModelParams()
    with pytest.raises(StabilityError):
        run(gs, p, ExponentialBaseline(), SimConfig(dt=0.5, t_final=1.0))


def test_pure_diffusion_conserves_total_value():
    # zero-flux edges preserve the quadrature total of V when the
    # reaction terms cancel and K stays at zero
    gs = GridSpec()
    sc = SimConfig(dt=0.01, t_final=2.0, record_every=50, initial=GaussianPeak(k0=0.0))
    trace = run(gs, PURE_DIFFUSION, ExponentialBaseline(), sc)
    totals = np.array([integrate(s.v, gs) for s in trace.snapshots])
    drift = np.max(np.abs(totals - totals[0])) / totals[0]
    assert drift < 1e-12
    assert np.allclose([s.k.max() for s in trace.snapshots], 0.0)


def test_diffusion_flattens_toward_uniform():
    # small domain so the slowest Neumann mode decays within the horizon
    gs = GridSpec(lx=2.0, ly=2.0, nx=21, ny=21)
    sc = SimConfig(dt=0.01, t_final=20.0, record_every=2000, initial=GaussianPeak(k0=0.0))
    trace = run(gs, PURE_DIFFUSION, ExponentialBaseline(), sc)
    first = trace.snapshots[0].v
    last = trace.snapshots[-1].v
    assert last.std() < 1e-3 * first.std()
    # the uniform limit carries the conserved quadrature mass
    uniform = integrate(first, gs) / (gs.lx * gs.ly)
    assert np.allclose(last, uniform, rtol=1e-5)


def test_trace_validation():
    from lvtsim import SimTrace

    with pytest.raises(ValueError):
        SimTrace(times=np.array([0.0, 1.0]), mean_v=np.array([1.0]), mean_k=np.array([1.0]))
    with pytest.raises(ValueError):
        SimTrace(
            times=np.array([0.0, 0.0]),
            mean_v=np.array([1.0, 1.0]),
            mean_k=np.array([1.0, 1.0]),
        )
