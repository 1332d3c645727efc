"""Grid geometry, parameter validation, spatial profiles, derived fields."""

import numpy as np
import pytest

from lvtsim import (
    PROFILE_KINDS,
    ExponentialBaseline,
    FieldPair,
    GridSpec,
    ModelParams,
    Polycentric,
    SuburbanFlat,
    alpha_field,
    distance_grid,
    eval_profiles,
    nonpositive_alpha_count,
    profitability,
    psi_field,
    radial_distance,
    theta,
)


def test_grid_spacing_and_coords():
    gs = GridSpec(lx=10.0, ly=10.0, nx=61, ny=61)
    assert gs.dx == 10.0 / 60.0
    assert gs.dy == 10.0 / 60.0
    x = gs.x_coords()
    y = gs.y_coords()
    assert len(x) == 61 and len(y) == 61
    assert x[0] == 0.0 and abs(x[-1] - 10.0) < 1e-12
    assert gs.center == (5.0, 5.0)


def test_grid_rejects_degenerate_domains():
    with pytest.raises(ValueError):
        GridSpec(nx=2)
    with pytest.raises(ValueError):
        GridSpec(ny=1)
    with pytest.raises(ValueError):
        GridSpec(lx=0.0)
    with pytest.raises(ValueError):
        GridSpec(ly=-1.0)


def test_params_validation():
    ModelParams()  # defaults are admissible
    with pytest.raises(ValueError):
        ModelParams(beta=0.0)
    with pytest.raises(ValueError):
        ModelParams(beta=1.0)
    with pytest.raises(ValueError):
        ModelParams(c_b=0.0)
    with pytest.raises(ValueError):
        ModelParams(i_0=0.0)
    with pytest.raises(ValueError):
        ModelParams(tau=-0.01)
    with pytest.raises(ValueError):
        ModelParams(r=0.0)
    with pytest.raises(ValueError):
        ModelParams(d_v=-0.1)
    with pytest.raises(ValueError):
        ModelParams(kappa=0.0)
    with pytest.raises(ValueError):
        ModelParams(delta=0.0)
    with pytest.raises(ValueError):
        ModelParams(a_0=0.0)


def test_radial_distance_and_grid_agree():
    gs = GridSpec(lx=4.0, ly=6.0, nx=9, ny=7)
    d = distance_grid(gs)
    for i in range(gs.nx):
        for j in range(gs.ny):
            assert abs(d[i, j] - radial_distance(gs, i, j)) < 1e-14
    # the center point of an odd grid sits exactly at distance zero
    assert d[4, 3] == 0.0
    # mirror symmetry about both axes
    assert np.allclose(d, d[::-1, :])
    assert np.allclose(d, d[:, ::-1])
    with pytest.raises(IndexError):
        radial_distance(gs, gs.nx, 0)


def test_exponential_profile_values():
    p = ModelParams()
    prof = ExponentialBaseline()
    d = np.array([0.0, 1.0, 5.0])
    a = prof.productivity(p, d)
    mu = prof.centrality(p, d)
    assert np.allclose(a, p.a_0 * np.exp(-p.gamma * d))
    assert np.allclose(mu, p.mu_0 * np.exp(-p.lam * d))
    assert a[0] == p.a_0 and mu[0] == p.mu_0


def test_polycentric_secondary_peak():
    p = ModelParams()
    prof = Polycentric(d_peak=5.0, width=1.0)
    d = np.linspace(0.0, 8.0, 161)
    a = prof.productivity(p, d)
    base = p.a_0 * np.exp(-p.gamma * d)
    # default bump amplitude is half the central peak, added on top
    assert abs(a[d == 5.0][0] - (base[d == 5.0][0] + 0.5 * p.a_0)) < 1e-12
    # productivity has a local maximum near the secondary pole
    i = int(np.argmin(np.abs(d - 5.0)))
    assert a[i] > a[i - 10] and a[i] > a[i + 10]
    # centrality stays monocentric
    assert np.allclose(prof.centrality(p, d), p.mu_0 * np.exp(-p.lam * d))
    with pytest.raises(ValueError):
        Polycentric(width=0.0)
    with pytest.raises(ValueError):
        Polycentric(a_1=-1.0)


def test_suburban_flat_profile():
    p = ModelParams()
    prof = SuburbanFlat(plateau=0.9, mu_decay_factor=3.0)
    d = np.array([0.0, 10.0, 100.0])
    a = prof.productivity(p, d)
    mu = prof.centrality(p, d)
    assert abs(a[0] - p.a_0) < 1e-12
    # productivity never falls below the plateau floor
    assert (a > 0.9 * p.a_0).all()
    # centrality decays three times as fast as the baseline
    assert abs(mu[1] - p.mu_0 * np.exp(-3.0 * p.lam * 10.0)) < 1e-15
    with pytest.raises(ValueError):
        SuburbanFlat(plateau=1.0)
    with pytest.raises(ValueError):
        SuburbanFlat(mu_decay_factor=0.0)


def test_profile_registry():
    assert PROFILE_KINDS["exponential"] is ExponentialBaseline
    assert PROFILE_KINDS["polycentric"] is Polycentric
    assert PROFILE_KINDS["suburban_flat"] is SuburbanFlat
    for kind, cls in PROFILE_KINDS.items():
        assert cls().kind == kind


def test_eval_profiles_rejects_nonpositive_productivity():
    gs = GridSpec(nx=5, ny=5)
    p = ModelParams()

    class Dead(ExponentialBaseline):
        def productivity(self, p, d):
            return np.zeros_like(np.asarray(d, dtype=float))

    with pytest.raises(ValueError):
        eval_profiles(gs, p, Dead())


def test_alpha_theta_and_count():
    p = ModelParams()
    assert abs(theta(p) - 0.1) < 1e-15  # kappa + delta / i_0
    mu = np.array([0.0, 0.06, 0.2])
    alpha = alpha_field(p, mu)
    assert np.allclose(alpha, p.r + p.tau - mu)
    assert nonpositive_alpha_count(alpha) == 1  # only mu = 0.2 flips the sign
    assert nonpositive_alpha_count(np.array([-1.0, 0.0, 1.0])) == 2


def test_profitability_zero_capital_is_defined():
    p = ModelParams()
    pi = profitability(p, a=1.0, k=0.0, v=2.0)
    assert pi == 0.0
    pi = profitability(p, a=2.0, k=0.25, v=1.0)
    assert abs(pi - 2.0 * 0.5 / 2.0) < 1e-15  # A sqrt(K) / (V + c_b)


def test_psi_field_masks_undefined_points():
    p = ModelParams()
    a = np.array([1.0, 1.0, 1.0])
    mu = np.array([0.0, 0.06, 0.2])
    psi = psi_field(p, a, mu)
    assert abs(psi[0] - 1.0 / 0.06) < 1e-12
    assert np.isnan(psi[2])
    assert int(np.isnan(psi).sum()) == 1


def test_field_pair_validation():
    gs = GridSpec(nx=4, ny=5)
    good = FieldPair(v=np.ones((4, 5)), k=np.zeros((4, 5)))
    good.validate(gs)
    with pytest.raises(ValueError):
        FieldPair(v=np.ones((5, 4)), k=np.zeros((5, 4))).validate(gs)
    bad = FieldPair(v=np.ones((4, 5)), k=np.full((4, 5), -1e-9))
    with pytest.raises(ValueError):
        bad.validate(gs)
